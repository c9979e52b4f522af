//! Quantum switch of the two fueling meters and the cycles built on it.
//!
//! The controller qubit is the fast tensor factor. Controller `|0⟩` applies
//! A then B, `|1⟩` applies B then A. Observing the controller in the `|x_±⟩`
//! basis gives the coherent (post-selected) device; ignoring it gives the
//! incoherent one.
//!
//! All closed forms here assume equal meter strengths (`b = a`). The switch
//! itself accepts any pair.

use serde::Serialize;

use crate::channels::{
    apply_channel, gibbs_state, kraus_meter_a, kraus_meter_b, kraus_work_c, kraus_work_d, stroke_record, ChannelLabel,
    KrausChannel, StrokeRecord, ThermalSpec, ENERGY_TOL,
};
use crate::cycle::{check_closed_form, CycleReport, Mode, PARAM_TOL};
use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{Cplx, DensityOp, Mat, DEFAULT_TOL};

/// Smallest branch probability we condition on.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

/// `|c_θ⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControllerState {
    theta: f64,
}

impl ControllerState {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&theta)) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                min: 0.0,
                max: std::f64::consts::PI,
            });
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn ket(&self) -> [f64; 2] {
        let half = 0.5 * self.theta;
        [half.cos(), half.sin()]
    }

    pub fn density(&self) -> Mat {
        let [c, s] = self.ket();
        Mat::outer(&[Cplx::new(c, 0.0), Cplx::new(s, 0.0)])
    }
}

/// Controller outcome `|x_±⟩ = (|0⟩ ± |1⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn ket(self) -> [f64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [s, self.sign() * s]
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Plus => "+",
            Self::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchOutcome {
    pub branch: Branch,
    pub probability: f64,
    #[serde(skip)]
    pub state: DensityOp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ControlKind {
    CoherentPlus,
    CoherentMinus,
    Incoherent,
}

impl From<Branch> for ControlKind {
    fn from(b: Branch) -> Self {
        match b {
            Branch::Plus => Self::CoherentPlus,
            Branch::Minus => Self::CoherentMinus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeIndicator {
    pub omega: f64,
    pub control_kind: ControlKind,
}

/// `K_ij = B_i A_j ⊗ |0⟩⟨0| + A_j B_i ⊗ |1⟩⟨1|` for arbitrary two-qubit-channel
/// inputs.
pub fn switch_kraus_from(meter_a: &KrausChannel, meter_b: &KrausChannel) -> Result<KrausChannel> {
    let p0 = Mat::basis(2, 0, 0);
    let p1 = Mat::basis(2, 1, 1);
    let mut ops = Vec::with_capacity(meter_a.ops().len() * meter_b.ops().len());
    for mb in meter_b.ops() {
        for ma in meter_a.ops() {
            let natural = mb.matmul(ma)?.kron(&p0);
            let swapped = ma.matmul(mb)?.kron(&p1);
            ops.push(natural.add(&swapped)?);
        }
    }
    KrausChannel::new(ChannelLabel::Switch, ops)
}

/// The 16-operator switch of meters A(a) and B(b).
pub fn switch_kraus(a: f64, b: f64) -> Result<KrausChannel> {
    switch_kraus_from(&kraus_meter_a(a)?, &kraus_meter_b(b)?)
}

/// Runs an already-built switch channel on `ρ ⊗ |c_θ⟩⟨c_θ|`.
pub fn apply_switch_channel(switch: &KrausChannel, rho: &DensityOp, c: &ControllerState) -> Result<DensityOp> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: rho.dim(),
        });
    }
    let joint = rho.mat().kron(&c.density());
    DensityOp::new(switch.apply_mat(&joint)?, DEFAULT_TOL)
}

pub fn apply_switch(rho1: &DensityOp, c: &ControllerState, a: f64, b: f64) -> Result<DensityOp> {
    apply_switch_channel(&switch_kraus(a, b)?, rho1, c)
}

/// Forgets the controller, leaving the incoherent mixture of both orders.
pub fn reduce_incoherent(rho_sw: &DensityOp) -> Result<DensityOp> {
    DensityOp::new(rho_sw.mat().partial_trace_controller()?, DEFAULT_TOL)
}

/// Projects the controller on `|x_±⟩` and returns the branch probability with
/// the normalized system state.
pub fn postselect_branch(rho_sw: &DensityOp, branch: Branch) -> Result<SwitchOutcome> {
    if rho_sw.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: 4,
            right: rho_sw.dim(),
        });
    }
    let x = branch.ket();
    let m = rho_sw.mat();
    // (I ⊗ ⟨x|) ρ (I ⊗ |x⟩)
    let mut block = Mat::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let mut z = Cplx::new(0.0, 0.0);
            for k in 0..2 {
                for l in 0..2 {
                    z += m.get(2 * i + k, 2 * j + l) * (x[k] * x[l]);
                }
            }
            block.set(i, j, z);
        }
    }
    let probability = block.trace().re;
    if probability.is_nan() || probability <= MIN_BRANCH_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    Ok(SwitchOutcome {
        branch,
        probability,
        state: DensityOp::new(block.scale(1.0 / probability), DEFAULT_TOL)?,
    })
}

/// `p_± = [1 ± a(1−a) sin θ] / 2`
pub fn branch_probability_closed(a: f64, theta: f64, branch: Branch) -> f64 {
    0.5 * (1.0 + branch.sign() * a * (1.0 - a) * theta.sin())
}

/// `1 + (1 − 2a) cos θ / tanh βε`, the numerator shared by both regime
/// functions.
fn regime_numerator(a: f64, theta: f64, t: &ThermalSpec) -> f64 {
    1.0 + (1.0 - 2.0 * a) * theta.cos() / t.tanh_be
}

/// `Ω_± = (1 + (1 − 2a) cos θ / tanh βε) / (4 p_±)`
pub fn omega_coherent(a: f64, theta: f64, t: &ThermalSpec, branch: Branch) -> RegimeIndicator {
    RegimeIndicator {
        omega: regime_numerator(a, theta, t) / (4.0 * branch_probability_closed(a, theta, branch)),
        control_kind: branch.into(),
    }
}

/// `Ω_inc = ½ (1 + (1 − 2a) cos θ / tanh βε)`
pub fn omega_incoherent(a: f64, theta: f64, t: &ThermalSpec) -> RegimeIndicator {
    RegimeIndicator {
        omega: 0.5 * regime_numerator(a, theta, t),
        control_kind: ControlKind::Incoherent,
    }
}

/// Strength of work channel C that acts isentropically on the post-selected
/// state.
pub fn w_isentropic_coherent(a: f64, theta: f64, t: &ThermalSpec, branch: Branch) -> Result<f64> {
    let inv = 1.0 / (2.0 * branch_probability_closed(a, theta, branch));
    let w = inv * (0.5 - (a - 0.5) * theta.cos()) + (1.0 - inv) * 0.5 * (1.0 - t.tanh_be);
    if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&w) {
        return Err(Error::Internal(format!(
            "isentropic work parameter w = {w} left [0, 1]"
        )));
    }
    Ok(w.clamp(0.0, 1.0))
}

/// `w_inc = ½ − (a − ½) cos θ`
pub fn w_isentropic_incoherent(a: f64, theta: f64) -> f64 {
    (0.5 - (a - 0.5) * theta.cos()).clamp(0.0, 1.0)
}

/// Engine for `½ < Ω < 1`, accelerator for `0 < Ω < ½`; the boundaries and
/// everything else are out of regime.
pub fn regime_from_omega(omega: f64) -> Mode {
    if omega > 0.5 + PARAM_TOL && omega < 1.0 - PARAM_TOL {
        Mode::Engine
    } else if omega > PARAM_TOL && omega < 0.5 - PARAM_TOL {
        Mode::Accelerator
    } else {
        Mode::OutOfRegime
    }
}

/// `η = 2 − 1/Ω`
pub fn efficiency_from_omega(omega: f64) -> f64 {
    2.0 - 1.0 / omega
}

/// `COP = 1 − (2 − 1/Ω)⁻¹`
pub fn cop_accelerator_from_omega(omega: f64) -> f64 {
    1.0 - 1.0 / (2.0 - 1.0 / omega)
}

/// `ρ^sw_inc = ½I + (a − ½) cos θ σ_z`
pub fn incoherent_state_closed(a: f64, theta: f64) -> Mat {
    let z = (a - 0.5) * theta.cos();
    Mat::diag(&[0.5 + z, 0.5 - z])
}

/// `ρ^(±) = ρ^sw_inc / (2p_±) + (1 − 1/(2p_±)) ρ⁽¹⁾`
pub fn branch_state_closed(a: f64, theta: f64, rho1: &Mat, branch: Branch) -> Result<Mat> {
    let inv = 1.0 / (2.0 * branch_probability_closed(a, theta, branch));
    incoherent_state_closed(a, theta).scale(inv).add(&rho1.scale(1.0 - inv))
}

/// `Q^(±)_hot = ε/(2p_±) [(1 − 2a) cos θ + tanh βε]`
pub fn q_hot_coherent(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> f64 {
    let p = branch_probability_closed(a, theta, branch);
    t.eps / (2.0 * p) * ((1.0 - 2.0 * a) * theta.cos() + t.tanh_be)
}

/// `W^(±) = ε/p_± [(2a − 1) cos θ + (2p_± − 1) tanh βε]`
pub fn work_coherent(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> f64 {
    let p = branch_probability_closed(a, theta, branch);
    t.eps / p * ((2.0 * a - 1.0) * theta.cos() + (2.0 * p - 1.0) * t.tanh_be)
}

/// `Q^(±)_cold = −ε/(2p_±) [(2a − 1) cos θ − (1 − 4p_±) tanh βε]`
pub fn q_cold_coherent(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> f64 {
    let p = branch_probability_closed(a, theta, branch);
    -t.eps / (2.0 * p) * ((2.0 * a - 1.0) * theta.cos() - (1.0 - 4.0 * p) * t.tanh_be)
}

/// `W_inv = 2ε tanh βε`, invested by channel D at its population-swap point.
pub fn work_inverted(t: &ThermalSpec) -> f64 {
    2.0 * t.eps * t.tanh_be
}

/// Heat handed to the meters by the switch in the refrigerator,
/// `−ε/(2p_±) [(2a − 1) cos θ + tanh βε]`.
pub fn q_hot_refrigerator(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> f64 {
    let p = branch_probability_closed(a, theta, branch);
    -t.eps / (2.0 * p) * ((2.0 * a - 1.0) * theta.cos() + t.tanh_be)
}

/// `Q^(±)_cold = ε/(2p_±) [(2a − 1) cos θ + (1 − 4p_±) tanh βε]`
pub fn q_cold_refrigerator(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> f64 {
    let p = branch_probability_closed(a, theta, branch);
    t.eps / (2.0 * p) * ((2.0 * a - 1.0) * theta.cos() + (1.0 - 4.0 * p) * t.tanh_be)
}

/// `COP^ref,(±) = 1/(2p_±) − (Ω_± + 1)`
pub fn cop_refrigerator_coherent(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> f64 {
    let p = branch_probability_closed(a, theta, branch);
    1.0 / (2.0 * p) - (omega_coherent(a, theta, t, branch).omega + 1.0)
}

/// `Q^inc_hot = ε [(1 − 2a) cos θ + tanh βε]`
pub fn q_hot_incoherent(t: &ThermalSpec, a: f64, theta: f64) -> f64 {
    t.eps * ((1.0 - 2.0 * a) * theta.cos() + t.tanh_be)
}

/// `W^inc = 2ε (2a − 1) cos θ`
pub fn work_incoherent(t: &ThermalSpec, a: f64, theta: f64) -> f64 {
    2.0 * t.eps * (2.0 * a - 1.0) * theta.cos()
}

fn check_params(a: f64, theta: f64) -> Result<ControllerState> {
    check_unit_interval("a", a)?;
    ControllerState::new(theta)
}

/// States and strokes shared by the two switch-then-work-channel cycles.
struct WorkCycle {
    strokes: [StrokeRecord; 3],
}

impl WorkCycle {
    /// thermal → `fueled` → C(w) → thermal, with `w` read off the simulated
    /// state as the population swap that keeps the entropy fixed.
    fn run(t: &ThermalSpec, rho1: &DensityOp, fueled: &DensityOp, fuel_label: &str, w_closed: f64) -> Result<Self> {
        let h = t.hamiltonian();
        let w = fueled.mat().get(1, 1).re;
        check_closed_form("w", w_closed, w)?;
        let rho3 = apply_channel(&kraus_work_c(w.clamp(0.0, 1.0))?, fueled)?;
        Ok(Self {
            strokes: [
                stroke_record(&h, rho1, fueled, fuel_label)?,
                stroke_record(&h, fueled, &rho3, "work channel C")?,
                stroke_record(&h, &rho3, rho1, "thermalization")?,
            ],
        })
    }

    fn q_hot(&self) -> f64 {
        self.strokes[0].delta_u
    }

    fn work(&self) -> f64 {
        self.strokes[1].delta_u
    }

    fn q_cold(&self) -> f64 {
        self.strokes[2].delta_u
    }

    fn residual(&self) -> f64 {
        self.strokes.iter().map(|s| s.delta_u).sum()
    }

    /// Checks the regime function against the simulated heat intake and
    /// evaluates the merit for the mode.
    fn merit(&self, t: &ThermalSpec, omega: f64) -> Result<(Mode, Option<f64>)> {
        let scale = 2.0 * t.eps * t.tanh_be;
        check_closed_form("Omega", omega, self.q_hot() / scale)?;
        check_closed_form("W_from_Omega", scale * (1.0 - 2.0 * omega), self.work())?;
        check_closed_form("Q_cold_from_Omega", -scale * (1.0 - omega), self.q_cold())?;
        let mode = regime_from_omega(omega);
        let merit = match mode {
            Mode::Engine => {
                let eta = -self.work() / self.q_hot();
                check_closed_form("eta", efficiency_from_omega(omega), eta)?;
                Some(eta)
            }
            Mode::Accelerator => {
                let cop = -self.q_cold() / self.work();
                check_closed_form("COP_acc", cop_accelerator_from_omega(omega), cop)?;
                Some(cop)
            }
            _ => None,
        };
        Ok((mode, merit))
    }
}

/// Coherently controlled engine/accelerator: thermalize, switch A and B with
/// the controller post-selected on `branch`, extract or invest work with C,
/// thermalize.
pub fn run_ico_cycle_engine(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> Result<CycleReport> {
    let c = check_params(a, theta)?;

    let rho1 = gibbs_state(t);
    let outcome = postselect_branch(&apply_switch(&rho1, &c, a, a)?, branch)?;
    let p = branch_probability_closed(a, theta, branch);
    check_closed_form("p_pm", p, outcome.probability)?;

    let label = format!("switch ({})", branch.symbol());
    let w = w_isentropic_coherent(a, theta, t, branch)?;
    let cycle = WorkCycle::run(t, &rho1, &outcome.state, &label, w)?;

    check_closed_form("U2_switch", q_hot_coherent(t, a, theta, branch), cycle.q_hot())?;
    check_closed_form("W_switch", work_coherent(t, a, theta, branch), cycle.work())?;
    check_closed_form("Q_cold_switch", q_cold_coherent(t, a, theta, branch), cycle.q_cold())?;

    let omega = omega_coherent(a, theta, t, branch).omega;
    let (mode, merit) = cycle.merit(t, omega)?;
    Ok(CycleReport {
        mode,
        q_hot: cycle.q_hot(),
        work: cycle.work(),
        q_cold: cycle.q_cold(),
        merit,
        omega: Some(omega),
        branch_probability: Some(outcome.probability),
        expected_repeats: Some(1.0 / outcome.probability),
        first_law_residual: cycle.residual(),
        strokes: cycle.strokes.to_vec(),
    })
}

/// Coherently controlled refrigerator: thermalize, invest work with the
/// isentropic channel D, switch A and B with the controller post-selected on
/// `branch`, thermalize.
///
/// Reported as a refrigerator only when `Ω_± < 0` and heat actually leaves
/// the cold bath.
pub fn run_ico_cycle_refrigerator(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> Result<CycleReport> {
    let c = check_params(a, theta)?;
    let h = t.hamiltonian();
    let (p0, _) = t.populations();

    let rho1 = gibbs_state(t);
    let rho2 = apply_channel(&kraus_work_d(p0)?, &rho1)?;
    let outcome = postselect_branch(&apply_switch(&rho2, &c, a, a)?, branch)?;
    let p = branch_probability_closed(a, theta, branch);
    check_closed_form("p_pm_refrig", p, outcome.probability)?;
    let rho3 = outcome.state;

    let strokes = vec![
        stroke_record(&h, &rho1, &rho2, "work channel D")?,
        stroke_record(&h, &rho2, &rho3, format!("switch ({})", branch.symbol()))?,
        stroke_record(&h, &rho3, &rho1, "thermalization")?,
    ];
    let (work, q_hot, q_cold) = (strokes[0].delta_u, strokes[1].delta_u, strokes[2].delta_u);

    check_closed_form("W_inv", work_inverted(t), work)?;
    check_closed_form("Q_hot_refrig", q_hot_refrigerator(t, a, theta, branch), q_hot)?;
    check_closed_form("Q_cold_refrig", q_cold_refrigerator(t, a, theta, branch), q_cold)?;

    let omega = omega_coherent(a, theta, t, branch).omega;
    let cop = q_cold / work;
    check_closed_form("COP_ref_switch", cop_refrigerator_coherent(t, a, theta, branch), cop)?;
    let mode = if omega < -PARAM_TOL && q_cold > ENERGY_TOL {
        Mode::Refrigerator
    } else {
        Mode::OutOfRegime
    };
    Ok(CycleReport {
        mode,
        q_hot,
        work,
        q_cold,
        merit: (mode == Mode::Refrigerator).then_some(cop),
        omega: Some(omega),
        branch_probability: Some(outcome.probability),
        expected_repeats: Some(1.0 / outcome.probability),
        first_law_residual: strokes.iter().map(|s| s.delta_u).sum(),
        strokes,
    })
}

/// Incoherently controlled engine/accelerator: the controller is traced out,
/// so the device runs deterministically on the mixture of both orders.
pub fn run_incoherent_cycle(t: &ThermalSpec, a: f64, theta: f64) -> Result<CycleReport> {
    let c = check_params(a, theta)?;

    let rho1 = gibbs_state(t);
    let mixed = reduce_incoherent(&apply_switch(&rho1, &c, a, a)?)?;
    let cycle = WorkCycle::run(t, &rho1, &mixed, "switch (inc)", w_isentropic_incoherent(a, theta))?;

    check_closed_form("Q_hot_inc", q_hot_incoherent(t, a, theta), cycle.q_hot())?;
    check_closed_form("W_inc", work_incoherent(t, a, theta), cycle.work())?;

    let omega = omega_incoherent(a, theta, t).omega;
    let (mode, merit) = cycle.merit(t, omega)?;
    Ok(CycleReport {
        mode,
        q_hot: cycle.q_hot(),
        work: cycle.work(),
        q_cold: cycle.q_cold(),
        merit,
        omega: Some(omega),
        branch_probability: None,
        expected_repeats: None,
        first_law_residual: cycle.residual(),
        strokes: cycle.strokes.to_vec(),
    })
}

/// Coherent vs incoherent control at the same `(a, θ)`.
///
/// Efficiencies are reported for `½ ≤ Ω < 1` (the closed lower end is the
/// null-efficiency line), accelerator COPs for `0 < Ω < ½`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageRecord {
    pub advantaged: bool,
    pub p: f64,
    pub omega_coherent: f64,
    pub omega_incoherent: f64,
    pub eta_coherent: Option<f64>,
    pub eta_incoherent: Option<f64>,
    pub cop_acc_coherent: Option<f64>,
    pub cop_acc_incoherent: Option<f64>,
}

fn engine_side(omega: f64) -> Option<f64> {
    (0.5 - PARAM_TOL..1.0 - PARAM_TOL)
        .contains(&omega)
        .then(|| efficiency_from_omega(omega).max(0.0))
}

fn accelerator_side(omega: f64) -> Option<f64> {
    (regime_from_omega(omega) == Mode::Accelerator).then(|| cop_accelerator_from_omega(omega))
}

pub fn coherent_advantage(t: &ThermalSpec, a: f64, theta: f64, branch: Branch) -> Result<AdvantageRecord> {
    check_params(a, theta)?;
    let p = branch_probability_closed(a, theta, branch);
    let coherent = omega_coherent(a, theta, t, branch).omega;
    let incoherent = omega_incoherent(a, theta, t).omega;
    let advantaged = coherent - incoherent > PARAM_TOL;

    // Ω_± = Ω_inc / (2 p_±), so with Ω_inc > 0 the advantage is exactly p_± < ½.
    if incoherent > PARAM_TOL {
        let expected = p < 0.5 - PARAM_TOL;
        let undecided = (p - 0.5).abs() <= PARAM_TOL || (coherent - incoherent).abs() <= PARAM_TOL;
        if advantaged != expected && !undecided {
            return Err(Error::Internal(format!(
                "advantage {advantaged} disagrees with p = {p} at a = {a}, theta = {theta}"
            )));
        }
    }
    Ok(AdvantageRecord {
        advantaged,
        p,
        omega_coherent: coherent,
        omega_incoherent: incoherent,
        eta_coherent: engine_side(coherent),
        eta_incoherent: engine_side(incoherent),
        cop_acc_coherent: accelerator_side(coherent),
        cop_acc_incoherent: accelerator_side(incoherent),
    })
}
