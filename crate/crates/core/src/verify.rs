//! Cross-validation of every closed form against brute-force Kraus sums.
//!
//! Each registered [`Equation`] reads a [`Sample`], which holds the states and
//! stroke energies of every device simulated at one parameter point, and
//! returns `(analytic, simulated)` pairs. Parameter points come from a seeded
//! SplitMix64 stream plus a structured grid through the special points.
//!
//! The channels used by the simulation are injectable through [`Channels`],
//! so a deliberately broken meter can be shown to trip the harness.

use std::f64::consts::{FRAC_PI_2, PI};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    apply_channel, gibbs_state, kraus_meter_a, kraus_meter_b, kraus_work_c, kraus_work_d, HamiltonianOp, KrausChannel,
    ThermalSpec, ISENTROPIC_TOL,
};
use crate::cycle::{
    classify_mode_definite, cop_accelerator_definite, cop_refrigerator_definite, delta_u1_definite, delta_u2_definite,
    delta_u3_definite, efficiency_definite, Mode,
};
use crate::error::Result;
use crate::linalg::{binary_entropy, relative_entropy, von_neumann_entropy, DensityOp, Mat};
use crate::switch::{
    apply_switch_channel, branch_probability_closed, branch_state_closed, cop_accelerator_from_omega,
    cop_refrigerator_coherent, efficiency_from_omega, incoherent_state_closed, omega_coherent, omega_incoherent,
    postselect_branch, q_cold_coherent, q_cold_refrigerator, q_hot_coherent, q_hot_incoherent, q_hot_refrigerator,
    reduce_incoherent, regime_from_omega, switch_kraus_from, w_isentropic_coherent, w_isentropic_incoherent,
    work_coherent, work_incoherent, work_inverted, Branch, ControllerState,
};

/// Largest absolute deviation a closed form may show.
pub const VERIFY_THRESHOLD: f64 = 1e-10;

/// Default resolution of the structured grid per axis.
pub const DEFAULT_GRID_N: usize = 11;

/// Range of `βε` drawn by the random suite.
pub const BETA_EPS_RANGE: (f64, f64) = (0.05, 3.0);

/// Parameters of one checked case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseInputs {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub beta_eps: f64,
    pub eps: f64,
    pub branch: Option<Branch>,
}

impl CaseInputs {
    fn with_branch(self, branch: Branch) -> Self {
        Self {
            branch: Some(branch),
            ..self
        }
    }
}

/// How a deviation is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Metric {
    /// `|x − y|`, for energies, entropies, probabilities and matrix entries.
    Absolute,
    /// `|x − y| / max(1, |x y|)`: absolute up to magnitude one, then the
    /// difference of reciprocals. Merits diverge at regime edges, where the
    /// simulated ratio loses digits as `1/W²` but its reciprocal stays exact.
    Merit,
}

/// One closed form evaluated at one case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub inputs: CaseInputs,
    pub analytic: f64,
    pub simulated: f64,
    pub metric: Metric,
}

impl Check {
    pub fn new(inputs: CaseInputs, analytic: f64, simulated: f64) -> Self {
        Self {
            inputs,
            analytic,
            simulated,
            metric: Metric::Absolute,
        }
    }

    pub fn merit(inputs: CaseInputs, analytic: f64, simulated: f64) -> Self {
        Self {
            metric: Metric::Merit,
            ..Self::new(inputs, analytic, simulated)
        }
    }

    /// Entry-wise comparison of two matrices, reported at the worst entry.
    pub fn matrix(inputs: CaseInputs, analytic: &Mat, simulated: &Mat) -> Self {
        let mut worst = Self::new(inputs, 0.0, 0.0);
        for (x, y) in analytic.entries().iter().zip(simulated.entries()) {
            for (u, v) in [(x.re, y.re), (x.im, y.im)] {
                if (u - v).abs() > worst.deviation() {
                    worst = Self::new(inputs, u, v);
                }
            }
        }
        worst
    }

    /// Deviation under the check's metric, infinite when either side is not
    /// a number.
    pub fn deviation(&self) -> f64 {
        let mut d = (self.analytic - self.simulated).abs();
        if self.metric == Metric::Merit {
            d /= (self.analytic * self.simulated).abs().max(1.0);
        }
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }
}

/// A single named comparison, as stored in the case list of a report run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationCase {
    pub equation_id: &'static str,
    pub inputs: CaseInputs,
    pub analytic: f64,
    pub simulated: f64,
    pub deviation: f64,
}

/// Constructors for the four channel families used by the simulation.
#[derive(Debug, Clone, Copy)]
pub struct Channels {
    pub meter_a: fn(f64) -> Result<KrausChannel>,
    pub meter_b: fn(f64) -> Result<KrausChannel>,
    pub work_c: fn(f64) -> Result<KrausChannel>,
    pub work_d: fn(f64) -> Result<KrausChannel>,
}

impl Default for Channels {
    fn default() -> Self {
        Self {
            meter_a: kraus_meter_a,
            meter_b: kraus_meter_b,
            work_c: kraus_work_c,
            work_d: kraus_work_d,
        }
    }
}

/// `ΔU` and `ΔS` of one stroke.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub delta_u: f64,
    pub delta_s: f64,
}

fn step(h: &HamiltonianOp, before: &DensityOp, after: &DensityOp) -> Result<Step> {
    Ok(Step {
        delta_u: h.energy(after) - h.energy(before),
        delta_s: von_neumann_entropy(after)? - von_neumann_entropy(before)?,
    })
}

/// The definite-order cycle at `(a, b)`.
#[derive(Debug, Clone)]
pub struct DefiniteRun {
    pub inputs: CaseInputs,
    /// Meter A, meter B, thermalization.
    pub steps: [Step; 3],
    /// `S(ρ⁽ℓ⁾‖ρ⁽¹⁾)` for `ℓ = 1, 2, 3`.
    pub relative: [f64; 3],
}

impl DefiniteRun {
    fn simulate(ch: &Channels, t: &ThermalSpec, rho1: &DensityOp, inputs: CaseInputs) -> Result<Self> {
        let h = t.hamiltonian();
        let rho2 = apply_channel(&(ch.meter_a)(inputs.a)?, rho1)?;
        let rho3 = apply_channel(&(ch.meter_b)(inputs.b)?, &rho2)?;
        Ok(Self {
            inputs,
            steps: [step(&h, rho1, &rho2)?, step(&h, &rho2, &rho3)?, step(&h, &rho3, rho1)?],
            relative: [
                relative_entropy(rho1, rho1)?,
                relative_entropy(&rho2, rho1)?,
                relative_entropy(&rho3, rho1)?,
            ],
        })
    }

    pub fn q_hot(&self) -> f64 {
        self.steps[0].delta_u
    }

    pub fn middle(&self) -> f64 {
        self.steps[1].delta_u
    }

    pub fn q_cold(&self) -> f64 {
        self.steps[2].delta_u
    }
}

/// Switch, then isentropic channel C on the resulting system state.
#[derive(Debug, Clone)]
pub struct WorkRun {
    pub inputs: CaseInputs,
    pub probability: Option<f64>,
    pub fueled: DensityOp,
    /// Switch, channel C, thermalization.
    pub steps: [Step; 3],
}

impl WorkRun {
    fn simulate(
        ch: &Channels,
        t: &ThermalSpec,
        rho1: &DensityOp,
        fueled: DensityOp,
        w: f64,
        inputs: CaseInputs,
        probability: Option<f64>,
    ) -> Result<Self> {
        let h = t.hamiltonian();
        let rho3 = apply_channel(&(ch.work_c)(w)?, &fueled)?;
        let steps = [
            step(&h, rho1, &fueled)?,
            step(&h, &fueled, &rho3)?,
            step(&h, &rho3, rho1)?,
        ];
        Ok(Self {
            inputs,
            probability,
            fueled,
            steps,
        })
    }

    pub fn q_hot(&self) -> f64 {
        self.steps[0].delta_u
    }

    pub fn work(&self) -> f64 {
        self.steps[1].delta_u
    }

    pub fn q_cold(&self) -> f64 {
        self.steps[2].delta_u
    }
}

/// Channel D at its swap point, then the post-selected switch.
#[derive(Debug, Clone)]
pub struct RefrigeratorRun {
    pub inputs: CaseInputs,
    pub probability: f64,
    pub work: f64,
    pub q_hot: f64,
    pub q_cold: f64,
}

/// An isentropic channel applied to the Gibbs state.
#[derive(Debug, Clone)]
pub struct EquilibriumRun {
    pub delta_u: f64,
    pub delta_s: f64,
    pub relative: f64,
}

/// Everything simulated at one parameter point.
#[derive(Debug, Clone)]
pub struct Sample {
    pub inputs: CaseInputs,
    pub thermal: ThermalSpec,
    pub rho1: DensityOp,
    /// `b = a`
    pub definite: DefiniteRun,
    /// `a` at the isentropic point, `b` above it.
    pub definite_refrigerator: DefiniteRun,
    pub switched: DensityOp,
    pub incoherent_state: DensityOp,
    pub coherent: [WorkRun; 2],
    pub incoherent: WorkRun,
    pub refrigerator: [RefrigeratorRun; 2],
    pub equilibrium: Vec<EquilibriumRun>,
}

impl Sample {
    pub fn simulate(ch: &Channels, inputs: CaseInputs) -> Result<Self> {
        let t = ThermalSpec::from_beta_eps(inputs.beta_eps, inputs.eps)?;
        let (p0, p1) = t.populations();
        let (a, theta) = (inputs.a, inputs.theta);
        let rho1 = gibbs_state(&t);
        let h = t.hamiltonian();

        let definite = DefiniteRun::simulate(ch, &t, &rho1, inputs)?;
        let fridge_inputs = CaseInputs {
            a: p0,
            b: p0 + (1.0 - p0) * a,
            ..inputs
        };
        let definite_refrigerator = DefiniteRun::simulate(ch, &t, &rho1, fridge_inputs)?;

        let c = ControllerState::new(theta)?;
        let switch = switch_kraus_from(&(ch.meter_a)(a)?, &(ch.meter_b)(a)?)?;
        let switched = apply_switch_channel(&switch, &rho1, &c)?;
        let incoherent_state = reduce_incoherent(&switched)?;

        let coherent_run = |branch: Branch| -> Result<WorkRun> {
            let outcome = postselect_branch(&switched, branch)?;
            let w = w_isentropic_coherent(a, theta, &t, branch)?;
            WorkRun::simulate(
                ch,
                &t,
                &rho1,
                outcome.state,
                w,
                inputs.with_branch(branch),
                Some(outcome.probability),
            )
        };
        let coherent = [coherent_run(Branch::Plus)?, coherent_run(Branch::Minus)?];
        let incoherent = WorkRun::simulate(
            ch,
            &t,
            &rho1,
            incoherent_state.clone(),
            w_isentropic_incoherent(a, theta),
            inputs,
            None,
        )?;

        let inverted = apply_channel(&(ch.work_d)(p0)?, &rho1)?;
        let inverted_switched = apply_switch_channel(&switch, &inverted, &c)?;
        let fridge_run = |branch: Branch| -> Result<RefrigeratorRun> {
            let outcome = postselect_branch(&inverted_switched, branch)?;
            Ok(RefrigeratorRun {
                inputs: inputs.with_branch(branch),
                probability: outcome.probability,
                work: h.energy(&inverted) - h.energy(&rho1),
                q_hot: h.energy(&outcome.state) - h.energy(&inverted),
                q_cold: h.energy(&rho1) - h.energy(&outcome.state),
            })
        };
        let refrigerator = [fridge_run(Branch::Plus)?, fridge_run(Branch::Minus)?];

        let mut equilibrium = Vec::with_capacity(4);
        for (family, x) in [(ch.work_c, p0), (ch.work_c, p1), (ch.work_d, p1), (ch.work_d, p0)] {
            let out = apply_channel(&family(x)?, &rho1)?;
            let s = step(&h, &rho1, &out)?;
            equilibrium.push(EquilibriumRun {
                delta_u: s.delta_u,
                delta_s: s.delta_s,
                relative: relative_entropy(&out, &rho1)?,
            });
        }

        Ok(Self {
            inputs,
            thermal: t,
            rho1,
            definite,
            definite_refrigerator,
            switched,
            incoherent_state,
            coherent,
            incoherent,
            refrigerator,
            equilibrium,
        })
    }

    fn beta(&self) -> f64 {
        self.inputs.beta_eps / self.inputs.eps
    }

    /// `2ε tanh βε`, the energy scale of the regime functions.
    fn omega_scale(&self) -> f64 {
        2.0 * self.thermal.eps * self.thermal.tanh_be
    }

    fn definite_runs(&self) -> [&DefiniteRun; 2] {
        [&self.definite, &self.definite_refrigerator]
    }
}

/// A registered closed form.
#[derive(Debug, Clone, Copy)]
pub struct Equation {
    pub id: &'static str,
    pub eval: fn(&Sample) -> Vec<Check>,
}

fn definite_energy(s: &Sample, pick: fn(&ThermalSpec, &DefiniteRun) -> (f64, f64)) -> Vec<Check> {
    s.definite_runs()
        .into_iter()
        .map(|r| {
            let (analytic, simulated) = pick(&s.thermal, r);
            Check::new(r.inputs, analytic, simulated)
        })
        .collect()
}

fn entropy_of(u: f64) -> f64 {
    binary_entropy(u).unwrap_or(f64::NAN)
}

fn eq_u1(s: &Sample) -> Vec<Check> {
    definite_energy(s, |t, r| (delta_u1_definite(t, r.inputs.b), r.q_cold()))
}

fn eq_u2(s: &Sample) -> Vec<Check> {
    definite_energy(s, |t, r| (delta_u2_definite(t, r.inputs.a), r.q_hot()))
}

fn eq_u3(s: &Sample) -> Vec<Check> {
    definite_energy(s, |t, r| (delta_u3_definite(t, r.inputs.a, r.inputs.b), r.middle()))
}

fn eq_s2(s: &Sample) -> Vec<Check> {
    definite_energy(s, |t, r| {
        (
            entropy_of(r.inputs.a) - entropy_of(t.populations().1),
            r.steps[0].delta_s,
        )
    })
}

fn eq_s3(s: &Sample) -> Vec<Check> {
    definite_energy(s, |_, r| {
        (entropy_of(r.inputs.b) - entropy_of(r.inputs.a), r.steps[1].delta_s)
    })
}

fn eq_entropic_identity(s: &Sample) -> Vec<Check> {
    let beta = s.beta();
    let mut out = Vec::with_capacity(6);
    for r in s.definite_runs() {
        for (l, st) in r.steps.iter().enumerate() {
            // strokes run 1→2, 2→3, 3→1
            let (from, to) = (l, (l + 1) % 3);
            let relative_change = r.relative[to] - r.relative[from];
            out.push(Check::new(r.inputs, st.delta_s + relative_change, beta * st.delta_u));
        }
    }
    out
}

fn in_mode(s: &Sample, r: &DefiniteRun, mode: Mode) -> bool {
    classify_mode_definite(&s.thermal, r.inputs.a, r.inputs.b) == mode
}

fn eq_cop_acc(s: &Sample) -> Vec<Check> {
    let r = &s.definite;
    if !in_mode(s, r, Mode::Accelerator) {
        return Vec::new();
    }
    let analytic = cop_accelerator_definite(&s.thermal, r.inputs.a).unwrap_or(f64::NAN);
    vec![Check::merit(r.inputs, analytic, -r.q_cold() / r.middle())]
}

fn eq_eta(s: &Sample) -> Vec<Check> {
    let r = &s.definite;
    if !in_mode(s, r, Mode::Engine) {
        return Vec::new();
    }
    let analytic = efficiency_definite(&s.thermal, r.inputs.a).unwrap_or(f64::NAN);
    vec![Check::merit(r.inputs, analytic, -r.middle() / r.q_hot())]
}

fn eq_cop_ref(s: &Sample) -> Vec<Check> {
    let r = &s.definite_refrigerator;
    if !in_mode(s, r, Mode::Refrigerator) {
        return Vec::new();
    }
    let analytic = cop_refrigerator_definite(&s.thermal, r.inputs.b).unwrap_or(f64::NAN);
    vec![Check::merit(r.inputs, analytic, r.q_cold() / r.q_hot())]
}

fn eq_cop_acc_entropic(s: &Sample) -> Vec<Check> {
    let r = &s.definite;
    if !in_mode(s, r, Mode::Accelerator) {
        return Vec::new();
    }
    let [_, r2, r3] = r.relative;
    let ds2 = r.steps[0].delta_s;
    vec![Check::merit(r.inputs, (r3 + ds2) / (r3 - r2), -r.q_cold() / r.middle())]
}

fn eq_eta_entropic(s: &Sample) -> Vec<Check> {
    let r = &s.definite;
    if !in_mode(s, r, Mode::Engine) {
        return Vec::new();
    }
    let [_, r2, r3] = r.relative;
    let ds2 = r.steps[0].delta_s;
    vec![Check::merit(r.inputs, (r2 - r3) / (r2 + ds2), -r.middle() / r.q_hot())]
}

fn eq_cop_ref_entropic(s: &Sample) -> Vec<Check> {
    let r = &s.definite_refrigerator;
    if !in_mode(s, r, Mode::Refrigerator) {
        return Vec::new();
    }
    let [_, r2, r3] = r.relative;
    let ds1 = r.steps[2].delta_s;
    vec![Check::merit(r.inputs, (ds1 - r3) / r2, r.q_cold() / r.q_hot())]
}

fn eq_rho_sw_inc(s: &Sample) -> Vec<Check> {
    let closed = incoherent_state_closed(s.inputs.a, s.inputs.theta);
    vec![Check::matrix(s.inputs, &closed, s.incoherent_state.mat())]
}

type CoherentPick = fn(&Sample, &WorkRun, Branch) -> Option<(f64, f64)>;

fn coherent_checks_with(s: &Sample, metric: Metric, f: CoherentPick) -> Vec<Check> {
    s.coherent
        .iter()
        .zip(Branch::BOTH)
        .filter_map(|(r, br)| {
            f(s, r, br).map(|(x, y)| Check {
                metric,
                ..Check::new(r.inputs, x, y)
            })
        })
        .collect()
}

fn coherent_checks(s: &Sample, f: CoherentPick) -> Vec<Check> {
    coherent_checks_with(s, Metric::Absolute, f)
}

fn eq_p_pm(s: &Sample) -> Vec<Check> {
    coherent_checks(s, |s, r, br| {
        Some((
            branch_probability_closed(s.inputs.a, s.inputs.theta, br),
            r.probability?,
        ))
    })
}

fn eq_rho_pm(s: &Sample) -> Vec<Check> {
    s.coherent
        .iter()
        .zip(Branch::BOTH)
        .map(|(r, br)| {
            let closed = branch_state_closed(s.inputs.a, s.inputs.theta, s.rho1.mat(), br);
            match closed {
                Ok(m) => Check::matrix(r.inputs, &m, r.fueled.mat()),
                Err(_) => Check::new(r.inputs, f64::NAN, f64::NAN),
            }
        })
        .collect()
}

fn eq_rho_mixture(s: &Sample) -> Vec<Check> {
    let mixture = s.coherent.iter().try_fold(Mat::zeros(2), |acc, r| {
        acc.add(&r.fueled.mat().scale(r.probability.unwrap_or(f64::NAN)))
    });
    match mixture {
        Ok(m) => vec![Check::matrix(s.inputs, s.incoherent_state.mat(), &m)],
        Err(_) => vec![Check::new(s.inputs, f64::NAN, f64::NAN)],
    }
}

fn eq_u2_switch(s: &Sample) -> Vec<Check> {
    coherent_checks(s, |s, r, br| {
        Some((q_hot_coherent(&s.thermal, s.inputs.a, s.inputs.theta, br), r.q_hot()))
    })
}

fn eq_omega_pm(s: &Sample) -> Vec<Check> {
    coherent_checks(s, |s, r, br| {
        let omega = omega_coherent(s.inputs.a, s.inputs.theta, &s.thermal, br).omega;
        Some((omega, r.q_hot() / s.omega_scale()))
    })
}

fn eq_w_pm(s: &Sample) -> Vec<Check> {
    coherent_checks(s, |s, r, br| {
        let w = w_isentropic_coherent(s.inputs.a, s.inputs.theta, &s.thermal, br).unwrap_or(f64::NAN);
        Some((w, r.fueled.mat().get(1, 1).re))
    })
}

fn eq_w_switch(s: &Sample) -> Vec<Check> {
    coherent_checks(s, |s, r, br| {
        Some((work_coherent(&s.thermal, s.inputs.a, s.inputs.theta, br), r.work()))
    })
}

fn eq_q_cold_switch(s: &Sample) -> Vec<Check> {
    coherent_checks(s, |s, r, br| {
        Some((q_cold_coherent(&s.thermal, s.inputs.a, s.inputs.theta, br), r.q_cold()))
    })
}

fn eq_eta_switch(s: &Sample) -> Vec<Check> {
    coherent_checks_with(s, Metric::Merit, |s, r, br| {
        let omega = omega_coherent(s.inputs.a, s.inputs.theta, &s.thermal, br).omega;
        (regime_from_omega(omega) == Mode::Engine).then(|| (efficiency_from_omega(omega), -r.work() / r.q_hot()))
    })
}

fn eq_cop_acc_switch(s: &Sample) -> Vec<Check> {
    coherent_checks_with(s, Metric::Merit, |s, r, br| {
        let omega = omega_coherent(s.inputs.a, s.inputs.theta, &s.thermal, br).omega;
        (regime_from_omega(omega) == Mode::Accelerator)
            .then(|| (cop_accelerator_from_omega(omega), -r.q_cold() / r.work()))
    })
}

fn eq_ds3_switch(s: &Sample) -> Vec<Check> {
    coherent_checks(s, |_, r, _| Some((0.0, r.steps[1].delta_s)))
}

type RefrigeratorPick = fn(&Sample, &RefrigeratorRun, Branch) -> (f64, f64);

fn refrigerator_checks_with(s: &Sample, metric: Metric, f: RefrigeratorPick) -> Vec<Check> {
    s.refrigerator
        .iter()
        .zip(Branch::BOTH)
        .map(|(r, br)| {
            let (x, y) = f(s, r, br);
            Check {
                metric,
                ..Check::new(r.inputs, x, y)
            }
        })
        .collect()
}

fn refrigerator_checks(s: &Sample, f: RefrigeratorPick) -> Vec<Check> {
    refrigerator_checks_with(s, Metric::Absolute, f)
}

fn eq_w_inv(s: &Sample) -> Vec<Check> {
    refrigerator_checks(s, |s, r, _| (work_inverted(&s.thermal), r.work))
}

fn eq_p_pm_refrig(s: &Sample) -> Vec<Check> {
    refrigerator_checks(s, |s, r, br| {
        (branch_probability_closed(s.inputs.a, s.inputs.theta, br), r.probability)
    })
}

fn eq_q_hot_refrig(s: &Sample) -> Vec<Check> {
    refrigerator_checks(s, |s, r, br| {
        (q_hot_refrigerator(&s.thermal, s.inputs.a, s.inputs.theta, br), r.q_hot)
    })
}

fn eq_q_cold_refrig(s: &Sample) -> Vec<Check> {
    refrigerator_checks(s, |s, r, br| {
        (
            q_cold_refrigerator(&s.thermal, s.inputs.a, s.inputs.theta, br),
            r.q_cold,
        )
    })
}

fn eq_cop_ref_switch(s: &Sample) -> Vec<Check> {
    refrigerator_checks_with(s, Metric::Merit, |s, r, br| {
        (
            cop_refrigerator_coherent(&s.thermal, s.inputs.a, s.inputs.theta, br),
            r.q_cold / r.work,
        )
    })
}

fn omega_inc(s: &Sample) -> f64 {
    omega_incoherent(s.inputs.a, s.inputs.theta, &s.thermal).omega
}

fn eq_omega_inc(s: &Sample) -> Vec<Check> {
    vec![Check::new(
        s.inputs,
        omega_inc(s),
        s.incoherent.q_hot() / s.omega_scale(),
    )]
}

fn eq_q_hot_inc(s: &Sample) -> Vec<Check> {
    let closed = q_hot_incoherent(&s.thermal, s.inputs.a, s.inputs.theta);
    vec![Check::new(s.inputs, closed, s.incoherent.q_hot())]
}

fn eq_w_inc(s: &Sample) -> Vec<Check> {
    let closed = w_isentropic_incoherent(s.inputs.a, s.inputs.theta);
    vec![Check::new(s.inputs, closed, s.incoherent_state.mat().get(1, 1).re)]
}

fn eq_work_inc(s: &Sample) -> Vec<Check> {
    let closed = work_incoherent(&s.thermal, s.inputs.a, s.inputs.theta);
    vec![Check::new(s.inputs, closed, s.incoherent.work())]
}

fn eq_eta_inc(s: &Sample) -> Vec<Check> {
    let omega = omega_inc(s);
    if regime_from_omega(omega) != Mode::Engine {
        return Vec::new();
    }
    let r = &s.incoherent;
    vec![Check::merit(
        s.inputs,
        efficiency_from_omega(omega),
        -r.work() / r.q_hot(),
    )]
}

fn eq_cop_acc_inc(s: &Sample) -> Vec<Check> {
    let omega = omega_inc(s);
    if regime_from_omega(omega) != Mode::Accelerator {
        return Vec::new();
    }
    let r = &s.incoherent;
    vec![Check::merit(
        s.inputs,
        cop_accelerator_from_omega(omega),
        -r.q_cold() / r.work(),
    )]
}

fn eq_ds3_inc(s: &Sample) -> Vec<Check> {
    vec![Check::new(s.inputs, 0.0, s.incoherent.steps[1].delta_s)]
}

fn eq_equilibrium(s: &Sample) -> Vec<Check> {
    let beta = s.beta();
    s.equilibrium
        .iter()
        .map(|e| Check::new(s.inputs, e.relative / beta, e.delta_u))
        .collect()
}

/// Every closed form the harness checks, in report order.
pub fn registry() -> Vec<Equation> {
    macro_rules! eqs {
        ($($id:literal => $f:ident),* $(,)?) => {
            vec![$(Equation { id: $id, eval: $f }),*]
        };
    }
    eqs![
        "U1" => eq_u1,
        "U2" => eq_u2,
        "U3" => eq_u3,
        "S2" => eq_s2,
        "S3" => eq_s3,
        "entropic_identity" => eq_entropic_identity,
        "COP_acc" => eq_cop_acc,
        "eta" => eq_eta,
        "COP_ref" => eq_cop_ref,
        "COP_acc_entropic" => eq_cop_acc_entropic,
        "eta_entropic" => eq_eta_entropic,
        "COP_ref_entropic" => eq_cop_ref_entropic,
        "rho_sw_inc" => eq_rho_sw_inc,
        "p_pm" => eq_p_pm,
        "rho_pm" => eq_rho_pm,
        "rho_mixture" => eq_rho_mixture,
        "U2_switch" => eq_u2_switch,
        "Omega_pm" => eq_omega_pm,
        "w_pm" => eq_w_pm,
        "W_switch" => eq_w_switch,
        "Q_cold_switch" => eq_q_cold_switch,
        "eta_switch" => eq_eta_switch,
        "COP_acc_switch" => eq_cop_acc_switch,
        "dS3_switch" => eq_ds3_switch,
        "W_inv" => eq_w_inv,
        "p_pm_refrig" => eq_p_pm_refrig,
        "Q_hot_refrig" => eq_q_hot_refrig,
        "Q_cold_refrig" => eq_q_cold_refrig,
        "COP_ref_switch" => eq_cop_ref_switch,
        "Omega_inc" => eq_omega_inc,
        "Q_hot_inc" => eq_q_hot_inc,
        "w_inc" => eq_w_inc,
        "W_inc" => eq_work_inc,
        "eta_inc" => eq_eta_inc,
        "COP_acc_inc" => eq_cop_acc_inc,
        "dS3_inc" => eq_ds3_inc,
        "dU_isentropic_equilibrium" => eq_equilibrium,
    ]
}

/// Summary of one equation over all cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationReport {
    pub id: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub worst_inputs: Option<CaseInputs>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub equations: Vec<EquationReport>,
}

impl VerifyReport {
    pub fn equation(&self, id: &str) -> Option<&EquationReport> {
        self.equations.iter().find(|e| e.id == id)
    }

    /// Equations whose worst case exceeds the threshold.
    pub fn failing(&self) -> Vec<&'static str> {
        self.equations
            .iter()
            .filter(|e| e.max_deviation.is_nan() || e.max_deviation > VERIFY_THRESHOLD)
            .map(|e| e.id)
            .collect()
    }
}

fn linspace(min: f64, max: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (max - min) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| {
        if i + 1 == n && n > 1 {
            max
        } else {
            min + step * i as f64
        }
    })
}

/// `[0, 1)` from the top 53 bits.
fn uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seeded random points followed by the structured grid.
///
/// Random points draw `a`, `θ`, `βε` in that order from SplitMix64 with
/// `b = a` and `ε = 1`.
pub fn sample_points(seed: u64, n_random: usize, grid_n: usize) -> Vec<CaseInputs> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_random);
    for _ in 0..n_random {
        let a = uniform(&mut rng);
        let theta = PI * uniform(&mut rng);
        let (lo, hi) = BETA_EPS_RANGE;
        let beta_eps = lo + (hi - lo) * uniform(&mut rng);
        points.push(CaseInputs {
            a,
            b: a,
            theta,
            beta_eps,
            eps: 1.0,
            branch: None,
        });
    }

    let (lo, hi) = BETA_EPS_RANGE;
    let betas: Vec<f64> = [0.45, 1.39].into_iter().chain(linspace(lo, hi, grid_n)).collect();
    let thetas: Vec<f64> = [0.0, FRAC_PI_2, PI]
        .into_iter()
        .chain(linspace(0.0, PI, grid_n))
        .collect();
    for &beta_eps in &betas {
        let tanh = beta_eps.tanh();
        let special = [0.0, 0.5 * (1.0 - tanh), 0.5, 0.5 * (1.0 + tanh), 1.0];
        for a in special.into_iter().chain(linspace(0.0, 1.0, grid_n)) {
            for &theta in &thetas {
                points.push(CaseInputs {
                    a,
                    b: a,
                    theta,
                    beta_eps,
                    eps: 1.0,
                    branch: None,
                });
            }
        }
    }
    points
}

/// Runs `registry` over `points`, simulating with `channels`.
///
/// A point whose simulation fails counts as an infinite deviation for every
/// equation. Cases run in parallel; aggregation follows point order, so the
/// report is reproducible bit for bit.
pub fn verify_with(registry: &[Equation], channels: &Channels, points: &[CaseInputs]) -> VerifyReport {
    let per_point: Vec<Vec<Vec<Check>>> = points
        .par_iter()
        .map(|&p| match Sample::simulate(channels, p) {
            Ok(s) => registry.iter().map(|eq| (eq.eval)(&s)).collect(),
            Err(_) => registry
                .iter()
                .map(|_| vec![Check::new(p, f64::NAN, f64::NAN)])
                .collect(),
        })
        .collect();

    let mut equations: Vec<EquationReport> = registry
        .iter()
        .map(|eq| EquationReport {
            id: eq.id,
            cases: 0,
            max_deviation: 0.0,
            worst_inputs: None,
        })
        .collect();
    for checks in &per_point {
        for (report, list) in equations.iter_mut().zip(checks) {
            for c in list {
                report.cases += 1;
                let d = c.deviation();
                if report.worst_inputs.is_none() || d > report.max_deviation {
                    report.max_deviation = d;
                    report.worst_inputs = Some(c.inputs);
                }
            }
        }
    }
    let pass = equations.iter().all(|e| e.max_deviation <= VERIFY_THRESHOLD);
    VerifyReport { pass, equations }
}

/// Every case of one equation, in point order.
pub fn equation_cases(eq: &Equation, channels: &Channels, points: &[CaseInputs]) -> Vec<EquationCase> {
    points
        .iter()
        .flat_map(|&p| match Sample::simulate(channels, p) {
            Ok(s) => (eq.eval)(&s),
            Err(_) => vec![Check::new(p, f64::NAN, f64::NAN)],
        })
        .map(|c| EquationCase {
            equation_id: eq.id,
            inputs: c.inputs,
            analytic: c.analytic,
            simulated: c.simulated,
            deviation: c.deviation(),
        })
        .collect()
}

/// The full registry on the seeded random set plus the structured grid.
pub fn verify_equations(seed: u64, n_random: usize, grid_n: usize) -> VerifyReport {
    verify_with(
        &registry(),
        &Channels::default(),
        &sample_points(seed, n_random, grid_n),
    )
}

/// Work cannot be extracted from the Gibbs state by an isentropic channel.
///
/// At both isentropic strengths of channels C and D the energy change must be
/// non-negative and equal to `S(out‖ρ⁽¹⁾)/β`.
pub fn verify_no_work_from_equilibrium(t: &ThermalSpec) -> bool {
    let inputs = CaseInputs {
        a: 0.5,
        b: 0.5,
        theta: 0.0,
        beta_eps: t.beta_eps,
        eps: t.eps,
        branch: None,
    };
    let Ok(s) = Sample::simulate(&Channels::default(), inputs) else {
        return false;
    };
    let beta = s.beta();
    s.equilibrium.iter().all(|e| {
        e.delta_u >= -1e-12
            && (e.delta_u - e.relative / beta).abs() <= VERIFY_THRESHOLD
            && e.delta_s.abs() <= ISENTROPIC_TOL
    })
}
