//! Thermal state, Hamiltonian, and the four generalized measurement channels.
//!
//! Channels `A` and `D` reset the qubit to `diag(1−x, x)`, channels `B` and
//! `C` to `diag(x, 1−x)`, whatever the input. `A`/`B` fuel the device; `C`/`D`
//! are tuned to act isentropically and carry work.

use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{relative_entropy, von_neumann_entropy, Cplx, DensityOp, Mat, DEFAULT_TOL};

/// Tolerance on `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Entropy changes at or below this many nats count as isentropic.
pub const ISENTROPIC_TOL: f64 = 1e-9;

/// Energy changes at or below this are treated as no exchange.
pub const ENERGY_TOL: f64 = 1e-12;

/// Inverse temperature and energy half-gap of the cold bath and qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalSpec {
    pub beta: f64,
    pub eps: f64,
    pub beta_eps: f64,
    pub tanh_be: f64,
    pub partition: f64,
}

impl ThermalSpec {
    pub fn new(beta: f64, eps: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("beta must be positive, got {beta}")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {eps}")));
        }
        let beta_eps = beta * eps;
        let tanh_be = beta_eps.tanh();
        if !(tanh_be > 0.0 && tanh_be < 1.0) {
            return Err(Error::Config(format!(
                "beta*eps = {beta_eps} saturates tanh; the Gibbs state is not full rank"
            )));
        }
        Ok(Self {
            beta,
            eps,
            beta_eps,
            tanh_be,
            partition: 2.0 * beta_eps.cosh(),
        })
    }

    pub fn from_beta_eps(beta_eps: f64, eps: f64) -> Result<Self> {
        Self::new(beta_eps / eps, eps)
    }

    /// Ground and excited populations `½(1 ± tanh βε)`.
    pub fn populations(&self) -> (f64, f64) {
        (0.5 * (1.0 + self.tanh_be), 0.5 * (1.0 - self.tanh_be))
    }

    pub fn hamiltonian(&self) -> HamiltonianOp {
        HamiltonianOp::new(self.eps)
    }
}

/// `H = −ε σ_z`, ground state `|0⟩` at `−ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianOp {
    pub eps: f64,
    mat: Mat,
}

impl HamiltonianOp {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            mat: Mat::pauli_z().scale(-eps),
        }
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    /// `tr(H ρ)`
    pub fn energy(&self, rho: &DensityOp) -> f64 {
        // H is diagonal
        -self.eps * (rho.mat().get(0, 0).re - rho.mat().get(1, 1).re)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ChannelLabel {
    A,
    B,
    C,
    D,
    Switch,
    Other(String),
}

/// A CPTP map given by Kraus operators of equal dimension.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<Mat>,
    label: ChannelLabel,
}

impl KrausChannel {
    /// Validates dimensions and the completeness relation.
    pub fn new(label: ChannelLabel, ops: Vec<Mat>) -> Result<Self> {
        let dim = ops
            .first()
            .map(Mat::dim)
            .ok_or_else(|| Error::Config("channel needs at least one Kraus operator".into()))?;
        if let Some(bad) = ops.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        let channel = Self { dim, ops, label };
        let deviation = channel.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteChannel { deviation });
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            ops: vec![Mat::identity(dim)],
            label: ChannelLabel::Other("identity".into()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[Mat] {
        &self.ops
    }

    pub fn label(&self) -> &ChannelLabel {
        &self.label
    }

    /// `‖Σ K†K − I‖_max`
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = Mat::zeros(self.dim);
        for k in &self.ops {
            sum = sum
                .add(&k.adjoint().matmul(k).expect("Kraus dims checked"))
                .expect("Kraus dims checked");
        }
        sum.max_abs_diff(&Mat::identity(self.dim)).expect("same dim")
    }

    /// Kraus sum without revalidating the output.
    pub fn apply_mat(&self, rho: &Mat) -> Result<Mat> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rho.dim(),
            });
        }
        let mut out = Mat::zeros(self.dim);
        for k in &self.ops {
            out = out.add(&k.sandwich(rho)?)?;
        }
        Ok(out)
    }
}

fn sqrt_c(x: f64) -> Cplx {
    Cplx::new(x.sqrt(), 0.0)
}

/// Reset towards `|1⟩` with weight `x`; the shape shared by channels A and D.
fn excite_family(label: ChannelLabel, x: f64) -> Result<KrausChannel> {
    let (keep, flip) = (sqrt_c(1.0 - x), sqrt_c(x));
    KrausChannel::new(
        label,
        vec![
            scaled(Mat::basis(2, 0, 0), keep),
            scaled(Mat::basis(2, 0, 1), keep),
            scaled(Mat::basis(2, 1, 1), flip),
            scaled(Mat::basis(2, 1, 0), -flip),
        ],
    )
}

/// Reset towards `|0⟩` with weight `x`; the shape shared by channels B and C.
fn relax_family(label: ChannelLabel, x: f64) -> Result<KrausChannel> {
    let (keep, flip) = (sqrt_c(1.0 - x), sqrt_c(x));
    KrausChannel::new(
        label,
        vec![
            scaled(Mat::basis(2, 1, 1), keep),
            scaled(Mat::basis(2, 1, 0), keep),
            scaled(Mat::basis(2, 0, 0), flip),
            scaled(Mat::basis(2, 0, 1), -flip),
        ],
    )
}

fn scaled(m: Mat, z: Cplx) -> Mat {
    let data = m.entries().iter().map(|&e| e * z).collect();
    Mat::from_rows(m.dim(), data).expect("finite")
}

/// Fueling meter A: output `diag(1−a, a)`.
pub fn kraus_meter_a(a: f64) -> Result<KrausChannel> {
    check_unit_interval("a", a)?;
    excite_family(ChannelLabel::A, a)
}

/// Fueling meter B: output `diag(b, 1−b)`.
pub fn kraus_meter_b(b: f64) -> Result<KrausChannel> {
    check_unit_interval("b", b)?;
    relax_family(ChannelLabel::B, b)
}

/// Work channel C, same shape as B.
pub fn kraus_work_c(w: f64) -> Result<KrausChannel> {
    check_unit_interval("w", w)?;
    relax_family(ChannelLabel::C, w)
}

/// Work channel D, same shape as A.
pub fn kraus_work_d(d: f64) -> Result<KrausChannel> {
    check_unit_interval("d", d)?;
    excite_family(ChannelLabel::D, d)
}

pub fn gibbs_state(t: &ThermalSpec) -> DensityOp {
    let (p0, p1) = t.populations();
    DensityOp::from_populations(&[p0, p1]).expect("Gibbs populations are valid")
}

/// Applies the channel and revalidates the result as a density operator.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityOp) -> Result<DensityOp> {
    DensityOp::new(ch.apply_mat(rho.mat())?, DEFAULT_TOL)
}

/// How the energy of a stroke is exchanged with its meter or bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExchangeKind {
    Work,
    Heat,
    None,
}

impl ExchangeKind {
    pub fn classify(delta_u: f64, delta_s: f64) -> Self {
        if delta_s.abs() > ISENTROPIC_TOL {
            Self::Heat
        } else if delta_u.abs() > ENERGY_TOL {
            Self::Work
        } else {
            Self::None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrokeRecord {
    pub label: String,
    pub delta_u: f64,
    pub delta_s: f64,
    pub exchange_kind: ExchangeKind,
}

pub fn stroke_record(
    h: &HamiltonianOp,
    before: &DensityOp,
    after: &DensityOp,
    label: impl Into<String>,
) -> Result<StrokeRecord> {
    let delta_u = h.energy(after) - h.energy(before);
    let delta_s = von_neumann_entropy(after)? - von_neumann_entropy(before)?;
    Ok(StrokeRecord {
        label: label.into(),
        delta_u,
        delta_s,
        exchange_kind: ExchangeKind::classify(delta_u, delta_s),
    })
}

/// Parameters `(½(1 − tanh βε), ½(1 + tanh βε))` at which channel A leaves the
/// Gibbs entropy unchanged.
pub fn isentropic_points_a(t: &ThermalSpec) -> (f64, f64) {
    let (p0, p1) = t.populations();
    (p1, p0)
}

/// `S(ρ‖ρ_th)` against the Gibbs state of `t`.
pub fn relative_entropy_to_gibbs(rho: &DensityOp, t: &ThermalSpec) -> Result<f64> {
    relative_entropy(rho, &gibbs_state(t))
}
