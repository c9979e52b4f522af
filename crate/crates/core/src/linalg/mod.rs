//! Dense complex matrices for qubit and qubit⊗controller operators.
//!
//! Everything here is at most 4×4, so storage is a flat row-major `Vec`
//! and every operation allocates a fresh result.

mod eigen;
mod entropy;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, MAX_SWEEPS};
pub use entropy::{binary_entropy, relative_entropy, von_neumann_entropy};

use num_complex::Complex64;

use crate::error::{DensityViolation, Error, Result};

pub type Cplx = Complex64;

/// Default tolerance used when validating simulated states.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    dim: usize,
    data: Vec<Cplx>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Cplx::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Cplx::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<Cplx>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Config("matrix entries must be finite".into()));
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(dim, data.iter().map(|&x| Cplx::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * dim + i] = Cplx::new(v, 0.0);
        }
        m
    }

    /// Basis operator `|i⟩⟨j|`.
    pub fn basis(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.data[i * dim + j] = Cplx::new(1.0, 0.0);
        m
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn outer(ket: &[Cplx]) -> Self {
        let dim = ket.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = ket[i] * ket[j].conj();
            }
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::diag(&[0.0, 0.0])
            .with(0, 1, Cplx::new(1.0, 0.0))
            .with(1, 0, Cplx::new(1.0, 0.0))
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    fn with(mut self, i: usize, j: usize, z: Cplx) -> Self {
        self.data[i * self.dim + j] = z;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Cplx] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cplx {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Cplx) {
        self.data[i * self.dim + j] = z;
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat) -> Result<Self> {
        self.check_dim(rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let lhs = self.data[i * n + k];
                if lhs.re == 0.0 && lhs.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += lhs * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// `self ⊗ rhs` with `self` as the slow (system) index.
    pub fn kron(&self, rhs: &Mat) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let s = self.data[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + j * m + l] = s * rhs.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Cplx {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Traces out the fast (controller) qubit of a system⊗controller operator.
    pub fn partial_trace_controller(&self) -> Result<Self> {
        if self.dim != 4 {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: 4,
            });
        }
        let mut out = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let z = (0..2).map(|k| self.get(2 * i + k, 2 * j + k)).sum();
                out.set(i, j, z);
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Mat) -> Result<Self> {
        self.zip(rhs, |x, y| x + y)
    }

    pub fn sub(&self, rhs: &Mat) -> Result<Self> {
        self.zip(rhs, |x, y| x - y)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Mat) -> Result<f64> {
        self.check_dim(rhs)?;
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// `‖m − m†‖_max`
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// `K ρ K†`
    pub fn sandwich(&self, rho: &Mat) -> Result<Self> {
        self.matmul(rho)?.matmul(&self.adjoint())
    }

    fn zip(&self, rhs: &Mat, f: impl Fn(Cplx, Cplx) -> Cplx) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&x, &y)| f(x, y)).collect(),
        })
    }

    fn check_dim(&self, rhs: &Mat) -> Result<()> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            })
        }
    }
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite
/// up to `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    mat: Mat,
    tol: f64,
}

impl DensityOp {
    pub fn new(mat: Mat, tol: f64) -> Result<Self> {
        validate_density(mat, tol)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: Mat::identity(dim).scale(1.0 / dim as f64),
            tol: DEFAULT_TOL,
        }
    }

    /// Pure state from a normalized ket.
    pub fn pure(ket: &[Cplx]) -> Result<Self> {
        validate_density(Mat::outer(ket), DEFAULT_TOL)
    }

    /// Diagonal state from populations.
    pub fn from_populations(p: &[f64]) -> Result<Self> {
        validate_density(Mat::diag(p), DEFAULT_TOL)
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal()
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }
}

/// Checks the three density-operator invariants in order and names the first
/// one that fails.
pub fn validate_density(mat: Mat, tol: f64) -> Result<DensityOp> {
    let herm = mat.hermiticity_deviation();
    if herm.is_nan() || herm > tol {
        return Err(Error::InvalidDensity {
            violation: DensityViolation::Hermiticity,
            deviation: herm,
        });
    }
    let trace_dev = (mat.trace() - Cplx::new(1.0, 0.0)).norm();
    if trace_dev.is_nan() || trace_dev > tol {
        return Err(Error::InvalidDensity {
            violation: DensityViolation::Trace,
            deviation: trace_dev,
        });
    }
    let symmetric = mat.add(&mat.adjoint())?.scale(0.5);
    let min_eig = hermitian_eigenvalues(&symmetric)?[0];
    if min_eig < -tol {
        return Err(Error::InvalidDensity {
            violation: DensityViolation::Positivity,
            deviation: -min_eig,
        });
    }
    Ok(DensityOp { mat, tol })
}
