use thiserror::Error;

/// Which density-operator invariant a matrix failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityViolation {
    Hermiticity,
    Trace,
    Positivity,
}

impl std::fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::Hermiticity => "hermiticity",
            Self::Trace => "unit trace",
            Self::Positivity => "positivity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid density operator: {violation} violated (deviation {deviation:e})")]
    InvalidDensity {
        violation: DensityViolation,
        deviation: f64,
    },

    #[error("relative entropy undefined: reference state has eigenvalue {eigenvalue:e} on the support of the state")]
    SupportMismatch { eigenvalue: f64 },

    #[error("Kraus operators are not complete (max deviation from identity {deviation:e})")]
    IncompleteChannel { deviation: f64 },

    #[error("post-selection probability {probability:e} is too small to condition on")]
    ZeroProbability { probability: f64 },

    #[error("parameter outside the operating interval: {0}")]
    OutsideMode(String),

    #[error("{quantity}: closed form {analytic} disagrees with simulation {simulated}")]
    ClosedFormMismatch {
        quantity: &'static str,
        analytic: f64,
        simulated: f64,
    },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}
