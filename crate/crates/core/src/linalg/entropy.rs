//! Entropies in nats.

use super::{hermitian_eigen, hermitian_eigenvalues, DensityOp};
use crate::error::{Error, Result};

const CLIP: f64 = 1e-12;
const SUPPORT: f64 = 1e-12;

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `h(u) = −u ln u − (1−u) ln(1−u)`
pub fn binary_entropy(u: f64) -> Result<f64> {
    if !(-CLIP..=1.0 + CLIP).contains(&u) {
        return Err(Error::OutOfRange {
            name: "u",
            value: u,
            min: 0.0,
            max: 1.0,
        });
    }
    let u = u.clamp(0.0, 1.0);
    Ok(-xlnx(u) - xlnx(1.0 - u))
}

fn clipped_spectrum(rho: &DensityOp) -> Result<Vec<f64>> {
    hermitian_eigenvalues(rho.mat())?
        .into_iter()
        .map(|l| {
            if l >= 0.0 {
                Ok(l)
            } else if l >= -CLIP {
                Ok(0.0)
            } else {
                Err(Error::InvalidDensity {
                    violation: crate::error::DensityViolation::Positivity,
                    deviation: -l,
                })
            }
        })
        .collect()
}

/// `S(ρ) = −tr ρ ln ρ`
pub fn von_neumann_entropy(rho: &DensityOp) -> Result<f64> {
    Ok(-clipped_spectrum(rho)?.into_iter().map(xlnx).sum::<f64>())
}

/// Quantum relative entropy `S(ρ‖σ) = tr ρ (ln ρ − ln σ)`.
///
/// `ln σ` is taken in σ's eigenbasis, so only the diagonal of ρ in that basis
/// enters the cross term.
pub fn relative_entropy(rho: &DensityOp, sigma: &DensityOp) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let neg_entropy: f64 = clipped_spectrum(rho)?.into_iter().map(xlnx).sum();
    let eig = hermitian_eigen(sigma.mat())?;
    let n = rho.dim();
    let mut cross = 0.0;
    for (k, &mu) in eig.values.iter().enumerate() {
        let vk = eig.vector(k);
        // ⟨v_k|ρ|v_k⟩
        let mut weight = 0.0;
        for i in 0..n {
            for j in 0..n {
                weight += (vk[i].conj() * rho.mat().get(i, j) * vk[j]).re;
            }
        }
        if weight <= SUPPORT {
            continue;
        }
        if mu <= SUPPORT {
            return Err(Error::SupportMismatch { eigenvalue: mu });
        }
        cross += weight * mu.ln();
    }
    Ok(neg_entropy - cross)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Cplx, Mat};
    use std::f64::consts::LN_2;

    #[test]
    fn binary_entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert!((binary_entropy(0.2).unwrap() - 0.5004024235381879).abs() < 1e-15);
        assert_eq!(binary_entropy(1.0 + 5e-13).unwrap(), 0.0);
        assert!(binary_entropy(-1e-6).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn von_neumann_examples() {
        let ground = DensityOp::from_populations(&[1.0, 0.0]).unwrap();
        assert_eq!(von_neumann_entropy(&ground).unwrap(), 0.0);
        let mixed = DensityOp::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed).unwrap() - LN_2).abs() < 1e-15);
        let rho = DensityOp::from_populations(&[0.3, 0.7]).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - 0.6108643020548935).abs() < 1e-15);
        assert!((s - binary_entropy(0.3).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn von_neumann_of_coherent_pure_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityOp::pure(&[Cplx::new(s, 0.0), Cplx::new(0.0, s)]).unwrap();
        assert!(von_neumann_entropy(&plus).unwrap().abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityOp::from_populations(&[0.3, 0.7]).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-15);
        let ground = DensityOp::from_populations(&[1.0, 0.0]).unwrap();
        let mixed = DensityOp::maximally_mixed(2);
        assert!((relative_entropy(&ground, &mixed).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_support_error() {
        let ground = DensityOp::from_populations(&[1.0, 0.0]).unwrap();
        let excited = DensityOp::from_populations(&[0.0, 1.0]).unwrap();
        assert!(matches!(
            relative_entropy(&ground, &excited),
            Err(Error::SupportMismatch { .. })
        ));
        // σ rank-deficient but ρ inside its support is fine
        assert_eq!(relative_entropy(&ground, &ground).unwrap(), 0.0);
    }

    #[test]
    fn relative_entropy_non_commuting() {
        // ρ = |+⟩⟨+|, σ = diag(0.8, 0.2): S(ρ‖σ) = −½ ln 0.8 − ½ ln 0.2
        let rho = DensityOp::new(Mat::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap(), 1e-12).unwrap();
        let sigma = DensityOp::from_populations(&[0.8, 0.2]).unwrap();
        let expected = -0.5 * 0.8f64.ln() - 0.5 * 0.2f64.ln();
        assert!((relative_entropy(&rho, &sigma).unwrap() - expected).abs() < 1e-14);
    }
}
