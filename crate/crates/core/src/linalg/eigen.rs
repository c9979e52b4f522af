use super::{Cplx, Mat};
use crate::error::{Error, Result};

/// Upper bound on cyclic sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

const HERMITIAN_TOL: f64 = 1e-10;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigenvalues in ascending order with eigenvectors stored as the matching
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl HermitianEigen {
    /// Column `k` as a ket.
    pub fn vector(&self, k: usize) -> Vec<Cplx> {
        (0..self.vectors.dim()).map(|i| self.vectors.get(i, k)).collect()
    }
}

pub fn hermitian_eigenvalues(m: &Mat) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then applies a real Givens rotation to annihilate it.
pub fn hermitian_eigen(m: &Mat) -> Result<HermitianEigen> {
    let deviation = m.hermiticity_deviation();
    if deviation.is_nan() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim();
    let mut a = m.clone();
    let mut v = Mat::identity(n);
    // Work on the exact Hermitian part so the diagonal stays real.
    for i in 0..n {
        a.set(i, i, Cplx::new(a.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let z = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, z);
            a.set(j, i, z.conj());
        }
    }
    let scale = m.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let threshold = OFF_DIAGONAL_TOL * scale;

    let mut sweeps = 0;
    loop {
        let off = max_off_diagonal(&a);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = Mat::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn max_off_diagonal(a: &Mat) -> f64 {
    let n = a.dim();
    let mut off: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            off = off.max(a.get(i, j).norm());
        }
    }
    off
}

fn rotate(a: &mut Mat, v: &mut Mat, p: usize, q: usize) {
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g; // e^{iφ}
    let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let jpp = Cplx::new(c, 0.0);
    let jpq = Cplx::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = a.dim();
    // A ← A J
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * jpp + akq * jqp);
        a.set(k, q, akp * jpq + akq * jqq);
    }
    // A ← J† A
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, jpp.conj() * apk + jqp.conj() * aqk);
        a.set(q, k, jpq.conj() * apk + jqq.conj() * aqk);
    }
    a.set(p, q, Cplx::new(0.0, 0.0));
    a.set(q, p, Cplx::new(0.0, 0.0));
    a.set(p, p, Cplx::new(a.get(p, p).re, 0.0));
    a.set(q, q, Cplx::new(a.get(q, q).re, 0.0));
    // V ← V J
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * jpp + vkq * jqp);
        v.set(k, q, vkp * jpq + vkq * jqq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        assert_eq!(hermitian_eigenvalues(&Mat::diag(&[0.7, 0.3])).unwrap(), vec![0.3, 0.7]);
    }

    #[test]
    fn pauli_x() {
        let vals = hermitian_eigenvalues(&Mat::pauli_x()).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15);
        assert!((vals[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_complex_pivot() {
        let y = Mat::from_rows(
            2,
            vec![
                Cplx::new(0.0, 0.0),
                Cplx::new(0.0, -1.0),
                Cplx::new(0.0, 1.0),
                Cplx::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let eig = hermitian_eigen(&y).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-15 && (eig.values[1] - 1.0).abs() < 1e-15);
        // Y v = λ v for each column
        for k in 0..2 {
            let vk = eig.vector(k);
            for i in 0..2 {
                let yv: Cplx = (0..2).map(|j| y.get(i, j) * vk[j]).sum();
                assert!((yv - vk[i] * eig.values[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn reconstructs_dense_4x4() {
        let mut m = Mat::zeros(4);
        let entries = [
            (0, 0, 0.4, 0.0),
            (1, 1, 0.1, 0.0),
            (2, 2, 0.3, 0.0),
            (3, 3, 0.2, 0.0),
            (0, 1, 0.05, 0.02),
            (0, 3, -0.03, 0.07),
            (1, 2, 0.01, -0.04),
            (2, 3, 0.06, 0.0),
        ];
        for &(i, j, re, im) in &entries {
            m.set(i, j, Cplx::new(re, im));
            m.set(j, i, Cplx::new(re, -im));
        }
        let eig = hermitian_eigen(&m).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = eig.values.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let lambda = Mat::diag(&eig.values);
        let rebuilt = eig
            .vectors
            .matmul(&lambda)
            .unwrap()
            .matmul(&eig.vectors.adjoint())
            .unwrap();
        assert!(rebuilt.max_abs_diff(&m).unwrap() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Mat::from_real(2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian { .. })));
    }
}
