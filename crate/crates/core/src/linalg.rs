//! Small dense Hermitian matrices: cyclic Jacobi eigenvalues and an LU
//! linear solve. Sizes here are at most a few dozen.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const HERMITIAN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validates conjugate symmetry to a relative `1e-12`.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        let scale = data.iter().fold(0.0_f64, |m, v| m.max(v.norm())).max(f64::MIN_POSITIVE);
        let mut defect = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((data[i * n + j] - data[j * n + i].conj()).norm());
            }
        }
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { n, data })
    }

    /// Build from the upper triangle, mirroring it exactly.
    pub fn from_upper(n: usize, mut entry: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(entry(i, i).re, 0.0);
            for j in i + 1..n {
                let v = entry(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v.conj();
            }
        }
        Self { n, data }
    }

    pub fn real(n: usize, rows: &[f64]) -> Result<Self> {
        Self::new(n, rows.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Rows and columns restricted to `keep`.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        Self::from_upper(keep.len(), |i, j| self.get(keep[i], keep[j]))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }
}

fn off_diagonal_sq(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s
}

/// All eigenvalues, ascending, by cyclic complex Jacobi rotations.
pub fn eigenvalues(m: &HermitianMatrix) -> Vec<f64> {
    let n = m.n;
    let mut a = m.data.clone();
    let total: f64 = a.iter().map(|v| v.norm_sqr()).sum();
    let tol = (1e-15 * total.sqrt()).powi(2);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(&a, n) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J_pp = J_qq = c, J_pq = s·e^{iφ}, J_qp = −s·e^{−iφ}; A ← Jᴴ A J
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * c;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c + aqk * jqp.conj();
                    a[q * n + k] = apk * jpq.conj() + aqk * c;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &HermitianMatrix) -> f64 {
    eigenvalues(m).first().copied().unwrap_or(f64::NAN)
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &HermitianMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.n;
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let m = DMatrix::from_row_slice(n, n, &a.data);
    m.lu()
        .solve(&DVector::from_column_slice(b))
        .map(|x| x.iter().copied().collect())
        .ok_or(Error::Singular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn examples() {
        let m = HermitianMatrix::real(2, &[1.0, 0.2, 0.2, 1.0]).unwrap();
        assert!((min_eigenvalue(&m) - 0.8).abs() < 1e-15);
        let mut id = vec![0.0; 16];
        for i in 0..4 {
            id[i * 5] = 1.0;
        }
        assert_eq!(min_eigenvalue(&HermitianMatrix::real(4, &id).unwrap()), 1.0);
        let e = (-std::f64::consts::PI / 2.0).exp();
        let m = HermitianMatrix::real(2, &[1.0, e, e, 1.0]).unwrap();
        assert!((min_eigenvalue(&m) - 0.792_120_423_649_238_1).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_complex_closed_form() {
        let (a, d, b) = (2.5, -0.7, c(0.3, -1.1));
        let m = HermitianMatrix::new(2, vec![c(a, 0.0), b, b.conj(), c(d, 0.0)]).unwrap();
        let closed = (a + d) / 2.0 - (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        assert!((min_eigenvalue(&m) - closed).abs() <= 1e-12 * closed.abs().max(1.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let r = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(0.5, 0.1), c(0.5, 0.1), c(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::NotHermitian(_))));
        assert!(HermitianMatrix::new(2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn solve_recovers_known_vector() {
        let m = HermitianMatrix::new(
            3,
            vec![
                c(4.0, 0.0),
                c(1.0, 1.0),
                c(0.0, -0.5),
                c(1.0, -1.0),
                c(3.0, 0.0),
                c(0.2, 0.0),
                c(0.0, 0.5),
                c(0.2, 0.0),
                c(2.0, 0.0),
            ],
        )
        .unwrap();
        let x = [c(1.0, -2.0), c(0.5, 0.25), c(-3.0, 1.0)];
        let b: Vec<Complex64> = (0..3).map(|i| (0..3).map(|j| m.get(i, j) * x[j]).sum()).collect();
        let got = solve(&m, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-13);
        }
        assert!(matches!(
            solve(&HermitianMatrix::real(2, &[0.0; 4]).unwrap(), &[c(1.0, 0.0); 2]),
            Err(Error::Singular)
        ));
    }

    proptest! {
        #[test]
        fn spectrum_preserves_invariants(entries in proptest::collection::vec(-1.0..1.0f64, 50)) {
            let n = 5;
            let m = HermitianMatrix::from_upper(n, |i, j| c(entries[i * n + j], if i == j { 0.0 } else { entries[j * n + i] }));
            let ev = eigenvalues(&m);
            let trace: f64 = ev.iter().sum();
            prop_assert!((trace - m.trace()).abs() < 1e-12);
            let frob: f64 = (0..n * n).map(|k| m.data[k].norm_sqr()).sum();
            let sq: f64 = ev.iter().map(|v| v * v).sum();
            prop_assert!((frob - sq).abs() < 1e-11);
            // the minimum is a lower bound for every Rayleigh quotient e_i
            for i in 0..n {
                prop_assert!(ev[0] <= m.get(i, i).re + 1e-12);
            }
        }

        #[test]
        fn jacobi_matches_reference_solver(entries in proptest::collection::vec(-1.0..1.0f64, 49)) {
            let n = 7;
            let m = HermitianMatrix::from_upper(n, |i, j| c(entries[i * n + j], if i == j { 0.0 } else { entries[j * n + i] }));
            let mut reference: Vec<f64> =
                DMatrix::from_row_slice(n, n, &m.data).symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            for (a, b) in eigenvalues(&m).iter().zip(&reference) {
                prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
            }
        }

        #[test]
        fn principal_submatrix_interlaces(entries in proptest::collection::vec(-1.0..1.0f64, 36)) {
            let n = 6;
            let m = HermitianMatrix::from_upper(n, |i, j| c(entries[i * n + j], if i == j { 0.0 } else { entries[j * n + i] }));
            let sub = m.principal_submatrix(&[0, 2, 3, 5]);
            prop_assert!(min_eigenvalue(&sub) >= min_eigenvalue(&m) - 1e-12);
        }
    }
}
