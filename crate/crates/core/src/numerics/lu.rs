use num_complex::Complex64;

use super::matrix::{vec_norm, ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Pivots below `SINGULAR_REL * max row norm` are treated as zero.
pub const SINGULAR_REL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
    a_one_norm: f64,
}

/// Solution of `A x = b` with a 1-norm condition estimate of `A`.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub x: Vec<Complex64>,
    pub condition: f64,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.ensure_square()?;
        let threshold = SINGULAR_REL * a.max_row_norm();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= threshold {
                return Err(Error::Singular { pivot: pmax, threshold });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                let (upper, lower) = lu.as_mut_slice().split_at_mut(i * n);
                let krow = &upper[k * n + k + 1..k * n + n];
                let irow = &mut lower[k + 1..n];
                for (x, &y) in irow.iter_mut().zip(krow) {
                    *x -= factor * y;
                }
            }
        }
        Ok(Self {
            n,
            lu,
            perm,
            a_one_norm: a.one_norm(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `A^dag x = b`.
    pub fn solve_adjoint_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        // A^dag = U^dag L^dag P, so solve U^dag y = b, L^dag z = y, x = P^T z.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu[(k, i)].conj() * y[k];
            }
            y[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.lu[(k, i)].conj() * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(b.rows(), self.n);
        let mut out = ComplexMatrix::zeros(self.n, b.cols());
        for j in 0..b.cols() {
            out.set_column(j, &self.solve_vec(&b.column(j)));
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve_matrix(&ComplexMatrix::identity(self.n))
    }

    /// Hager's estimate of `||A||_1 ||A^{-1}||_1`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            let y_norm: f64 = y.iter().map(|z| z.norm()).sum();
            if y_norm <= est {
                break;
            }
            est = y_norm;
            let xi: Vec<Complex64> = y
                .iter()
                .map(|z| if z.norm() > 0.0 { z / z.norm() } else { ONE })
                .collect();
            let z = self.solve_adjoint_vec(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let zx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= zx {
                break;
            }
            x = vec![ZERO; n];
            x[j] = ONE;
        }
        est * self.a_one_norm
    }
}

/// Solves `A x = b` by partial-pivot elimination.
pub fn solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<LinearSolution> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for a {}x{} system",
            b.len(),
            a.rows(),
            a.cols()
        )));
    }
    let lu = Lu::factor(a)?;
    let x = lu.solve_vec(b);
    Ok(LinearSolution {
        condition: lu.condition_estimate(),
        x,
    })
}

/// Dense inverse through [`Lu`].
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::factor(a)?.inverse())
}

/// `||A x - b||_2 / (||A|| ||x|| + ||b||)` with `||A||` the Frobenius norm.
pub fn relative_residual(a: &ComplexMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
    let r: Vec<Complex64> = a.mul_vec(x).iter().zip(b).map(|(p, q)| p - q).collect();
    vec_norm(&r) / (a.frobenius_norm() * vec_norm(x) + vec_norm(b)).max(f64::MIN_POSITIVE)
}
