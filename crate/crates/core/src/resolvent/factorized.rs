use super::grid::{block_diagonal, FreeResolvent};
use crate::error::Result;
use crate::model::PeriodicHamiltonian;
use crate::numerics::{hermitian_eig, Complex64, ComplexMatrix, Lu};

/// Eigenvalues of `V(t_j)` below this magnitude count as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-13;

/// `V(t_j) = B(t_j) A(t_j)` with `A = |V|^{1/2}` and `B = |V|^{1/2} sgn V` at every grid point.
#[derive(Clone, Debug)]
pub struct FactorizedPotential {
    pub n_t: usize,
    pub fiber_dim: usize,
    pub v: Vec<ComplexMatrix>,
    pub a: Vec<ComplexMatrix>,
    pub b: Vec<ComplexMatrix>,
}

impl FactorizedPotential {
    pub fn new(h: &PeriodicHamiltonian, n_t: usize) -> Result<Self> {
        let mut v = Vec::with_capacity(n_t);
        let mut a = Vec::with_capacity(n_t);
        let mut b = Vec::with_capacity(n_t);
        for j in 0..n_t {
            let vj = h.potential(j as f64 / n_t as f64);
            let eig = hermitian_eig(&vj)?;
            a.push(eig.reconstruct_with(|mu| {
                let m = if mu.re.abs() < ZERO_EIGENVALUE {
                    0.0
                } else {
                    mu.re.abs().sqrt()
                };
                Complex64::new(m, 0.0)
            }));
            b.push(eig.reconstruct_with(|mu| {
                let m = if mu.re.abs() < ZERO_EIGENVALUE {
                    0.0
                } else {
                    mu.re.abs().sqrt() * mu.re.signum()
                };
                Complex64::new(m, 0.0)
            }));
            v.push(vj);
        }
        Ok(Self {
            n_t,
            fiber_dim: h.dim(),
            v,
            a,
            b,
        })
    }

    /// `max_j max |B_j A_j - V_j|`.
    pub fn factorization_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .zip(&self.v)
            .map(|((a, b), v)| b.matmul(a).max_abs_diff(v))
            .fold(0.0, f64::max)
    }

    /// `max_j | ||A_j||^2 - ||V_j|| |` in the spectral norm.
    pub fn norm_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.v)
            .map(|(a, v)| (a.spectral_norm().powi(2) - v.spectral_norm()).abs())
            .fold(0.0, f64::max)
    }

    pub fn a_matrix(&self) -> ComplexMatrix {
        block_diagonal(&self.a)
    }

    pub fn b_matrix(&self) -> ComplexMatrix {
        block_diagonal(&self.b)
    }

    pub fn v_matrix(&self) -> ComplexMatrix {
        block_diagonal(&self.v)
    }

    /// `D M` for block-diagonal `D` given by per-sample blocks.
    fn left_multiply(blocks: &[ComplexMatrix], m: &ComplexMatrix) -> ComplexMatrix {
        let d = blocks[0].rows();
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for (j, blk) in blocks.iter().enumerate() {
            let rows = m.submatrix(j * d, 0, d, m.cols());
            out.set_block(j * d, 0, &blk.matmul(&rows));
        }
        out
    }

    /// `M D` for block-diagonal `D`.
    fn right_multiply(m: &ComplexMatrix, blocks: &[ComplexMatrix]) -> ComplexMatrix {
        let d = blocks[0].rows();
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for (j, blk) in blocks.iter().enumerate() {
            let cols = m.submatrix(0, j * d, m.rows(), d);
            out.set_block(0, j * d, &cols.matmul(blk));
        }
        out
    }
}

/// `Q(lambda) = A R0(lambda) B` on the grid space.
#[derive(Clone, Debug)]
pub struct FactorizedQ {
    pub lambda: Complex64,
    pub matrix: ComplexMatrix,
    /// Frobenius norm of the grid matrix; approximates the Hilbert-Schmidt norm.
    pub schmidt_norm: f64,
}

pub fn q_factorized(h: &PeriodicHamiltonian, lambda: Complex64, n_t: usize) -> Result<FactorizedQ> {
    let r0 = FreeResolvent::new(h.h0(), lambda, n_t)?.matrix();
    let fp = FactorizedPotential::new(h, n_t)?;
    Ok(q_from_parts(&fp, &r0, lambda))
}

fn q_from_parts(fp: &FactorizedPotential, r0: &ComplexMatrix, lambda: Complex64) -> FactorizedQ {
    let matrix = FactorizedPotential::right_multiply(&FactorizedPotential::left_multiply(&fp.a, r0), &fp.b);
    FactorizedQ {
        lambda,
        schmidt_norm: matrix.frobenius_norm(),
        matrix,
    }
}

/// `R(lambda) = R0(lambda) - [B R0(conj lambda)]^dag [I + Q(lambda)]^{-1} A R0(lambda)`.
#[derive(Clone, Debug)]
pub struct FullResolvent {
    pub lambda: Complex64,
    pub matrix: ComplexMatrix,
    pub r0: ComplexMatrix,
    pub q: FactorizedQ,
    /// Condition estimate of `I + Q(lambda)`.
    pub condition: f64,
    pub potential: FactorizedPotential,
}

impl FullResolvent {
    /// `max |R - R0 + R0 V R|`.
    pub fn resolvent_identity_defect(&self) -> f64 {
        let v = self.potential.v_matrix();
        let mut lhs = &self.matrix - &self.r0;
        lhs += &self.r0.matmul(&v.matmul(&self.matrix));
        lhs.max_abs()
    }
}

pub fn full_resolvent(h: &PeriodicHamiltonian, lambda: Complex64, n_t: usize) -> Result<FullResolvent> {
    let r0 = FreeResolvent::new(h.h0(), lambda, n_t)?.matrix();
    let r0_bar = FreeResolvent::new(h.h0(), lambda.conj(), n_t)?.matrix();
    let fp = FactorizedPotential::new(h, n_t)?;
    let q = q_from_parts(&fp, &r0, lambda);
    let mut i_plus_q = q.matrix.clone();
    for k in 0..i_plus_q.rows() {
        i_plus_q[(k, k)] += Complex64::new(1.0, 0.0);
    }
    let lu = Lu::factor(&i_plus_q)?;
    let a_r0 = FactorizedPotential::left_multiply(&fp.a, &r0);
    let b_r0_bar = FactorizedPotential::left_multiply(&fp.b, &r0_bar);
    let correction = b_r0_bar.adjoint().matmul(&lu.solve_matrix(&a_r0));
    Ok(FullResolvent {
        lambda,
        matrix: &r0 - &correction,
        condition: lu.condition_estimate(),
        r0,
        q,
        potential: fp,
    })
}
