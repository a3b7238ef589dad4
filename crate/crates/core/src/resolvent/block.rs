use std::f64::consts::TAU;

use super::factorized::FactorizedPotential;
use super::grid::{to_mode_space, FreeResolvent};
use crate::error::{Error, Result};
use crate::model::PeriodicHamiltonian;
use crate::numerics::{hermitian_eig, Complex64, ComplexMatrix, EigenDecomposition};

/// `(Q(zeta) x)_n = sum_k V_{n-k} (H0 + 2 pi k - zeta)^{-1} x_k` on modes `|n| <= N`.
#[derive(Clone, Debug)]
pub struct BlockQ {
    pub zeta: Complex64,
    pub n_modes: usize,
    pub fiber_dim: usize,
    pub matrix: ComplexMatrix,
}

impl BlockQ {
    /// Operator 2-norm.
    pub fn norm(&self) -> f64 {
        self.matrix.spectral_norm()
    }
}

/// `(H0 + 2 pi k - zeta)^{-1}` restricted to the `rows x cols` index sets.
pub(crate) fn free_block(
    eig: &EigenDecomposition,
    k: i64,
    zeta: Complex64,
    rows: &[usize],
    cols: &[usize],
) -> ComplexMatrix {
    let inv: Vec<Complex64> = eig
        .values
        .iter()
        .map(|mu| 1.0 / (Complex64::new(mu.re + TAU * k as f64, 0.0) - zeta))
        .collect();
    ComplexMatrix::from_fn(rows.len(), cols.len(), |a, b| {
        let (r, c) = (rows[a], cols[b]);
        (0..inv.len())
            .map(|m| eig.vectors[(r, m)] * inv[m] * eig.vectors[(c, m)].conj())
            .sum()
    })
}

/// `Q(zeta)` compressed to fiber indices `support` in every mode block.
pub(crate) fn block_q_on(
    h: &PeriodicHamiltonian,
    eig: &EigenDecomposition,
    zeta: Complex64,
    n_modes: usize,
    support: &[usize],
) -> ComplexMatrix {
    let s = support.len();
    let nb = 2 * n_modes + 1;
    let nm = n_modes as i64;
    let mut q = ComplexMatrix::zeros(nb * s, nb * s);
    let modes: Vec<(i64, ComplexMatrix)> = h.modes().map(|(n, m)| (n, m.select(support, support))).collect();
    let r0: Vec<ComplexMatrix> = (-nm..=nm).map(|k| free_block(eig, k, zeta, support, support)).collect();
    for bk in 0..nb {
        let k = bk as i64 - nm;
        for (j, vj) in &modes {
            let n = k + j;
            if n.abs() <= nm {
                q.set_block((n + nm) as usize * s, bk * s, &vj.matmul(&r0[bk]));
            }
        }
    }
    q
}

pub fn block_q(h: &PeriodicHamiltonian, zeta: Complex64, n_modes: usize) -> Result<BlockQ> {
    if zeta.im == 0.0 {
        return Err(Error::RealSpectralParameter {
            re: zeta.re,
            im: zeta.im,
        });
    }
    let support = h.mode_support();
    if n_modes < support {
        return Err(Error::TruncationTooSmall {
            cutoff: n_modes,
            support,
        });
    }
    let eig = hermitian_eig(h.h0())?;
    let all: Vec<usize> = (0..h.dim()).collect();
    Ok(BlockQ {
        zeta,
        n_modes,
        fiber_dim: h.dim(),
        matrix: block_q_on(h, &eig, zeta, n_modes, &all),
    })
}

/// Grid operator `V R0(zeta) = B A R0(zeta)` conjugated into mode space on `|n| <= n_modes`.
pub fn grid_block_q(h: &PeriodicHamiltonian, zeta: Complex64, n_t: usize, n_modes: usize) -> Result<ComplexMatrix> {
    if 2 * n_modes + 1 > n_t {
        return Err(Error::InvalidGrid(format!(
            "{n_t} samples cannot hold {} modes",
            2 * n_modes + 1
        )));
    }
    let r0 = FreeResolvent::new(h.h0(), zeta, n_t)?.matrix();
    let fp = FactorizedPotential::new(h, n_t)?;
    let grid = fp.b_matrix().matmul(&fp.a_matrix().matmul(&r0));
    Ok(to_mode_space(&grid, n_t, h.dim(), n_modes))
}
