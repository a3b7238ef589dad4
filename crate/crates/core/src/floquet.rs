//! Truncated Floquet Hamiltonian on `2N + 1` Fourier modes and its relation to the monodromy.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PeriodicHamiltonian;
use crate::numerics::{hermitian_eig, vec_norm, Complex64, ComplexMatrix};
use crate::propagation::{fold, monodromy, Monodromy, PropagatorSchedule};

/// Share of eigenvector mass in the outermost blocks above which an eigenvalue
/// counts as a truncation-edge artifact.
pub const EDGE_MASS: f64 = 0.01;
/// Number of outermost blocks on each side checked by the edge policy.
pub const EDGE_BLOCKS: usize = 2;

/// `K = J + H0 + sum_k V_k S^k` on modes `n in [-N, N]`: block `(n, m)` is
/// `H_{n-m}` off the diagonal and `2 pi n + H0 + V_0` on it.
#[derive(Clone, Debug)]
pub struct FloquetMatrix {
    pub fiber_dim: usize,
    pub n_modes: usize,
    pub matrix: ComplexMatrix,
    pub source: PeriodicHamiltonian,
}

impl FloquetMatrix {
    pub fn size(&self) -> usize {
        (2 * self.n_modes + 1) * self.fiber_dim
    }

    /// Row offset of mode block `n`.
    pub fn block_offset(&self, n: i64) -> usize {
        (n + self.n_modes as i64) as usize * self.fiber_dim
    }

    /// Diagonal of `J`, `2 pi n` on every row of block `n`.
    pub fn j_diagonal(&self) -> Vec<f64> {
        let d = self.fiber_dim;
        (0..self.size())
            .map(|r| TAU * ((r / d) as i64 - self.n_modes as i64) as f64)
            .collect()
    }

    /// Truncated mode shift `(S x)_n = x_{n-1}`.
    pub fn shift(&self) -> ComplexMatrix {
        let d = self.fiber_dim;
        let mut s = ComplexMatrix::zeros(self.size(), self.size());
        for r in d..self.size() {
            s[(r, r - d)] = Complex64::new(1.0, 0.0);
        }
        s
    }
}

pub fn build_floquet(h: &PeriodicHamiltonian, n_modes: usize) -> Result<FloquetMatrix> {
    let support = h.mode_support();
    if n_modes < support {
        return Err(Error::TruncationTooSmall {
            cutoff: n_modes,
            support,
        });
    }
    let d = h.dim();
    let nb = 2 * n_modes + 1;
    let mut k = ComplexMatrix::zeros(nb * d, nb * d);
    let nm = n_modes as i64;
    let blocks: Vec<(i64, ComplexMatrix)> = (-(support as i64)..=support as i64)
        .map(|j| (j, h.full_mode(j)))
        .collect();
    for bn in 0..nb {
        let n = bn as i64 - nm;
        for (j, block) in &blocks {
            let m = n - j;
            if m.abs() <= nm {
                k.set_block(bn * d, (m + nm) as usize * d, block);
            }
        }
        for i in 0..d {
            k[(bn * d + i, bn * d + i)] += Complex64::new(TAU * n as f64, 0.0);
        }
    }
    Ok(FloquetMatrix {
        fiber_dim: d,
        n_modes,
        matrix: k.hermitian_part(),
        source: h.clone(),
    })
}

/// Defects of the shift relations on the interior sub-block (rows `n >= -N + 1`,
/// columns `m <= N - 1`) where the truncated shift acts like the infinite one.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ShiftDefect {
    /// `max |K S - S K - 2 pi S|`.
    pub commutator: f64,
    /// `(sigma, max |e^{i J sigma} S e^{-i J sigma} - e^{2 pi i sigma} S|)`.
    pub group: Vec<(f64, f64)>,
}

impl ShiftDefect {
    pub fn max_group(&self) -> f64 {
        self.group.iter().map(|g| g.1).fold(0.0, f64::max)
    }
}

pub fn shift_commutation_defect(k: &FloquetMatrix) -> ShiftDefect {
    let s = k.shift();
    let mut lhs = &k.matrix.matmul(&s) - &s.matmul(&k.matrix);
    lhs.axpy(Complex64::new(-TAU, 0.0), &s);
    let d = k.fiber_dim;
    let size = k.size();
    let interior = |m: &ComplexMatrix| m.submatrix(d, 0, size - d, size - d).max_abs();
    let commutator = interior(&lhs);
    let j = k.j_diagonal();
    let group = [0.25, 0.5, 1.0]
        .iter()
        .map(|&sigma| {
            let left = ComplexMatrix::from_diagonal(
                &j.iter()
                    .map(|&x| Complex64::from_polar(1.0, x * sigma))
                    .collect::<Vec<_>>(),
            );
            let right = ComplexMatrix::from_diagonal(
                &j.iter()
                    .map(|&x| Complex64::from_polar(1.0, -x * sigma))
                    .collect::<Vec<_>>(),
            );
            let mut diff = left.matmul(&s).matmul(&right);
            diff.axpy(-Complex64::from_polar(1.0, TAU * sigma), &s);
            (sigma, interior(&diff))
        })
        .collect();
    ShiftDefect { commutator, group }
}

/// Eigen-data of a Floquet matrix.
#[derive(Clone, Debug)]
pub struct QuasiEnergySpectrum {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `values` folded into `[0, 2 pi)`.
    pub folded: Vec<f64>,
    /// Eigenvectors as columns, mode blocks stacked from `n = -N`.
    pub vectors: ComplexMatrix,
    /// Share of each eigenvector's mass in the outermost blocks.
    pub edge_mass: Vec<f64>,
    /// Central window `[center - pi, center + pi)`.
    pub window: (f64, f64),
    pub fiber_dim: usize,
    pub n_modes: usize,
}

impl QuasiEnergySpectrum {
    pub fn is_edge(&self, k: usize) -> bool {
        self.edge_mass[k] > EDGE_MASS
    }

    /// Indices of non-edge eigenvalues.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&k| !self.is_edge(k)).collect()
    }

    /// Indices of non-edge eigenvalues inside the central window.
    pub fn windowed(&self) -> Vec<usize> {
        let (lo, hi) = self.window;
        self.interior()
            .into_iter()
            .filter(|&k| self.values[k] >= lo && self.values[k] < hi)
            .collect()
    }

    /// Fiber vector of eigenvector `k` in mode block `n`.
    pub fn block(&self, k: usize, n: i64) -> Vec<Complex64> {
        let d = self.fiber_dim;
        let off = (n + self.n_modes as i64) as usize * d;
        (0..d).map(|i| self.vectors[(off + i, k)]).collect()
    }

    /// Periodic mode `phi(t) = sum_n x_n e^{2 pi i n t}` of eigenvector `k`.
    pub fn floquet_mode(&self, k: usize, t: f64) -> Vec<Complex64> {
        let nm = self.n_modes as i64;
        let mut phi = vec![Complex64::new(0.0, 0.0); self.fiber_dim];
        for n in -nm..=nm {
            let z = Complex64::from_polar(1.0, TAU * n as f64 * t);
            for (p, x) in phi.iter_mut().zip(self.block(k, n)) {
                *p += z * x;
            }
        }
        phi
    }
}

pub fn quasi_spectrum(k: &FloquetMatrix) -> Result<QuasiEnergySpectrum> {
    let eig = hermitian_eig(&k.matrix)?;
    let values = eig.real_values();
    let d = k.fiber_dim;
    let nb = 2 * k.n_modes + 1;
    let edge_blocks: Vec<usize> = (0..EDGE_BLOCKS.min(nb)).flat_map(|b| [b, nb - 1 - b]).collect();
    let edge_mass = (0..values.len())
        .map(|c| {
            let mut blocks = edge_blocks.clone();
            blocks.sort_unstable();
            blocks.dedup();
            blocks
                .iter()
                .flat_map(|&b| (0..d).map(move |i| b * d + i))
                .map(|r| eig.vectors[(r, c)].norm_sqr())
                .sum()
        })
        .collect();
    let center = (k.source.full_mode(0).trace().re) / d as f64;
    Ok(QuasiEnergySpectrum {
        folded: values.iter().map(|&v| fold(v)).collect(),
        values,
        vectors: eig.vectors,
        edge_mass,
        window: (center - PI, center + PI),
        fiber_dim: d,
        n_modes: k.n_modes,
    })
}

/// `min(|a - b| mod 2 pi, 2 pi - ...)`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let r = (a - b).rem_euclid(TAU);
    r.min(TAU - r)
}

/// Greedy nearest-first pairing of two phase lists on the circle.
/// Returns `(index in a, index in b, distance)` sorted by the index in `a`.
pub fn greedy_match(a: &[f64], b: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut pairs: Vec<(f64, usize, usize)> = a
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| b.iter().enumerate().map(move |(j, &y)| (circular_distance(x, y), i, j)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::new();
    for (dist, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j, dist));
        }
    }
    out.sort_by_key(|p| p.0);
    out
}

/// Floquet/monodromy correspondence at one truncation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CorrespondenceReport {
    pub n_modes: usize,
    /// Folded quasi-energies from the monodromy eigenphases.
    pub monodromy_quasi_energies: Vec<f64>,
    /// Folded windowed interior quasi-energies of the Floquet matrix.
    pub floquet_quasi_energies: Vec<f64>,
    /// Matching distance of each Floquet value to its monodromy partner.
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub edge_count: usize,
    /// `max ||Theta phi(0) - e^{-i lambda} phi(0)|| / ||phi(0)||` over windowed modes.
    pub mode_residual: f64,
    /// `max ||phi(1) - phi(0)|| / ||phi(0)||`.
    pub periodicity_defect: f64,
    /// Largest distance from `lambda + 2 pi` to the interior spectrum.
    pub translation_defect: f64,
}

/// Correspondence against an already computed monodromy.
pub fn correspondence_with(h: &PeriodicHamiltonian, n_modes: usize, m: &Monodromy) -> Result<CorrespondenceReport> {
    let k = build_floquet(h, n_modes)?;
    let spec = quasi_spectrum(&k)?;
    let windowed = spec.windowed();
    if windowed.len() < h.dim() {
        return Err(Error::WindowAtEdge(format!(
            "only {} of {} quasi-energies survive the edge filter at N = {n_modes}",
            windowed.len(),
            h.dim()
        )));
    }
    let floquet: Vec<f64> = windowed.iter().map(|&i| spec.folded[i]).collect();
    let theta = m.quasi_energies();
    let matches = greedy_match(&floquet, &theta);
    let distances: Vec<f64> = matches.iter().map(|p| p.2).collect();
    let max_distance = distances.iter().copied().fold(0.0, f64::max);

    let mut mode_residual: f64 = 0.0;
    let mut periodicity_defect: f64 = 0.0;
    for &i in &windowed {
        let phi0 = spec.floquet_mode(i, 0.0);
        let norm = vec_norm(&phi0).max(f64::MIN_POSITIVE);
        let lhs = m.theta.mul_vec(&phi0);
        let phase = Complex64::from_polar(1.0, -spec.values[i]);
        let r: Vec<Complex64> = lhs.iter().zip(&phi0).map(|(a, b)| a - phase * b).collect();
        mode_residual = mode_residual.max(vec_norm(&r) / norm);
        let phi1 = spec.floquet_mode(i, 1.0);
        let p: Vec<Complex64> = phi1.iter().zip(&phi0).map(|(a, b)| a - b).collect();
        periodicity_defect = periodicity_defect.max(vec_norm(&p) / norm);
    }
    Ok(CorrespondenceReport {
        n_modes,
        monodromy_quasi_energies: theta,
        floquet_quasi_energies: floquet,
        distances,
        max_distance,
        edge_count: (0..spec.values.len()).filter(|&i| spec.is_edge(i)).count(),
        mode_residual,
        periodicity_defect,
        translation_defect: translation_defect(&spec),
    })
}

pub fn correspondence_report(
    h: &PeriodicHamiltonian,
    n_modes: usize,
    sched: &PropagatorSchedule,
) -> Result<CorrespondenceReport> {
    let m = monodromy(h, sched.start, sched)?;
    correspondence_with(h, n_modes, &m)
}

/// Largest distance from `lambda + 2 pi`, `lambda` windowed, to the nearest interior eigenvalue.
pub fn translation_defect(spec: &QuasiEnergySpectrum) -> f64 {
    let interior: Vec<f64> = spec.interior().iter().map(|&i| spec.values[i]).collect();
    spec.windowed()
        .iter()
        .map(|&i| {
            let target = spec.values[i] + TAU;
            interior
                .iter()
                .map(|&v| (v - target).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `max ||(K - lambda - 2 pi) S x|| / ||x||` over windowed eigenpairs `(lambda, x)`.
pub fn block_shift_residual(k: &FloquetMatrix, spec: &QuasiEnergySpectrum) -> f64 {
    let s = k.shift();
    spec.windowed()
        .iter()
        .map(|&i| {
            let x = spec.vectors.column(i);
            let sx = s.mul_vec(&x);
            let ksx = k.matrix.mul_vec(&sx);
            let lam = spec.values[i] + TAU;
            let r: Vec<Complex64> = ksx.iter().zip(&sx).map(|(a, b)| a - lam * b).collect();
            vec_norm(&r) / vec_norm(&x)
        })
        .fold(0.0, f64::max)
}

/// True when no entry exceeds its predecessor, treating values below `floor` as equal.
pub fn is_monotone_decreasing(values: &[f64], floor: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor)
}
