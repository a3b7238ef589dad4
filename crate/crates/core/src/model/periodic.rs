use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::numerics::{Complex64, ComplexMatrix, HERMITIAN_TOL};

/// `H(t) = H0 + sum_n H_n exp(2 pi i n t)`, period 1, on a `dim`-dimensional fiber.
///
/// Modes are stored for both signs of `n` and satisfy `H_{-n} = H_n^dag`.
/// The `n = 0` entry, when present, is the static part of the interaction;
/// `h0` is the free Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicHamiltonian {
    dim: usize,
    h0: ComplexMatrix,
    modes: BTreeMap<i64, ComplexMatrix>,
    label: String,
}

impl PeriodicHamiltonian {
    /// Validates shapes, hermiticity of `h0` and the mode symmetry.
    pub fn new(
        h0: ComplexMatrix,
        modes: impl IntoIterator<Item = (i64, ComplexMatrix)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let dim = h0.ensure_square()?;
        h0.check_hermitian()
            .map_err(|e| Error::InvalidModel(format!("H0: {e}")))?;
        let mut map = BTreeMap::new();
        for (n, m) in modes {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvalidModel(format!(
                    "mode {n} has shape {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            if map.insert(n, m).is_some() {
                return Err(Error::InvalidModel(format!("mode {n} given twice")));
            }
        }
        let scale = map
            .values()
            .map(ComplexMatrix::max_abs)
            .fold(h0.max_abs(), f64::max)
            .max(1.0);
        for (&n, m) in &map {
            let partner = map
                .get(&-n)
                .ok_or_else(|| Error::InvalidModel(format!("mode {n} present but mode {} missing", -n)))?;
            let defect = m.max_abs_diff(&partner.adjoint());
            if defect > HERMITIAN_TOL * scale {
                return Err(Error::InvalidModel(format!(
                    "H_{} != H_{n}^dag (defect {defect:.3e})",
                    -n
                )));
            }
        }
        map.retain(|_, m| m.max_abs() > 0.0);
        Ok(Self {
            dim,
            h0,
            modes: map,
            label: label.into(),
        })
    }

    /// Builds from the non-negative modes only; `H_{-n}` is set to `H_n^dag`.
    /// The `n = 0` entry must be Hermitian.
    pub fn from_harmonics(
        h0: ComplexMatrix,
        harmonics: impl IntoIterator<Item = (u32, ComplexMatrix)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut all = Vec::new();
        for (n, m) in harmonics {
            if n == 0 {
                all.push((0, m));
            } else {
                all.push((-(n as i64), m.adjoint()));
                all.push((n as i64, m));
            }
        }
        Self::new(h0, all, label)
    }

    /// Time-independent Hamiltonian with no interaction modes.
    pub fn constant(h: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        Self::new(h, std::iter::empty(), label)
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(ComplexMatrix::zeros(dim, dim), "zero").expect("zero matrix is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Nonzero interaction modes, ordered by `n`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, &ComplexMatrix)> {
        self.modes.iter().map(|(&n, m)| (n, m))
    }

    /// Interaction mode `V_n` (the free part excluded).
    pub fn mode(&self, n: i64) -> Option<&ComplexMatrix> {
        self.modes.get(&n)
    }

    /// Fourier coefficient of the full `H(t)`: `H0 + V_0` for `n = 0`, `V_n` otherwise.
    pub fn full_mode(&self, n: i64) -> ComplexMatrix {
        let mut m = self
            .modes
            .get(&n)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.dim, self.dim));
        if n == 0 {
            m += &self.h0;
        }
        m
    }

    /// Largest `|n|` with a nonzero mode (0 when there are none).
    pub fn mode_support(&self) -> usize {
        self.modes.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// True when every interaction mode vanishes.
    pub fn is_free(&self) -> bool {
        self.modes.is_empty()
    }

    fn raw_potential(&self, t: f64) -> ComplexMatrix {
        let phase = t.rem_euclid(1.0);
        let mut v = match self.modes.get(&0) {
            Some(m) => m.clone(),
            None => ComplexMatrix::zeros(self.dim, self.dim),
        };
        for (&n, m) in self.modes.range(1..) {
            let z = Complex64::from_polar(1.0, TAU * n as f64 * phase);
            let term = m.scale(z);
            v += &term;
            v += &term.adjoint();
        }
        v
    }

    /// `V(t) = H(t) - H0`, exactly Hermitian.
    pub fn potential(&self, t: f64) -> ComplexMatrix {
        self.raw_potential(t).hermitian_part()
    }

    /// `H(t) = H0 + V(t)`, exactly Hermitian. The time is reduced modulo the
    /// period before any phase is formed, so `H(t + 1)` and `H(t)` coincide
    /// whenever `t + 1` represents `t` exactly.
    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        let mut h = self.raw_potential(t);
        h += &self.h0;
        h.hermitian_part()
    }

    /// Same Hamiltonian with the interaction scaled by `s`.
    pub fn scaled_interaction(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            h0: self.h0.clone(),
            modes: self
                .modes
                .iter()
                .map(|(&n, m)| (n, m.scale_real(s)))
                .filter(|(_, m)| m.max_abs() > 0.0)
                .collect(),
            label: self.label.clone(),
        }
    }

    /// Row/column indices touched by any interaction mode.
    pub fn interaction_support(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| {
                self.modes.values().any(|m| {
                    (0..self.dim)
                        .any(|j| m[(i, j)] != Complex64::new(0.0, 0.0) || m[(j, i)] != Complex64::new(0.0, 0.0))
                })
            })
            .collect()
    }
}

/// Default number of time samples for mode cutoff `m`.
pub fn default_time_grid(m: usize) -> usize {
    8 * m + 8
}

/// Uniform grid `t_j = j / n`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

/// Recovers `H_n = (1/N_t) sum_j exp(-2 pi i n t_j) H(t_j)` for `|n| <= cutoff`
/// from samples on the uniform grid `t_j = j / N_t`.
///
/// The mean becomes `H0` of the result; the other coefficients become its
/// interaction modes.
pub fn fourier_modes(samples: &[(f64, ComplexMatrix)], cutoff: usize) -> Result<PeriodicHamiltonian> {
    let nt = samples.len();
    if nt < 4 * cutoff + 2 {
        return Err(Error::InvalidGrid(format!(
            "{nt} samples cannot resolve mode cutoff {cutoff}; need at least {}",
            4 * cutoff + 2
        )));
    }
    for (j, (t, _)) in samples.iter().enumerate() {
        let expected = j as f64 / nt as f64;
        if (t - expected).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!(
                "sample {j} at t = {t}, expected uniform grid point {expected}"
            )));
        }
    }
    let dim = samples[0].1.ensure_square()?;
    for (t, h) in samples {
        if h.rows() != dim || h.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "sample at t = {t} has a different shape"
            )));
        }
        h.check_hermitian()?;
    }
    let coefficient = |n: i64| -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (j, (_, h)) in samples.iter().enumerate() {
            // Phase from the exact grid index keeps the sum free of t rounding.
            let k = (n * j as i64).rem_euclid(nt as i64);
            let z = Complex64::from_polar(1.0, -TAU * k as f64 / nt as f64);
            acc.axpy(z, h);
        }
        acc.scale_real(1.0 / nt as f64)
    };
    let mean = coefficient(0).hermitian_part();
    let harmonics = (1..=cutoff as u32).map(|n| (n, coefficient(n as i64)));
    PeriodicHamiltonian::from_harmonics(mean, harmonics, "fourier")
}
