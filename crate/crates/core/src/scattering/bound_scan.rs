use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::wave::Stroboscope;
use crate::error::Result;
use crate::floquet::{build_floquet, circular_distance, quasi_spectrum};
use crate::numerics::{vec_dot, Complex64};
use crate::propagation::fold;
use crate::resolvent::localized_floquet_values;

/// Share of eigenvector mass inside the widened window that flags a bound state.
pub const BOUND_MASS: f64 = 0.9;
/// Sites added on each side of the interaction window.
pub const BOUND_MARGIN: usize = 4;
/// Eigenphases closer than this are counted as one level.
pub const MULTIPLICITY_GAP: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundState {
    /// Folded quasi-energy in `[0, 2 pi)` with `Theta phi = e^{-i lambda} phi`.
    pub quasi_energy: f64,
    /// Mass of the eigenvector inside the widened window.
    pub localization: f64,
    /// Number of flagged eigenvectors sharing this level.
    pub multiplicity: usize,
    /// Index of the eigenvector in the monodromy eigendecomposition.
    pub index: usize,
    /// Distance to the nearest localized interior Floquet eigenvalue, once cross-checked.
    pub floquet_distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundStateScan {
    pub window: (usize, usize),
    pub states: Vec<BoundState>,
    /// Truncation used for the Floquet cross-check.
    pub floquet_modes: Option<usize>,
    /// Largest cross-check distance.
    pub max_floquet_distance: Option<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<Complex64>>,
}

impl BoundStateScan {
    pub fn quasi_energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.quasi_energy).collect()
    }

    /// `max |<b, psi>|` over flagged vectors `b` and the given states.
    pub fn max_overlap(&self, states: &[Vec<Complex64>]) -> f64 {
        self.vectors
            .iter()
            .flat_map(|b| states.iter().map(move |psi| vec_dot(b, psi).norm()))
            .fold(0.0, f64::max)
    }
}

/// Flags eigenvectors of `Theta` with at least `BOUND_MASS` of their weight within the
/// interaction window widened by `BOUND_MARGIN` sites. With `floquet_modes` set, each
/// flagged quasi-energy is compared with the localized interior eigenvalues of the
/// truncated Floquet matrix.
pub fn bound_state_scan(st: &Stroboscope, floquet_modes: Option<usize>) -> Result<BoundStateScan> {
    let window = st.model.widened_support(BOUND_MARGIN);
    let eig = &st.monodromy.eig;
    let quasi = st.monodromy.quasi_energies();
    let mut states = Vec::new();
    let mut vectors = Vec::new();
    for k in 0..eig.len() {
        let v = eig.vector(k);
        let mass: f64 = window.clone().map(|i| v[i].norm_sqr()).sum();
        if mass >= BOUND_MASS {
            states.push(BoundState {
                quasi_energy: quasi[k],
                localization: mass,
                multiplicity: 1,
                index: k,
                floquet_distance: None,
            });
            vectors.push(v);
        }
    }
    let levels: Vec<f64> = states.iter().map(|s| s.quasi_energy).collect();
    for s in &mut states {
        s.multiplicity = levels
            .iter()
            .filter(|&&q| circular_distance(q, s.quasi_energy) < MULTIPLICITY_GAP)
            .count();
    }
    let mut max_floquet_distance = None;
    if let Some(n) = floquet_modes {
        let spec = quasi_spectrum(&build_floquet(st.model.drive(), n)?)?;
        let region: Vec<usize> = window.clone().collect();
        let localized: Vec<f64> = localized_floquet_values(&spec, &region, BOUND_MASS)
            .into_iter()
            .map(|(v, _)| v)
            .collect();
        let mut worst: f64 = 0.0;
        for s in &mut states {
            let d = localized
                .iter()
                .map(|&v| circular_distance(fold(v), s.quasi_energy))
                .fold(f64::INFINITY, f64::min);
            s.floquet_distance = Some(d);
            worst = worst.max(d);
        }
        max_floquet_distance = Some(worst);
    }
    Ok(BoundStateScan {
        window: (window.start, window.end),
        states,
        floquet_modes,
        max_floquet_distance,
        vectors,
    })
}

/// Unfolded representative of `lambda` closest to `target` in `lambda + 2 pi Z`.
pub fn nearest_translate(lambda: f64, target: f64) -> f64 {
    lambda + TAU * ((target - lambda) / TAU).round()
}
