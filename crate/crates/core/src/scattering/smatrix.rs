use serde::{Deserialize, Serialize};

use super::wave::{Direction, Stroboscope, WaveOperatorIterates, MIN_TAIL};
use crate::error::{Error, Result};
use crate::numerics::{vec_dot, vec_norm, vec_sub, Complex64, ComplexMatrix};

/// `S = W+^(n_out) W-^(n_in)^dag` acting on the incoming `+` probes.
///
/// `W-^dag = lim Theta^n Theta0^{-n}` converges on an incoming packet as soon as the
/// backward free motion has carried it clear of the well, so it is evaluated at its
/// own convergence index `n_in` rather than at the outgoing horizon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteringMatrix {
    pub n_out: usize,
    pub n_in: usize,
    /// `in_gaps[j][m - 1] = ||W-^(m)^dag psi_j - W-^(m-1)^dag psi_j||`.
    pub in_gaps: Vec<Vec<f64>>,
    /// `<psi_i, S psi_j>` on the probe basis.
    pub matrix: ComplexMatrix,
    /// `max_j ||S^dag S psi_j - psi_j||`.
    pub unitarity_defect: f64,
    /// `max_j ||S psi_j - psi_j||`; zero without a potential.
    pub identity_defect: f64,
    /// `max_j ||S Theta0 psi_j - Theta0 S psi_j||` over converged probes.
    pub intertwining_defect: f64,
    /// Largest off-diagonal modulus of `matrix`.
    pub max_off_diagonal: f64,
    #[serde(skip)]
    pub images: Vec<Vec<Complex64>>,
}

/// Smallest `m` such that `gaps[m - MIN_TAIL..m]` are all below `tol`.
pub fn first_stable(gaps: &[f64], tol: f64) -> Option<usize> {
    let mut run = 0;
    for (k, &g) in gaps.iter().enumerate() {
        run = if g < tol { run + 1 } else { 0 };
        if run == MIN_TAIL {
            return Some(k + 1);
        }
    }
    None
}

impl Stroboscope {
    /// `W-^(n)^dag v = Theta^n Theta0^{-n} v`.
    pub fn w_minus_adjoint_apply(&self, v: &[Complex64], n: usize) -> Vec<Complex64> {
        self.apply_theta(&self.apply_free(v, -(n as f64)), n as i64)
    }

    /// `S v = Theta0^{-n_out} Theta^{n_out} Theta^{n_in} Theta0^{-n_in} v`.
    pub fn s_apply(&self, v: &[Complex64], n_out: usize, n_in: usize) -> Vec<Complex64> {
        self.iterate(Direction::Plus, &self.w_minus_adjoint_apply(v, n_in), n_out)
    }

    /// `S^dag v = Theta0^{n_in} Theta^{-n_in} Theta^{-n_out} Theta0^{n_out} v`.
    pub fn s_adjoint_apply(&self, v: &[Complex64], n_out: usize, n_in: usize) -> Vec<Complex64> {
        let w_plus_adj = self.apply_theta(&self.apply_free(v, n_out as f64), -(n_out as i64));
        self.iterate(Direction::Minus, &w_plus_adj, n_in)
    }
}

/// Assembles `S` on the probes of `w_plus`. `n_out` is the `+` horizon; `n_in` is
/// the first index that ends `MIN_TAIL` consecutive sub-tolerance `W-^dag` gaps on
/// every probe, searched up to the `-` horizon.
pub fn s_matrix(
    st: &Stroboscope,
    w_plus: &WaveOperatorIterates,
    w_minus: &WaveOperatorIterates,
) -> Result<ScatteringMatrix> {
    if w_plus.direction != Direction::Plus || w_minus.direction != Direction::Minus {
        return Err(Error::InvalidProbes("s_matrix needs a + run and a - run".into()));
    }
    if w_plus.probes.len() != w_minus.probes.len()
        || w_plus.probes.first().map(Vec::len) != w_minus.probes.first().map(Vec::len)
    {
        return Err(Error::InvalidProbes("probe sets of W+ and W- are inconsistent".into()));
    }
    let probes = &w_plus.probes;
    let p = probes.len();
    let n_out = w_plus.n_max;
    let in_gaps: Vec<Vec<f64>> = probes
        .iter()
        .map(|psi| {
            let mut prev = psi.clone();
            (1..=w_minus.n_max)
                .map(|m| {
                    let w = st.w_minus_adjoint_apply(psi, m);
                    let g = vec_norm(&vec_sub(&w, &prev));
                    prev = w;
                    g
                })
                .collect()
        })
        .collect();
    let n_in = in_gaps
        .iter()
        .map(|g| first_stable(g, w_minus.tolerance))
        .try_fold(0, |acc, c| c.map(|c| acc.max(c)))
        .ok_or_else(|| Error::NoConvergence("W-^dag does not stabilize on the incoming probes".into()))?;
    let images: Vec<Vec<Complex64>> = probes.iter().map(|psi| st.s_apply(psi, n_out, n_in)).collect();
    let matrix = ComplexMatrix::from_fn(p, p, |i, j| vec_dot(&probes[i], &images[j]));
    let mut unitarity: f64 = 0.0;
    let mut intertwining: f64 = 0.0;
    let mut identity: f64 = 0.0;
    for (j, psi) in probes.iter().enumerate() {
        identity = identity.max(vec_norm(&vec_sub(&images[j], psi)));
        let back = st.s_adjoint_apply(&images[j], n_out, n_in);
        unitarity = unitarity.max(vec_norm(&vec_sub(&back, psi)));
        if w_plus.is_converged(j) {
            let lhs = st.s_apply(&st.apply_free(psi, 1.0), n_out, n_in);
            let rhs = st.apply_free(&images[j], 1.0);
            intertwining = intertwining.max(vec_norm(&vec_sub(&lhs, &rhs)));
        }
    }
    let max_off_diagonal = (0..p)
        .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| matrix[(i, j)].norm())
        .fold(0.0, f64::max);
    Ok(ScatteringMatrix {
        n_out,
        n_in,
        in_gaps,
        matrix,
        unitarity_defect: unitarity,
        identity_defect: identity,
        intertwining_defect: intertwining,
        max_off_diagonal,
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_lattice, central_window};
    use crate::propagation::{Order, PropagatorSchedule};
    use crate::scattering::probes::{ProbeSet, ProbeSpec};
    use crate::scattering::wave::stroboscopic_wave_op;

    #[test]
    fn free_lattice_has_identity_s() {
        let lat = build_lattice(64, 1.0, 0.0, 0.0, central_window(64, 3)).unwrap();
        let st = Stroboscope::new(&lat, &PropagatorSchedule::new(16, Order::Fourth).unwrap()).unwrap();
        let probes = ProbeSet::incoming(&lat, &ProbeSpec::default()).unwrap();
        let n = probes.horizon();
        let wp = stroboscopic_wave_op(&st, Direction::Plus, &probes, n).unwrap();
        let wm = stroboscopic_wave_op(&st, Direction::Minus, &probes.time_reversed(), n).unwrap();
        let s = s_matrix(&st, &wp, &wm).unwrap();
        let gram = ComplexMatrix::from_fn(8, 8, |i, j| vec_dot(&wp.probes[i], &wp.probes[j]));
        assert!(s.matrix.max_abs_diff(&gram) < 1e-12);
        assert!(s.unitarity_defect < 1e-12);
        assert!(s.identity_defect < 1e-12);
        assert!(s.intertwining_defect < 1e-12);
    }

    #[test]
    fn first_stable_counts_consecutive_gaps() {
        assert_eq!(first_stable(&[1e-4, 1e-4, 1e-4, 1.0], 1e-3), Some(3));
        assert_eq!(first_stable(&[1.0, 1e-4, 1e-4, 1.0, 1e-4, 1e-4, 1e-4], 1e-3), Some(7));
        assert_eq!(first_stable(&[1e-4, 1e-4], 1e-3), None);
    }

    #[test]
    fn mismatched_runs_are_rejected() {
        let lat = build_lattice(64, 1.0, -1.0, 0.0, central_window(64, 3)).unwrap();
        let st = Stroboscope::new(&lat, &PropagatorSchedule::new(16, Order::Fourth).unwrap()).unwrap();
        let probes = ProbeSet::incoming(&lat, &ProbeSpec::default()).unwrap();
        let wp = stroboscopic_wave_op(&st, Direction::Plus, &probes, 4).unwrap();
        assert!(s_matrix(&st, &wp, &wp).is_err());
    }
}
