use serde::{Deserialize, Serialize};

use super::probes::ProbeSet;
use crate::error::{Error, Result};
use crate::model::LatticeModel;
use crate::numerics::{hermitian_eig, vec_norm, vec_sub, Complex64, ComplexMatrix, EigenDecomposition};
use crate::propagation::{monodromy, propagate, propagate_path, Monodromy, PropagatorSchedule};

/// Cauchy gaps below this count as converged.
pub const GAP_TOL: f64 = 1e-3;
/// Consecutive sub-tolerance gaps required, ending at the horizon.
pub const MIN_TAIL: usize = 3;

/// `+`: `W = lim Theta0^{-n} Theta^n`; `-`: `W = lim Theta0^n Theta^{-n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    fn sign(self) -> i64 {
        match self {
            Direction::Plus => 1,
            Direction::Minus => -1,
        }
    }
}

/// Interacting monodromy and free evolution of a lattice, shared by all wave-operator computations.
#[derive(Clone, Debug)]
pub struct Stroboscope {
    pub model: LatticeModel,
    pub monodromy: Monodromy,
    pub schedule: PropagatorSchedule,
    free: EigenDecomposition,
}

impl Stroboscope {
    /// Computes `Theta = U(s + 1, s)` with `s = sched.start`.
    pub fn new(model: &LatticeModel, sched: &PropagatorSchedule) -> Result<Self> {
        let monodromy = monodromy(model.drive(), sched.start, sched)?;
        let free = hermitian_eig(model.drive().h0())?;
        Ok(Self {
            model: model.clone(),
            monodromy,
            schedule: *sched,
            free,
        })
    }

    pub fn start(&self) -> f64 {
        self.schedule.start
    }

    pub fn theta(&self) -> &ComplexMatrix {
        &self.monodromy.theta
    }

    /// `Theta^p v` by repeated products (`Theta^dag` for negative `p`).
    pub fn apply_theta(&self, v: &[Complex64], power: i64) -> Vec<Complex64> {
        let mut x = v.to_vec();
        for _ in 0..power.unsigned_abs() {
            x = if power > 0 {
                self.theta().mul_vec(&x)
            } else {
                self.theta().adjoint_mul_vec(&x)
            };
        }
        x
    }

    /// Exact free evolution `e^{-i H0 t} v`; `t = n` gives `Theta0^n v`.
    pub fn apply_free(&self, v: &[Complex64], t: f64) -> Vec<Complex64> {
        let coeffs = self.free.vectors.adjoint_mul_vec(v);
        let scaled: Vec<Complex64> = coeffs
            .iter()
            .zip(&self.free.values)
            .map(|(c, e)| c * Complex64::from_polar(1.0, -e.re * t))
            .collect();
        self.free.vectors.mul_vec(&scaled)
    }

    /// `W^(n) v` for a single power.
    pub fn iterate(&self, direction: Direction, v: &[Complex64], n: usize) -> Vec<Complex64> {
        let s = direction.sign();
        let x = self.apply_theta(v, s * n as i64);
        self.apply_free(&x, -(s * n as i64) as f64)
    }
}

/// Wave-operator iterates on a probe set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaveOperatorIterates {
    pub direction: Direction,
    pub n_max: usize,
    pub probe_set: String,
    /// `cauchy_gaps[j][n - 1] = ||W^(n) psi_j - W^(n-1) psi_j||`.
    pub cauchy_gaps: Vec<Vec<f64>>,
    /// First `n` from which every gap stays below the tolerance through `n_max`.
    pub converged_at: Vec<Option<usize>>,
    pub tolerance: f64,
    /// `max_j | ||W psi_j|| - ||psi_j|| |` at `n_max`.
    pub isometry_defect: f64,
    /// `||W Theta psi_j - Theta0 W psi_j||` at `n_max`.
    pub intertwining_defects: Vec<f64>,
    /// Columns are `W^(n) psi_j`, one matrix per `n = 0..=n_max`.
    #[serde(skip)]
    pub iterates: Vec<ComplexMatrix>,
    #[serde(skip)]
    pub probes: Vec<Vec<Complex64>>,
}

impl WaveOperatorIterates {
    pub fn is_converged(&self, j: usize) -> bool {
        self.converged_at[j].is_some()
    }

    pub fn converged_probes(&self) -> Vec<usize> {
        (0..self.probes.len()).filter(|&j| self.is_converged(j)).collect()
    }

    pub fn converged_fraction(&self) -> f64 {
        if self.probes.is_empty() {
            return 0.0;
        }
        self.converged_probes().len() as f64 / self.probes.len() as f64
    }

    /// The recorded limit: the iterate at `n_max`.
    pub fn limit(&self) -> &ComplexMatrix {
        self.iterates.last().expect("iterates hold at least n = 0")
    }

    pub fn limit_vector(&self, j: usize) -> Vec<Complex64> {
        self.limit().column(j)
    }

    /// Largest intertwining defect over converged probes.
    pub fn max_intertwining_defect(&self) -> f64 {
        self.converged_probes()
            .into_iter()
            .map(|j| self.intertwining_defects[j])
            .fold(0.0, f64::max)
    }

    /// Fails with the gap trace unless at least `min_fraction` of the probes converged.
    pub fn require_convergence(&self, min_fraction: f64) -> Result<()> {
        if self.converged_fraction() >= min_fraction {
            return Ok(());
        }
        let trace: Vec<String> = self
            .cauchy_gaps
            .iter()
            .enumerate()
            .filter(|(j, _)| !self.is_converged(*j))
            .map(|(j, g)| format!("probe {j}: final gaps {:?}", &g[g.len().saturating_sub(MIN_TAIL)..]))
            .collect();
        Err(Error::NoConvergence(format!(
            "{:.0}% of probes converged before the wrap-around horizon n = {} ({})",
            100.0 * self.converged_fraction(),
            self.n_max,
            trace.join("; ")
        )))
    }
}

/// First index from which all `gaps` stay below `tol`, counted in periods, if that
/// tail has at least `MIN_TAIL` entries.
pub fn converged_from(gaps: &[f64], tol: f64) -> Option<usize> {
    let tail = gaps.iter().rev().take_while(|&&g| g < tol).count();
    (tail >= MIN_TAIL).then(|| gaps.len() - tail + 1)
}

/// Stroboscopic iterates `W^(n) psi` for `n = 0..=n_max` on every probe.
pub fn stroboscopic_wave_op(
    st: &Stroboscope,
    direction: Direction,
    probes: &ProbeSet,
    n_max: usize,
) -> Result<WaveOperatorIterates> {
    if probes.is_empty() {
        return Err(Error::InvalidProbes("probe set is empty".into()));
    }
    if probes.sites != st.model.sites() {
        return Err(Error::InvalidProbes(format!(
            "probes built for {} sites, lattice has {}",
            probes.sites,
            st.model.sites()
        )));
    }
    let horizon = probes.horizon();
    if n_max == 0 || n_max > horizon {
        return Err(Error::InvalidProbes(format!(
            "n_max = {n_max} must lie in [1, {horizon}] so packets do not wrap the ring"
        )));
    }
    let s = direction.sign();
    let vectors = probes.vectors();
    let p = vectors.len();
    let l = st.model.sites();
    let mut iterates = vec![ComplexMatrix::zeros(l, p); n_max + 1];
    let mut gaps = vec![Vec::with_capacity(n_max); p];
    let mut intertwining = Vec::with_capacity(p);
    let mut isometry: f64 = 0.0;
    for (j, psi) in vectors.iter().enumerate() {
        let mut x = psi.clone();
        let mut prev = psi.clone();
        iterates[0].set_column(j, psi);
        for n in 1..=n_max {
            x = st.apply_theta(&x, s);
            let w = st.apply_free(&x, -(s * n as i64) as f64);
            gaps[j].push(vec_norm(&vec_sub(&w, &prev)));
            iterates[n].set_column(j, &w);
            prev = w;
        }
        isometry = isometry.max((vec_norm(&prev) - vec_norm(psi)).abs());
        let w_theta = st.iterate(direction, &st.theta().mul_vec(psi), n_max);
        let theta0_w = st.apply_free(&prev, 1.0);
        intertwining.push(vec_norm(&vec_sub(&w_theta, &theta0_w)));
    }
    Ok(WaveOperatorIterates {
        direction,
        n_max,
        probe_set: probes.description(),
        converged_at: gaps.iter().map(|g| converged_from(g, GAP_TOL)).collect(),
        cauchy_gaps: gaps,
        tolerance: GAP_TOL,
        isometry_defect: isometry,
        intertwining_defects: intertwining,
        iterates,
        probes: vectors,
    })
}

/// Simpson rule for `h^{-1} int_0^h U0(t)^dag U(s + t, s) dt` on `nodes + 1` points.
#[derive(Clone, Debug)]
pub struct AveragingKernel {
    pub h: f64,
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
    path: Vec<ComplexMatrix>,
}

impl AveragingKernel {
    /// Uses an even number of panels no coarser than the schedule's step.
    pub fn new(st: &Stroboscope, h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::validation(
                "h",
                format!("averaging window must lie in (0, 1], got {h}"),
            ));
        }
        let panels = {
            let m = (h * st.schedule.steps_per_period as f64 - 1e-9).ceil().max(2.0) as usize;
            m + m % 2
        };
        let dt = h / panels as f64;
        let times: Vec<f64> = (0..=panels).map(|k| k as f64 * dt).collect();
        let weights: Vec<f64> = (0..=panels)
            .map(|k| {
                let w = if k == 0 || k == panels {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * dt / (3.0 * h)
            })
            .collect();
        let s = st.start();
        let absolute: Vec<f64> = times.iter().map(|t| s + t).collect();
        let path = propagate_path(st.model.drive(), s, &absolute, &st.schedule)?;
        Ok(Self {
            h,
            times,
            weights,
            path,
        })
    }

    /// `A_h x`.
    pub fn apply(&self, st: &Stroboscope, x: &[Complex64]) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); x.len()];
        for ((t, w), u) in self.times.iter().zip(&self.weights).zip(&self.path) {
            let y = st.apply_free(&u.mul_vec(x), -t);
            for (a, b) in acc.iter_mut().zip(y) {
                *a += *w * b;
            }
        }
        acc
    }
}

/// Time-averaged wave operator on the probes of an iterate run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeAveragedWaveOp {
    pub direction: Direction,
    pub h: f64,
    pub nodes: usize,
    pub n: usize,
    /// `||W_h psi_j - W^(n) psi_j||` per probe.
    pub differences: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<Complex64>>,
}

impl TimeAveragedWaveOp {
    /// Largest difference over the probes listed in `subset`.
    pub fn max_difference_on(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&j| self.differences[j]).fold(0.0, f64::max)
    }
}

/// `Theta0^{-+n} A_h Theta^{+-n} psi` at `n = n_max` of `iterates`, compared with the
/// stroboscopic iterate.
pub fn time_averaged_wave_op(st: &Stroboscope, iterates: &WaveOperatorIterates, h: f64) -> Result<TimeAveragedWaveOp> {
    let kernel = AveragingKernel::new(st, h)?;
    time_averaged_with(st, iterates, &kernel)
}

pub fn time_averaged_with(
    st: &Stroboscope,
    iterates: &WaveOperatorIterates,
    kernel: &AveragingKernel,
) -> Result<TimeAveragedWaveOp> {
    let s = iterates.direction.sign();
    let n = iterates.n_max as i64;
    let mut vectors = Vec::with_capacity(iterates.probes.len());
    let mut differences = Vec::with_capacity(iterates.probes.len());
    for (j, psi) in iterates.probes.iter().enumerate() {
        let x = st.apply_theta(psi, s * n);
        let w = st.apply_free(&kernel.apply(st, &x), -(s * n) as f64);
        differences.push(vec_norm(&vec_sub(&w, &iterates.limit_vector(j))));
        vectors.push(w);
    }
    Ok(TimeAveragedWaveOp {
        direction: iterates.direction,
        h: kernel.h,
        nodes: kernel.times.len(),
        n: iterates.n_max,
        differences,
        vectors,
    })
}

/// `W(s') U(s', s) psi` against `U0(s', s) W(s) psi` at `n = iterates.n_max`, per probe.
/// Only meaningful for the `+` direction.
pub fn start_time_covariance(st: &Stroboscope, iterates: &WaveOperatorIterates, shift: f64) -> Result<Vec<f64>> {
    if !(shift > 0.0 && shift < 1.0) {
        return Err(Error::validation(
            "shift",
            format!("start shift must lie in (0, 1), got {shift}"),
        ));
    }
    let s = st.start();
    let moved = PropagatorSchedule {
        start: s + shift,
        ..st.schedule
    };
    let shifted = Stroboscope::new(&st.model, &moved)?;
    let u = propagate(st.model.drive(), s, s + shift, &st.schedule)?;
    let n = iterates.n_max;
    Ok(iterates
        .probes
        .iter()
        .enumerate()
        .map(|(j, psi)| {
            let lhs = shifted.iterate(iterates.direction, &u.mul_vec(psi), n);
            let rhs = st.apply_free(&iterates.limit_vector(j), shift);
            vec_norm(&vec_sub(&lhs, &rhs))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_lattice, central_window};
    use crate::propagation::Order;
    use crate::scattering::probes::ProbeSpec;

    fn small(depth: f64, amp: f64) -> (Stroboscope, ProbeSet) {
        let lat = build_lattice(64, 1.0, depth, amp, central_window(64, 3)).unwrap();
        let sched = PropagatorSchedule::new(32, Order::Fourth).unwrap();
        let probes = ProbeSet::incoming(&lat, &ProbeSpec::default()).unwrap();
        (Stroboscope::new(&lat, &sched).unwrap(), probes)
    }

    #[test]
    fn free_lattice_iterates_are_identity() {
        let (st, probes) = small(0.0, 0.0);
        let n = probes.horizon();
        for dir in [Direction::Plus, Direction::Minus] {
            let w = stroboscopic_wave_op(&st, dir, &probes, n).unwrap();
            assert!(w.cauchy_gaps.iter().flatten().all(|&g| g < 1e-12));
            for (j, psi) in w.probes.iter().enumerate() {
                assert!(vec_norm(&vec_sub(&w.limit_vector(j), psi)) < 1e-12);
            }
            assert_eq!(w.converged_fraction(), 1.0);
            let avg = time_averaged_wave_op(&st, &w, 0.5).unwrap();
            assert!(avg.differences.iter().all(|&d| d < 1e-12));
        }
    }

    #[test]
    fn converged_from_requires_a_tail() {
        assert_eq!(converged_from(&[1.0, 0.5, 1e-4, 1e-4, 1e-4], 1e-3), Some(3));
        assert_eq!(converged_from(&[1.0, 1e-4, 1e-4], 1e-3), None);
        assert_eq!(converged_from(&[1e-4; 4], 1e-3), Some(1));
        assert_eq!(converged_from(&[1e-4, 1e-4, 1e-4, 0.1], 1e-3), None);
    }

    #[test]
    fn static_well_iterates_are_exactly_unitary_products() {
        let (st, probes) = small(-1.0, 0.0);
        let w = stroboscopic_wave_op(&st, Direction::Plus, &probes, 5).unwrap();
        // Static well: Theta = exp(-i (H0 + V0)) exactly up to eigensolver roundoff.
        let v0 = st.model.drive().full_mode(0);
        let exact = crate::numerics::expm_hermitian(&v0, 1.0).unwrap();
        assert!(st.theta().max_abs_diff(&exact) < 1e-12);
        assert!(w.isometry_defect < 1e-12);
        assert_eq!(w.iterates.len(), 6);
    }

    #[test]
    fn rejects_horizon_violations() {
        let (st, probes) = small(-1.0, 0.5);
        let too_far = probes.horizon() + 1;
        assert!(stroboscopic_wave_op(&st, Direction::Plus, &probes, too_far).is_err());
        assert!(stroboscopic_wave_op(&st, Direction::Plus, &probes, 0).is_err());
    }
}
