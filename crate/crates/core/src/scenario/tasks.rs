use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::config::{
    BoundParams, CorrespondenceParams, FloquetParams, MonodromyParams, ResolventParams, Scenario, Task, TaskKind,
    WaveParams,
};
use crate::error::Result;
use crate::floquet::{
    block_shift_residual, build_floquet, correspondence_with, quasi_spectrum, shift_commutation_defect,
    translation_defect, CorrespondenceReport,
};
use crate::model::{LatticeModel, PeriodicHamiltonian};
use crate::numerics::{c64, inverse, vec_norm, Complex64, ComplexMatrix};
use crate::propagation::{
    check_cocycle, check_period_shift, convergence_study, monodromy, propagate, ConvergenceStudy, PropagatorSchedule,
};
use crate::resolvent::{
    block_q, bound_state_correspondence, full_resolvent, grid_block_q, q_factorized, spectral_apply, BoundStateVerdict,
    FactorizedPotential, FreeResolvent, TimeGridFunction,
};
use crate::scattering::{
    bound_state_scan, nearest_translate, scattering_report, BoundStateScan, ScatteringReport, Stroboscope,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub dim: usize,
    pub schedule: PropagatorSchedule,
    /// Folded quasi-energies, in eigenvector order.
    pub quasi_energies: Vec<f64>,
    pub eigenphases: Vec<f64>,
    pub unitarity_defect: f64,
    /// `max |Theta(N_s) - Theta(2 N_s)|`.
    pub step_doubling_difference: f64,
    /// `(t, max |U(t + 1, 0) - U(t, 0) Theta|)`.
    pub period_shift_defects: Vec<(f64, f64)>,
    /// `max |U(t, r) U(r, s) - U(t, s)|` at `(s, r, t) = (start, start + 0.37, start + 1.3)`.
    pub cocycle_defect: f64,
    /// `max |U(s, t) U(t, s) - I|` on the same interval.
    pub adjoint_defect: f64,
    pub convergence: Option<ConvergenceStudy>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FloquetSpectrumReport {
    pub n_modes: usize,
    pub size: usize,
    pub interior_count: usize,
    pub edge_count: usize,
    pub window: (f64, f64),
    /// Folded windowed quasi-energies, ascending.
    pub quasi_energies: Vec<f64>,
    /// Interior-block defect of `K S - S K - 2 pi S`.
    pub shift_commutator_defect: f64,
    /// `(sigma, defect)` of the group form.
    pub group_defects: Vec<(f64, f64)>,
    pub translation_defect: f64,
    /// Eigenvector residual of the shifted blocks.
    pub block_shift_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrespondenceTaskReport {
    pub schedule: PropagatorSchedule,
    /// `max |Theta(N_s) - Theta(2 N_s)|`, the integrator floor of the distances.
    pub step_doubling_difference: f64,
    pub correspondence: CorrespondenceReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolventCheckReport {
    pub lambda: Complex64,
    pub n_t: usize,
    pub n_modes: usize,
    /// `R0(lambda) f` at `t = 0` for `f = e_0` constant in time.
    pub r0_on_constant: Vec<Complex64>,
    /// Its distance to `(H0 - lambda)^{-1} e_0`.
    pub r0_constant_defect: f64,
    /// `max_n |R0 e_n - (H0 + 2 pi n - lambda)^{-1} e_n|` over plane waves `|n| <= n_modes`.
    pub plane_wave_defect: f64,
    /// `max |(-i d/dt + H0 - lambda) R0 f - f|` with spectral differentiation.
    pub spectral_residual: f64,
    pub factorization_defect: f64,
    pub norm_defect: f64,
    pub q_schmidt_norm: f64,
    /// `max |R - R0 + R0 V R|`.
    pub resolvent_identity_defect: f64,
    pub condition_estimate: f64,
    pub block_q_norm: f64,
    /// `max |Q_modes - Q_grid|` on `|n| <= n_modes`.
    pub block_grid_difference: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundStatesReport {
    pub schedule: PropagatorSchedule,
    pub scan: BoundStateScan,
    /// One `I + Q` verdict per bound level when requested.
    pub verdicts: Vec<BoundStateVerdict>,
    /// `max |refined - lambda|` over verdicts, on the translate nearest the level.
    pub max_refinement_shift: Option<f64>,
}

/// Result payload of one scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum TaskReport {
    Monodromy(MonodromyReport),
    FloquetSpectrum(FloquetSpectrumReport),
    Correspondence(CorrespondenceTaskReport),
    ResolventCheck(ResolventCheckReport),
    WaveOperators(Box<ScatteringReport>),
    BoundStates(BoundStatesReport),
}

/// Column names of [`TaskReport::headline`], per task.
pub fn headline_keys(kind: TaskKind) -> &'static [&'static str] {
    match kind {
        TaskKind::Monodromy => &[
            "unitarity_defect",
            "step_doubling_difference",
            "period_shift_defect",
            "cocycle_defect",
        ],
        TaskKind::FloquetSpectrum => &[
            "shift_commutator_defect",
            "group_defect",
            "translation_defect",
            "windowed_count",
        ],
        TaskKind::Correspondence => &[
            "max_distance",
            "mode_residual",
            "translation_defect",
            "step_doubling_difference",
        ],
        TaskKind::ResolventCheck => &[
            "r0_constant_defect",
            "spectral_residual",
            "resolvent_identity_defect",
            "block_q_norm",
            "block_grid_difference",
        ],
        TaskKind::WaveOperators => &[
            "converged_fraction",
            "isometry_defect",
            "unitarity_defect",
            "intertwining_defect",
            "averaging_difference",
        ],
        TaskKind::BoundStates => &["bound_count", "max_floquet_distance", "max_refinement_shift"],
    }
}

impl TaskReport {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskReport::Monodromy(_) => TaskKind::Monodromy,
            TaskReport::FloquetSpectrum(_) => TaskKind::FloquetSpectrum,
            TaskReport::Correspondence(_) => TaskKind::Correspondence,
            TaskReport::ResolventCheck(_) => TaskKind::ResolventCheck,
            TaskReport::WaveOperators(_) => TaskKind::WaveOperators,
            TaskReport::BoundStates(_) => TaskKind::BoundStates,
        }
    }

    /// Headline numbers in the order of [`headline_keys`]; `NaN` marks a skipped check.
    pub fn headline(&self) -> Vec<(&'static str, f64)> {
        let values: Vec<f64> = match self {
            TaskReport::Monodromy(r) => vec![
                r.unitarity_defect,
                r.step_doubling_difference,
                r.period_shift_defects.iter().map(|p| p.1).fold(0.0, f64::max),
                r.cocycle_defect,
            ],
            TaskReport::FloquetSpectrum(r) => vec![
                r.shift_commutator_defect,
                r.group_defects.iter().map(|p| p.1).fold(0.0, f64::max),
                r.translation_defect,
                r.quasi_energies.len() as f64,
            ],
            TaskReport::Correspondence(r) => vec![
                r.correspondence.max_distance,
                r.correspondence.mode_residual,
                r.correspondence.translation_defect,
                r.step_doubling_difference,
            ],
            TaskReport::ResolventCheck(r) => vec![
                r.r0_constant_defect,
                r.spectral_residual,
                r.resolvent_identity_defect,
                r.block_q_norm,
                r.block_grid_difference,
            ],
            TaskReport::WaveOperators(r) => vec![
                r.converged_fraction,
                r.isometry_defect,
                r.unitarity_defect,
                r.intertwining_defect,
                r.averaging_difference,
            ],
            TaskReport::BoundStates(r) => vec![
                r.scan.states.len() as f64,
                r.scan.max_floquet_distance.unwrap_or(f64::NAN),
                r.max_refinement_shift.unwrap_or(f64::NAN),
            ],
        };
        headline_keys(self.kind()).iter().copied().zip(values).collect()
    }
}

/// Runs the scenario's task.
pub fn execute(s: &Scenario) -> Result<TaskReport> {
    match &s.task {
        Task::Monodromy(p) => run_monodromy(&s.model, p).map(TaskReport::Monodromy),
        Task::FloquetSpectrum(p) => run_floquet(&s.model, p).map(TaskReport::FloquetSpectrum),
        Task::Correspondence(p) => run_correspondence(&s.model, p).map(TaskReport::Correspondence),
        Task::ResolventCheck(p) => run_resolvent(&s.model, p).map(TaskReport::ResolventCheck),
        Task::WaveOperators(p) => run_waves(lattice(s), p).map(|r| TaskReport::WaveOperators(Box::new(r))),
        Task::BoundStates(p) => run_bound(lattice(s), p).map(TaskReport::BoundStates),
    }
}

fn lattice(s: &Scenario) -> &LatticeModel {
    s.lattice.as_ref().expect("validated lattice tasks carry a lattice")
}

fn step_doubling(h: &PeriodicHamiltonian, sched: &PropagatorSchedule) -> Result<(ComplexMatrix, f64)> {
    let coarse = propagate(h, sched.start, sched.start + 1.0, sched)?;
    let fine_sched = PropagatorSchedule {
        steps_per_period: 2 * sched.steps_per_period,
        ..*sched
    };
    let fine = propagate(h, sched.start, sched.start + 1.0, &fine_sched)?;
    let d = coarse.max_abs_diff(&fine);
    Ok((coarse, d))
}

fn run_monodromy(h: &PeriodicHamiltonian, p: &MonodromyParams) -> Result<MonodromyReport> {
    let sched = PropagatorSchedule::new(p.steps_per_period, p.order)?.with_start(p.start);
    let m = monodromy(h, p.start, &sched)?;
    let (_, doubling) = step_doubling(h, &sched)?;
    let period_shift_defects = p
        .check_times
        .iter()
        .map(|&t| Ok((t, check_period_shift(h, t, &sched)?)))
        .collect::<Result<Vec<_>>>()?;
    let (s, r, t) = (p.start, p.start + 0.37, p.start + 1.3);
    let cocycle_defect = check_cocycle(h, s, r, t, &sched)?;
    let forward = propagate(h, s, t, &sched)?;
    let backward = propagate(h, t, s, &sched)?;
    let adjoint_defect = backward
        .matmul(&forward)
        .max_abs_diff(&ComplexMatrix::identity(h.dim()));
    let convergence = if p.ladder.is_empty() {
        None
    } else {
        Some(convergence_study(h, &p.ladder, p.order)?)
    };
    Ok(MonodromyReport {
        dim: h.dim(),
        schedule: sched,
        quasi_energies: m.quasi_energies(),
        eigenphases: m.eigenphases(),
        unitarity_defect: m.theta.unitarity_defect(),
        step_doubling_difference: doubling,
        period_shift_defects,
        cocycle_defect,
        adjoint_defect,
        convergence,
    })
}

fn run_floquet(h: &PeriodicHamiltonian, p: &FloquetParams) -> Result<FloquetSpectrumReport> {
    let k = build_floquet(h, p.n_modes)?;
    let spec = quasi_spectrum(&k)?;
    let defect = shift_commutation_defect(&k);
    let mut quasi: Vec<f64> = spec.windowed().iter().map(|&i| spec.folded[i]).collect();
    quasi.sort_by(f64::total_cmp);
    Ok(FloquetSpectrumReport {
        n_modes: p.n_modes,
        size: k.size(),
        interior_count: spec.interior().len(),
        edge_count: spec.values.len() - spec.interior().len(),
        window: spec.window,
        quasi_energies: quasi,
        shift_commutator_defect: defect.commutator,
        group_defects: defect.group.clone(),
        translation_defect: translation_defect(&spec),
        block_shift_residual: block_shift_residual(&k, &spec),
    })
}

fn run_correspondence(h: &PeriodicHamiltonian, p: &CorrespondenceParams) -> Result<CorrespondenceTaskReport> {
    let sched = PropagatorSchedule::new(p.steps_per_period, p.order)?;
    let m = monodromy(h, 0.0, &sched)?;
    let (_, doubling) = step_doubling(h, &sched)?;
    Ok(CorrespondenceTaskReport {
        schedule: sched,
        step_doubling_difference: doubling,
        correspondence: correspondence_with(h, p.n_modes, &m)?,
    })
}

fn run_resolvent(h: &PeriodicHamiltonian, p: &ResolventParams) -> Result<ResolventCheckReport> {
    let lambda = c64(p.lambda[0], p.lambda[1]);
    let d = h.dim();
    let r0 = FreeResolvent::new(h.h0(), lambda, p.n_t)?;
    let mut e0 = vec![c64(0.0, 0.0); d];
    e0[0] = c64(1.0, 0.0);
    let shifted_inverse = |n: i64| -> Result<ComplexMatrix> {
        let mut m = h.h0().clone();
        for i in 0..d {
            m[(i, i)] += c64(TAU * n as f64, 0.0) - lambda;
        }
        inverse(&m)
    };
    let constant = r0.apply(&TimeGridFunction::plane_wave(p.n_t, 0, &e0));
    let r0_on_constant = constant.sample(0).to_vec();
    let oracle = shifted_inverse(0)?.mul_vec(&e0);
    let r0_constant_defect = vec_norm(
        &r0_on_constant
            .iter()
            .zip(&oracle)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );

    let mut plane_wave_defect: f64 = 0.0;
    let nm = p.n_modes as i64;
    for n in -nm..=nm {
        let out = r0.apply(&TimeGridFunction::plane_wave(p.n_t, n, &e0));
        let expected = TimeGridFunction::plane_wave(p.n_t, n, &shifted_inverse(n)?.mul_vec(&e0));
        plane_wave_defect = plane_wave_defect.max(out.max_abs_diff(&expected));
    }

    // Smooth test function with a few modes in every fiber component.
    let f = TimeGridFunction::from_fn(p.n_t, d, |t| {
        (0..d)
            .map(|i| c64((TAU * t).cos() + 0.3 * i as f64, 0.5 * (2.0 * TAU * t).sin()))
            .collect()
    });
    let u = r0.apply(&f);
    let spectral_residual = spectral_apply(h.h0(), lambda, &u).max_abs_diff(&f);

    let fp = FactorizedPotential::new(h, p.n_t)?;
    let q = q_factorized(h, lambda, p.n_t)?;
    let full = full_resolvent(h, lambda, p.n_t)?;
    let modes = block_q(h, lambda, p.n_modes)?;
    let grid = grid_block_q(h, lambda, p.n_t, p.n_modes)?;
    Ok(ResolventCheckReport {
        lambda,
        n_t: p.n_t,
        n_modes: p.n_modes,
        r0_on_constant,
        r0_constant_defect,
        plane_wave_defect,
        spectral_residual,
        factorization_defect: fp.factorization_defect(),
        norm_defect: fp.norm_defect(),
        q_schmidt_norm: q.schmidt_norm,
        resolvent_identity_defect: full.resolvent_identity_defect(),
        condition_estimate: full.condition,
        block_q_norm: modes.norm(),
        block_grid_difference: modes.matrix.max_abs_diff(&grid),
    })
}

fn run_waves(lat: &LatticeModel, p: &WaveParams) -> Result<ScatteringReport> {
    let sched = PropagatorSchedule::new(p.steps_per_period, p.order)?;
    scattering_report(lat, &sched, &p.options())
}

fn run_bound(lat: &LatticeModel, p: &BoundParams) -> Result<BoundStatesReport> {
    let sched = PropagatorSchedule::new(p.steps_per_period, p.order)?;
    let st = Stroboscope::new(lat, &sched)?;
    let scan = bound_state_scan(&st, p.floquet_modes)?;
    let mut verdicts = Vec::new();
    let mut max_shift = None;
    if let Some(n) = p.resolvent_modes {
        let centre = lat.drive().full_mode(0).trace().re / lat.sites() as f64;
        let mut worst: f64 = 0.0;
        for state in &scan.states {
            let candidate = nearest_translate(state.quasi_energy, centre);
            let v = bound_state_correspondence(lat.drive(), candidate, n)?;
            worst = worst.max((v.refined - candidate).abs());
            verdicts.push(v);
        }
        max_shift = Some(worst);
    }
    Ok(BoundStatesReport {
        schedule: sched,
        scan,
        verdicts,
        max_refinement_shift: max_shift,
    })
}
