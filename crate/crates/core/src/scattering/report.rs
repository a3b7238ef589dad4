use serde::{Deserialize, Serialize};

use super::bound_scan::{bound_state_scan, BoundStateScan};
use super::probes::{ProbeSet, ProbeSpec};
use super::smatrix::{s_matrix, ScatteringMatrix};
use super::wave::{
    start_time_covariance, stroboscopic_wave_op, time_averaged_wave_op, Direction, Stroboscope, TimeAveragedWaveOp,
    WaveOperatorIterates,
};
use crate::error::Result;
use crate::model::LatticeModel;
use crate::propagation::PropagatorSchedule;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScatteringOptions {
    #[serde(default)]
    pub probes: ProbeSpec,
    /// Iterate count; defaults to the wrap-around horizon of the probes.
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Averaging window of the time-averaged wave operator.
    #[serde(default = "default_h")]
    pub averaging_h: f64,
    /// Start shift for the covariance check; `None` skips it.
    #[serde(default = "default_shift")]
    pub covariance_shift: Option<f64>,
    /// Floquet truncation for the bound-state cross-check; `None` skips it.
    #[serde(default)]
    pub floquet_modes: Option<usize>,
}

fn default_h() -> f64 {
    1.0
}

fn default_shift() -> Option<f64> {
    Some(0.5)
}

impl Default for ScatteringOptions {
    fn default() -> Self {
        Self {
            probes: ProbeSpec::default(),
            n_max: None,
            averaging_h: default_h(),
            covariance_shift: default_shift(),
            floquet_modes: None,
        }
    }
}

/// Everything the scattering checks measure on one lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub sites: usize,
    pub well_depth: f64,
    pub drive_amp: f64,
    pub schedule: PropagatorSchedule,
    pub probes: ProbeSet,
    pub n_max: usize,
    pub w_plus: WaveOperatorIterates,
    pub w_minus: WaveOperatorIterates,
    pub s_matrix: ScatteringMatrix,
    pub time_averaged: TimeAveragedWaveOp,
    /// `||W(s') U(s', s) psi - U0(s' - s) W(s) psi||` per `+` probe.
    pub covariance_defects: Option<Vec<f64>>,
    pub bound_states: BoundStateScan,
    /// Share of `+` probes whose iterates stabilized.
    pub converged_fraction: f64,
    /// Largest of the `W+` and `W-` isometry defects.
    pub isometry_defect: f64,
    pub unitarity_defect: f64,
    /// Largest of the `W+`, `W-` and `S` intertwining defects on converged probes.
    pub intertwining_defect: f64,
    /// Largest time-averaged vs stroboscopic difference on converged probes.
    pub averaging_difference: f64,
    /// Largest covariance defect on converged probes.
    pub covariance_defect: Option<f64>,
    /// `max |<b, psi>|` over bound vectors and converged probes.
    pub bound_overlap: f64,
}

pub fn scattering_report(
    model: &LatticeModel,
    sched: &PropagatorSchedule,
    opts: &ScatteringOptions,
) -> Result<ScatteringReport> {
    let probes = ProbeSet::incoming(model, &opts.probes)?;
    let st = Stroboscope::new(model, sched)?;
    let n_max = opts.n_max.unwrap_or_else(|| probes.horizon());
    let w_plus = stroboscopic_wave_op(&st, Direction::Plus, &probes, n_max)?;
    let w_minus = stroboscopic_wave_op(&st, Direction::Minus, &probes.time_reversed(), n_max)?;
    let s = s_matrix(&st, &w_plus, &w_minus)?;
    let time_averaged = time_averaged_wave_op(&st, &w_plus, opts.averaging_h)?;
    let covariance_defects = opts
        .covariance_shift
        .map(|shift| start_time_covariance(&st, &w_plus, shift))
        .transpose()?;
    let bound_states = bound_state_scan(&st, opts.floquet_modes)?;

    let converged = w_plus.converged_probes();
    let on_converged = |v: &[f64]| converged.iter().map(|&j| v[j]).fold(0.0, f64::max);
    let converged_vectors: Vec<_> = converged.iter().map(|&j| w_plus.probes[j].clone()).collect();
    Ok(ScatteringReport {
        sites: model.sites(),
        well_depth: model.well_depth(),
        drive_amp: model.drive_amp(),
        schedule: *sched,
        n_max,
        converged_fraction: w_plus.converged_fraction(),
        isometry_defect: w_plus.isometry_defect.max(w_minus.isometry_defect),
        unitarity_defect: s.unitarity_defect,
        intertwining_defect: w_plus
            .max_intertwining_defect()
            .max(w_minus.max_intertwining_defect())
            .max(s.intertwining_defect),
        averaging_difference: on_converged(&time_averaged.differences),
        covariance_defect: covariance_defects.as_deref().map(on_converged),
        bound_overlap: bound_states.max_overlap(&converged_vectors),
        probes,
        w_plus,
        w_minus,
        s_matrix: s,
        time_averaged,
        covariance_defects,
        bound_states,
    })
}
