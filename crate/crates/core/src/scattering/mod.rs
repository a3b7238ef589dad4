//! Stroboscopic scattering on the driven-well ring: wave-operator iterates on
//! probe packets, the scattering matrix and bound states of the monodromy.
//!
//! Convention: `W+ = lim Theta0^{-n} Theta^n` and `W- = lim Theta0^n Theta^{-n}`,
//! so `W Theta = Theta0 W` and `S = W+ W-^dag` commutes with `Theta0`.

mod bound_scan;
mod probes;
mod report;
mod smatrix;
mod wave;

pub use bound_scan::{
    bound_state_scan, nearest_translate, BoundState, BoundStateScan, BOUND_MARGIN, BOUND_MASS, MULTIPLICITY_GAP,
};
pub use probes::{gaussian_packet, ring_displacement, Probe, ProbeSet, ProbeSpec};
pub use report::{scattering_report, ScatteringOptions, ScatteringReport};
pub use smatrix::{first_stable, s_matrix, ScatteringMatrix};
pub use wave::{
    converged_from, start_time_covariance, stroboscopic_wave_op, time_averaged_wave_op, time_averaged_with,
    AveragingKernel, Direction, Stroboscope, TimeAveragedWaveOp, WaveOperatorIterates, GAP_TOL, MIN_TAIL,
};
