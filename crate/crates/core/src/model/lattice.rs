use std::ops::Range;

use super::periodic::PeriodicHamiltonian;
use crate::error::{Error, Result};
use crate::numerics::{c64, ComplexMatrix};

/// Tight-binding ring with a driven well on a window of sites.
///
/// `H(t) = H0 + diag(depth + amp cos(2 pi t))` on the support window, where
/// `H0` has `-hopping` between neighbours and closes periodically.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeModel {
    sites: usize,
    hopping: f64,
    well_depth: f64,
    drive_amp: f64,
    support: Range<usize>,
    drive: PeriodicHamiltonian,
}

/// Builds the driven-well ring. Requires `sites >= 8` and a non-empty support
/// window inside `[0, sites)`.
pub fn build_lattice(
    sites: usize,
    hopping: f64,
    well_depth: f64,
    drive_amp: f64,
    support: Range<usize>,
) -> Result<LatticeModel> {
    if sites < 8 {
        return Err(Error::InvalidModel(format!(
            "lattice needs at least 8 sites, got {sites}"
        )));
    }
    if support.is_empty() || support.end > sites {
        return Err(Error::InvalidModel(format!(
            "support window {}..{} is empty or outside the lattice [0, {sites})",
            support.start, support.end
        )));
    }
    for (name, x) in [
        ("hopping", hopping),
        ("well_depth", well_depth),
        ("drive_amp", drive_amp),
    ] {
        if !x.is_finite() {
            return Err(Error::InvalidModel(format!("{name} must be finite")));
        }
    }
    let h0 = ring_laplacian(sites, hopping);
    let mut modes = Vec::new();
    if well_depth != 0.0 {
        modes.push((0, well_diagonal(sites, &support, well_depth)));
    }
    if drive_amp != 0.0 {
        let half = well_diagonal(sites, &support, drive_amp / 2.0);
        modes.push((1, half.clone()));
        modes.push((-1, half));
    }
    let label = format!("lattice L={sites} depth={well_depth} amp={drive_amp}");
    let drive = PeriodicHamiltonian::new(h0, modes, label)?;
    Ok(LatticeModel {
        sites,
        hopping,
        well_depth,
        drive_amp,
        support,
        drive,
    })
}

/// `width` sites centred on the middle of a ring of `sites` sites.
pub fn central_window(sites: usize, width: usize) -> Range<usize> {
    let start = (sites / 2).saturating_sub(width / 2);
    start..(start + width).min(sites)
}

fn ring_laplacian(sites: usize, hopping: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(sites, sites);
    for i in 0..sites {
        let j = (i + 1) % sites;
        h[(i, j)] = c64(-hopping, 0.0);
        h[(j, i)] = c64(-hopping, 0.0);
    }
    h
}

fn well_diagonal(sites: usize, support: &Range<usize>, value: f64) -> ComplexMatrix {
    let diag: Vec<f64> = (0..sites)
        .map(|i| if support.contains(&i) { value } else { 0.0 })
        .collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

impl LatticeModel {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn well_depth(&self) -> f64 {
        self.well_depth
    }

    pub fn drive_amp(&self) -> f64 {
        self.drive_amp
    }

    pub fn support(&self) -> Range<usize> {
        self.support.clone()
    }

    /// The full periodic Hamiltonian.
    pub fn drive(&self) -> &PeriodicHamiltonian {
        &self.drive
    }

    /// The free ring, with no well and no drive.
    pub fn free(&self) -> PeriodicHamiltonian {
        PeriodicHamiltonian::constant(self.drive.h0().clone(), "free ring").expect("ring Laplacian is Hermitian")
    }

    /// Same ring and window with the drive switched off.
    pub fn static_well(&self) -> Result<LatticeModel> {
        build_lattice(self.sites, self.hopping, self.well_depth, 0.0, self.support.clone())
    }

    /// Support window widened by `margin` sites on each side, clipped to the ring.
    pub fn widened_support(&self, margin: usize) -> Range<usize> {
        self.support.start.saturating_sub(margin)..(self.support.end + margin).min(self.sites)
    }

    /// Centre of the support window in site units.
    pub fn well_center(&self) -> f64 {
        (self.support.start + self.support.end - 1) as f64 / 2.0
    }

    /// Exact eigenvalues `-2 hopping cos(2 pi k / L)` of the free ring, ascending.
    pub fn free_band(&self) -> Vec<f64> {
        let mut e: Vec<f64> = (0..self.sites)
            .map(|k| -2.0 * self.hopping * (std::f64::consts::TAU * k as f64 / self.sites as f64).cos())
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }
}
