use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LatticeModel;
use crate::numerics::{vec_norm, Complex64};

/// Gaussian wave packets aimed at the well from both sides.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    /// Number of momentum bands.
    #[serde(default = "default_bands")]
    pub bands: usize,
    /// Momentum interval `(k_min, k_max)` split into equal bands.
    #[serde(default = "default_momentum_range")]
    pub momentum_range: (f64, f64),
    /// Packet width as a fraction of the ring length (position standard deviation is half of it).
    #[serde(default = "default_width")]
    pub width_fraction: f64,
    /// Start distance from the well centre as a fraction of the ring length.
    #[serde(default = "default_offset")]
    pub offset_fraction: f64,
    /// Seeds a uniform jitter of each band momentum within the central half of its band.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_bands() -> usize {
    4
}

fn default_momentum_range() -> (f64, f64) {
    (PI / 3.0, 2.0 * PI / 3.0)
}

fn default_width() -> f64 {
    1.0 / 16.0
}

fn default_offset() -> f64 {
    3.0 / 16.0
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            bands: default_bands(),
            momentum_range: default_momentum_range(),
            width_fraction: default_width(),
            offset_fraction: default_offset(),
            seed: None,
        }
    }
}

impl ProbeSpec {
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.momentum_range;
        if self.bands == 0 {
            return Err(Error::InvalidProbes("at least one momentum band is required".into()));
        }
        if !(0.0 < lo && lo < hi && hi < PI) {
            return Err(Error::InvalidProbes(format!(
                "momentum range ({lo}, {hi}) must lie strictly inside (0, pi)"
            )));
        }
        if !(self.width_fraction > 0.0 && self.width_fraction <= 0.25) {
            return Err(Error::InvalidProbes(format!(
                "width fraction {} must lie in (0, 0.25]",
                self.width_fraction
            )));
        }
        if !(self.offset_fraction > 0.0 && self.offset_fraction < 0.5) {
            return Err(Error::InvalidProbes(format!(
                "offset fraction {} must lie in (0, 0.5)",
                self.offset_fraction
            )));
        }
        Ok(())
    }

    /// Band momenta, jittered when a seed is set.
    pub fn momenta(&self) -> Vec<f64> {
        let (lo, hi) = self.momentum_range;
        let w = (hi - lo) / self.bands as f64;
        let mut rng = self.seed.map(ChaCha8Rng::seed_from_u64);
        (0..self.bands)
            .map(|b| {
                let centre = lo + (b as f64 + 0.5) * w;
                match rng.as_mut() {
                    Some(r) => centre + r.gen_range(-0.25..0.25) * w,
                    None => centre,
                }
            })
            .collect()
    }
}

/// One packet: centre, signed momentum and normalized site amplitudes.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Probe {
    pub centre: f64,
    pub momentum: f64,
    /// Group velocity `2 J sin k` in sites per period.
    pub velocity: f64,
    #[serde(skip)]
    pub amplitudes: Vec<Complex64>,
}

/// Probe packets for one lattice.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProbeSet {
    pub spec: ProbeSpec,
    pub sites: usize,
    /// Position standard deviation in sites.
    pub sigma: f64,
    /// Start distance from the well centre in sites.
    pub offset: f64,
    /// Half the width of the interaction window in sites.
    pub window_half_width: f64,
    pub probes: Vec<Probe>,
}

/// Signed minimal-image displacement `x - c` on a ring of `sites` sites.
pub fn ring_displacement(x: f64, c: f64, sites: usize) -> f64 {
    let l = sites as f64;
    let d = (x - c).rem_euclid(l);
    if d > l / 2.0 {
        d - l
    } else {
        d
    }
}

/// `exp(-(x - c)^2 / (4 sigma^2) + i k (x - c))`, normalized, with minimal-image distances.
pub fn gaussian_packet(sites: usize, centre: f64, sigma: f64, momentum: f64) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..sites)
        .map(|x| {
            let d = ring_displacement(x as f64, centre, sites);
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), momentum * d)
        })
        .collect();
    let n = vec_norm(&raw);
    raw.into_iter().map(|z| z / n).collect()
}

impl ProbeSet {
    /// Incoming packets: for each band one packet left of the well moving right
    /// and one right of the well moving left.
    pub fn incoming(model: &LatticeModel, spec: &ProbeSpec) -> Result<Self> {
        spec.validate()?;
        let l = model.sites() as f64;
        let sigma = spec.width_fraction * l / 2.0;
        let offset = spec.offset_fraction * l;
        let c = model.well_center();
        let half_width = model.support().len() as f64 / 2.0;
        if offset - half_width < 3.0 * sigma {
            return Err(Error::InvalidProbes(format!(
                "packets of width {sigma:.2} starting {offset:.2} sites from the well overlap the interaction window"
            )));
        }
        let mut probes = Vec::with_capacity(2 * spec.bands);
        for k in spec.momenta() {
            for (centre, momentum) in [(c - offset, k), (c + offset, -k)] {
                let centre = centre.rem_euclid(l);
                probes.push(Probe {
                    centre,
                    momentum,
                    velocity: 2.0 * model.hopping() * momentum.sin(),
                    amplitudes: gaussian_packet(model.sites(), centre, sigma, momentum),
                });
            }
        }
        Ok(Self {
            spec: spec.clone(),
            sites: model.sites(),
            sigma,
            offset,
            window_half_width: half_width,
            probes,
        })
    }

    /// Time-reversed packets (complex conjugates): they leave the well forward
    /// in time and pass through it under backward evolution.
    pub fn time_reversed(&self) -> Self {
        let mut out = self.clone();
        for p in &mut out.probes {
            p.momentum = -p.momentum;
            p.velocity = -p.velocity;
            for a in &mut p.amplitudes {
                *a = a.conj();
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn vectors(&self) -> Vec<Vec<Complex64>> {
        self.probes.iter().map(|p| p.amplitudes.clone()).collect()
    }

    /// Largest packet speed.
    pub fn max_speed(&self) -> f64 {
        self.probes.iter().map(|p| p.velocity.abs()).fold(0.0, f64::max)
    }

    /// Wrap-around horizon: the number of periods before the `3 sigma` front of the
    /// fastest packet, moving either way from its start, comes back round the ring
    /// into the interaction window.
    pub fn horizon(&self) -> usize {
        let v = self.max_speed();
        if v == 0.0 {
            return 0;
        }
        let free_path = self.sites as f64 - self.offset - self.window_half_width - 3.0 * self.sigma;
        (free_path / v).floor().max(0.0) as usize
    }

    pub fn description(&self) -> String {
        format!(
            "{} Gaussian packets (sigma {:.3} sites) at distance {:.3} from the well, momenta {:?}",
            self.len(),
            self.sigma,
            self.spec.offset_fraction * self.sites as f64,
            self.probes.iter().map(|p| p.momentum).collect::<Vec<_>>()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_lattice, central_window};

    fn lattice() -> LatticeModel {
        build_lattice(256, 1.0, -2.0, 0.5, central_window(256, 5)).unwrap()
    }

    #[test]
    fn packets_are_normalized_and_placed() {
        let set = ProbeSet::incoming(&lattice(), &ProbeSpec::default()).unwrap();
        assert_eq!(set.len(), 8);
        assert_eq!(set.sigma, 8.0);
        for p in &set.probes {
            assert!((vec_norm(&p.amplitudes) - 1.0).abs() < 1e-14);
            // Mean position equals the centre.
            let mean: f64 = p
                .amplitudes
                .iter()
                .enumerate()
                .map(|(x, a)| a.norm_sqr() * ring_displacement(x as f64, p.centre, 256))
                .sum();
            assert!(mean.abs() < 1e-10);
            // Heading towards the well.
            let to_well = ring_displacement(128.0, p.centre, 256);
            assert!(to_well * p.velocity > 0.0);
        }
        // Fastest band centres 11 pi / 24 and 13 pi / 24 move at 2 sin(13 pi / 24) sites
        // per period over a free path of 256 - 48 - 2.5 - 24 sites.
        let v = 2.0 * (13.0 * PI / 24.0).sin();
        assert_eq!(set.horizon(), (181.5 / v).floor() as usize);
        assert_eq!(set.horizon(), 91);
    }

    #[test]
    fn jitter_is_seeded_and_stays_in_band() {
        let a = ProbeSpec::default().with_seed(Some(7)).momenta();
        let b = ProbeSpec::default().with_seed(Some(7)).momenta();
        let c = ProbeSpec::default().with_seed(Some(8)).momenta();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let w = PI / 12.0;
        for (i, k) in a.iter().enumerate() {
            let centre = PI / 3.0 + (i as f64 + 0.5) * w;
            assert!((k - centre).abs() <= 0.25 * w);
        }
    }

    #[test]
    fn time_reversal_conjugates() {
        let set = ProbeSet::incoming(&lattice(), &ProbeSpec::default()).unwrap();
        let rev = set.time_reversed();
        for (p, q) in set.probes.iter().zip(&rev.probes) {
            assert_eq!(p.momentum, -q.momentum);
            assert!(p.amplitudes.iter().zip(&q.amplitudes).all(|(a, b)| *b == a.conj()));
        }
    }

    #[test]
    fn rejects_overlapping_packets() {
        let spec = ProbeSpec {
            offset_fraction: 0.02,
            ..ProbeSpec::default()
        };
        assert!(matches!(
            ProbeSet::incoming(&lattice(), &spec),
            Err(Error::InvalidProbes(_))
        ));
        let spec = ProbeSpec {
            momentum_range: (0.0, 1.0),
            ..ProbeSpec::default()
        };
        assert!(spec.validate().is_err());
    }
}
