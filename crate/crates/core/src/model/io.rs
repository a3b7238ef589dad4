//! JSON model files.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "H0": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]],
//!   "modes": [
//!     {"n": -1, "re": [[0.0, 0.0], [1.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
//!     {"n": 1, "re": [[0.0, 1.0], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}
//!   ],
//!   "label": "rabi"
//! }
//! ```
//!
//! `H0` is a nested array of `[re, im]` pairs; each mode carries its real and
//! imaginary parts as separate real matrices. Both signs of `n` are stored.
//! Floats are written in shortest round-trip form, so write-read-write is
//! byte-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::periodic::PeriodicHamiltonian;
use crate::error::{Error, Result};
use crate::numerics::{c64, ComplexMatrix};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dim: usize,
    #[serde(rename = "H0")]
    pub h0: Vec<Vec<[f64; 2]>>,
    pub modes: Vec<ModeEntry>,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub n: i64,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ModelFile {
    pub fn from_hamiltonian(h: &PeriodicHamiltonian) -> Self {
        let d = h.dim();
        let h0 = (0..d)
            .map(|i| (0..d).map(|j| [h.h0()[(i, j)].re, h.h0()[(i, j)].im]).collect())
            .collect();
        let modes = h
            .modes()
            .map(|(n, m)| ModeEntry {
                n,
                re: (0..d).map(|i| (0..d).map(|j| m[(i, j)].re).collect()).collect(),
                im: (0..d).map(|i| (0..d).map(|j| m[(i, j)].im).collect()).collect(),
            })
            .collect();
        Self {
            dim: d,
            h0,
            modes,
            label: h.label().to_string(),
        }
    }

    pub fn to_hamiltonian(&self) -> Result<PeriodicHamiltonian> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::InvalidModel("dim must be at least 1".into()));
        }
        let check_shape = |what: &str, lens: Vec<usize>| -> Result<()> {
            if lens.len() != d || lens.iter().any(|&c| c != d) {
                return Err(Error::InvalidModel(format!("{what} is not {d}x{d}")));
            }
            Ok(())
        };
        check_shape("H0", self.h0.iter().map(Vec::len).collect())?;
        let h0 = ComplexMatrix::from_fn(d, d, |i, j| c64(self.h0[i][j][0], self.h0[i][j][1]));
        let mut modes = Vec::with_capacity(self.modes.len());
        for entry in &self.modes {
            check_shape(&format!("mode {} re", entry.n), entry.re.iter().map(Vec::len).collect())?;
            check_shape(&format!("mode {} im", entry.n), entry.im.iter().map(Vec::len).collect())?;
            modes.push((
                entry.n,
                ComplexMatrix::from_fn(d, d, |i, j| c64(entry.re[i][j], entry.im[i][j])),
            ));
        }
        PeriodicHamiltonian::new(h0, modes, self.label.clone())
    }
}

pub fn to_json_string(h: &PeriodicHamiltonian) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ModelFile::from_hamiltonian(h))?)
}

pub fn from_json_str(s: &str) -> Result<PeriodicHamiltonian> {
    serde_json::from_str::<ModelFile>(s)?.to_hamiltonian()
}

pub fn write_model(h: &PeriodicHamiltonian, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json_string(h)?)?;
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<PeriodicHamiltonian> {
    from_json_str(&fs::read_to_string(path)?)
}
