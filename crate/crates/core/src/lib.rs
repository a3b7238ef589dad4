pub mod error;
pub mod floquet;
pub mod model;
pub mod numerics;
pub mod propagation;
pub mod resolvent;
pub mod scattering;
pub mod scenario;

pub use error::{Error, Result};
pub use model::{LatticeModel, PeriodicHamiltonian};
pub use numerics::{c64, Complex64, ComplexMatrix, EigenDecomposition};
