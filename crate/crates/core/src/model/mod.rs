//! Time-periodic Hamiltonians `H(t) = H0 + V(t)` with period 1.

pub mod fleet;
mod io;
mod lattice;
mod periodic;

pub use io::{from_json_str, read_model, to_json_string, write_model, ModeEntry, ModelFile};
pub use lattice::{build_lattice, central_window, LatticeModel};
pub use periodic::{default_time_grid, fourier_modes, uniform_grid, PeriodicHamiltonian};
