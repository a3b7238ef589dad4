//! Periodic-boundary resolvents of `-i d/dt + H(t)`: the free resolvent on a
//! time grid, the factorized perturbation `Q = A R0 B`, the full resolvent,
//! the mode-space block operator and the bound-state null-vector scan.

mod block;
mod bound;
mod factorized;
mod grid;
mod quadrature;

pub use block::{block_q, grid_block_q, BlockQ};
pub use bound::{
    bound_state_correspondence, bound_state_correspondence_with, localization_scores, localized_floquet_values,
    threshold_distance, BoundStateOptions, BoundStateVerdict, EPS_LADDER, THRESHOLD_DISTANCE,
};
pub use factorized::{full_resolvent, q_factorized, FactorizedPotential, FactorizedQ, FullResolvent, ZERO_EIGENVALUE};
pub use grid::{
    block_diagonal, centered_difference_apply, r0_apply, signed_mode, spectral_apply, to_mode_space, FreeResolvent,
    TimeGridFunction, CELL_NODES,
};
pub use quadrature::gauss_legendre_unit;
