//! Full resolvent from the factorized potential, compared with the inverse of
//! the truncated Floquet matrix in mode space.

use floquet::floquet::build_floquet;
use floquet::model::fleet::rabi;
use floquet::numerics::inverse;
use floquet::resolvent::{full_resolvent, to_mode_space};
use floquet::{c64, ComplexMatrix};

fn main() -> floquet::Result<()> {
    let h = rabi(0.0, 1.0);
    let lambda = c64(2.0, 1.0);
    let n_t = 128;
    let r = full_resolvent(&h, lambda, n_t)?;
    println!("Hilbert-Schmidt norm of Q   {:.6}", r.q.schmidt_norm);
    println!("condition of I + Q          {:.3e}", r.condition);
    println!("resolvent identity defect   {:.1e}", r.resolvent_identity_defect());

    // Compare on |n| <= 4 with (K_32 - lambda)^{-1}.
    let n_modes = 4;
    let big = 32;
    let k = build_floquet(&h, big)?;
    let mut shifted = k.matrix.clone();
    for i in 0..shifted.rows() {
        shifted[(i, i)] -= lambda;
    }
    let inv = inverse(&shifted)?;
    let d = h.dim();
    let off = (big - n_modes) * d;
    let size = (2 * n_modes + 1) * d;
    let from_k: ComplexMatrix = inv.submatrix(off, off, size, size);
    let from_grid = to_mode_space(&r.matrix, n_t, d, n_modes);
    println!("grid vs Floquet inverse     {:.1e}", from_grid.max_abs_diff(&from_k));
    Ok(())
}
