//! The block operator Q(zeta) in mode space and its decay along the imaginary axis.

use floquet::model::fleet::two_harmonic_d3;
use floquet::resolvent::{block_q, grid_block_q};
use floquet::c64;

fn main() -> floquet::Result<()> {
    let h = two_harmonic_d3();
    let zeta = c64(0.4, 2.0);
    let q = block_q(&h, zeta, 6)?;
    let grid = grid_block_q(&h, zeta, 128, 6)?;
    println!("mode vs grid construction   {:.1e}", q.matrix.max_abs_diff(&grid));

    for eta in [4.0, 16.0, 64.0, 256.0] {
        let q = block_q(&h, c64(0.0, eta), 8)?;
        println!("eta = {eta:5}: ||Q|| = {:.4e}", q.norm());
    }
    Ok(())
}
