//! The free periodic resolvent on a time grid, checked against plane waves and
//! the defining differential equation.

use floquet::numerics::inverse;
use floquet::resolvent::{centered_difference_apply, FreeResolvent, TimeGridFunction};
use floquet::{c64, ComplexMatrix};
use std::f64::consts::TAU;

fn main() -> floquet::Result<()> {
    let h0 = ComplexMatrix::from_real_diagonal(&[0.5, -0.5]);
    let lambda = c64(0.3, 1.0);
    let v = [c64(1.0, 0.0), c64(0.0, -0.5)];

    let r0 = FreeResolvent::new(&h0, lambda, 64)?;
    for n in [-3i64, 0, 5] {
        let out = r0.apply(&TimeGridFunction::plane_wave(64, n, &v));
        let mut shifted = h0.clone();
        for i in 0..2 {
            shifted[(i, i)] += c64(TAU * n as f64, 0.0) - lambda;
        }
        let expected = TimeGridFunction::plane_wave(64, n, &inverse(&shifted)?.mul_vec(&v));
        println!("plane wave n = {n:2}: {:.1e}", out.max_abs_diff(&expected));
    }

    // Centred differences recover -i u' + H0 u - lambda u = f to second order.
    let f = |t: f64| vec![c64((TAU * t).sin().powi(3), 0.0), c64(0.0, (2.0 * TAU * t).cos())];
    for n_t in [64, 128, 256] {
        let src = TimeGridFunction::from_fn(n_t, 2, f);
        let u = FreeResolvent::new(&h0, lambda, n_t)?.apply(&src);
        let back = centered_difference_apply(&h0, lambda, &u);
        println!("N_t = {n_t:3}: residual {:.2e}", back.max_abs_diff(&src));
    }
    Ok(())
}
