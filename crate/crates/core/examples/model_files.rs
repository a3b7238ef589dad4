//! Building a periodic Hamiltonian from harmonics, sampling it, recovering its
//! modes and round-tripping it through the JSON model format.

use floquet::model::{fourier_modes, from_json_str, to_json_string, uniform_grid, PeriodicHamiltonian};
use floquet::{c64, ComplexMatrix};

fn main() -> floquet::Result<()> {
    let h0 = ComplexMatrix::from_real_diagonal(&[0.5, -0.5]);
    let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 0.2], vec![0.2, 0.0]])?;
    let sz = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]).scale(c64(0.0, -0.1));
    let h = PeriodicHamiltonian::from_harmonics(h0, vec![(1, sx), (2, sz)], "driven qubit")?;
    println!("dim {}, harmonic support {}", h.dim(), h.mode_support());
    println!("H(0.25) hermitian defect {:.1e}", h.evaluate(0.25).hermitian_defect());

    let samples: Vec<_> = uniform_grid(16).into_iter().map(|t| (t, h.evaluate(t))).collect();
    let back = fourier_modes(&samples, 3)?;
    let err = (-3..=3).map(|n| back.full_mode(n).max_abs_diff(&h.full_mode(n))).fold(0.0, f64::max);
    println!("mode recovery from 16 samples {err:.1e}");

    let text = to_json_string(&h)?;
    let again = from_json_str(&text)?;
    println!("round trip identical: {}", text == to_json_string(&again)?);
    println!("{} bytes of JSON", text.len());
    Ok(())
}
