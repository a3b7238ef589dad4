//! Quasi-energies from the truncated Floquet matrix against the monodromy eigenphases.

use floquet::floquet::{build_floquet, correspondence_with, quasi_spectrum, shift_commutation_defect};
use floquet::model::fleet::two_harmonic_d3;
use floquet::propagation::{monodromy, Order, PropagatorSchedule};

fn main() -> floquet::Result<()> {
    let h = two_harmonic_d3();
    let m = monodromy(&h, 0.0, &PropagatorSchedule::new(512, Order::Fourth)?)?;

    for n in [4, 8, 16, 32] {
        let r = correspondence_with(&h, n, &m)?;
        println!(
            "N = {n:2}: max distance {:.1e}, mode residual {:.1e}, edge eigenvalues {}",
            r.max_distance, r.mode_residual, r.edge_count
        );
    }

    let k = build_floquet(&h, 16)?;
    let d = shift_commutation_defect(&k);
    println!("[K, S] defect {:.1e}, group defect {:.1e}", d.commutator, d.max_group());
    let spec = quasi_spectrum(&k)?;
    let windowed: Vec<f64> = spec.windowed().iter().map(|&i| spec.values[i]).collect();
    println!("window {:.4?}: {windowed:.10?}", spec.window);
    Ok(())
}
