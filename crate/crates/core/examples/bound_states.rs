//! Bound states of a driven well found three ways: localized monodromy
//! eigenvectors, localized Floquet eigenvectors and null vectors of I + Q.

use floquet::floquet::{build_floquet, quasi_spectrum};
use floquet::model::{build_lattice, central_window};
use floquet::propagation::{fold, Order, PropagatorSchedule};
use floquet::resolvent::{bound_state_correspondence, localized_floquet_values};
use floquet::scattering::{bound_state_scan, Stroboscope, BOUND_MARGIN, BOUND_MASS};

fn main() -> floquet::Result<()> {
    let sites = 64;
    let lattice = build_lattice(sites, 1.0, -2.0, 0.5, central_window(sites, 5))?;
    let st = Stroboscope::new(&lattice, &PropagatorSchedule::new(32, Order::Fourth)?)?;

    let scan = bound_state_scan(&st, Some(4))?;
    for s in &scan.states {
        println!(
            "Theta: lambda = {:.8}  localization {:.3}  Floquet distance {:.1e}",
            s.quasi_energy,
            s.localization,
            s.floquet_distance.unwrap_or(f64::NAN)
        );
    }

    let spec = quasi_spectrum(&build_floquet(lattice.drive(), 4)?)?;
    let region: Vec<usize> = lattice.widened_support(BOUND_MARGIN).collect();
    let (lo, hi) = spec.window;
    for (v, _) in localized_floquet_values(&spec, &region, BOUND_MASS) {
        if v < lo || v >= hi {
            continue;
        }
        let verdict = bound_state_correspondence(lattice.drive(), v, 8)?;
        println!(
            "K: lambda = {:.8}  I + Q refined {:.8}  sigma_min {:.1e}  verified {}",
            fold(v),
            fold(verdict.refined),
            verdict.sigma_min,
            verdict.verified
        );
    }
    Ok(())
}
