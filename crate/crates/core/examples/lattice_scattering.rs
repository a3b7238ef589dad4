//! Stroboscopic wave operators and the S-matrix for a driven well on a ring.

use floquet::model::{build_lattice, central_window};
use floquet::propagation::{Order, PropagatorSchedule};
use floquet::scattering::{scattering_report, ScatteringOptions};

fn main() -> floquet::Result<()> {
    let sites = 256;
    let lattice = build_lattice(sites, 1.0, -2.0, 0.5, central_window(sites, 5))?;
    let sched = PropagatorSchedule::new(32, Order::Fourth)?;
    let r = scattering_report(&lattice, &sched, &ScatteringOptions::default())?;

    println!("probes: {}", r.probes.description());
    println!("iterates: {} (horizon {})", r.n_max, r.probes.horizon());
    println!("W+ converged at {:?}", r.w_plus.converged_at);
    println!("converged fraction     {:.2}", r.converged_fraction);
    println!("isometry defect        {:.1e}", r.isometry_defect);
    println!("S unitarity defect     {:.1e}", r.unitarity_defect);
    println!("intertwining defect    {:.1e}", r.intertwining_defect);
    println!("time-averaged vs W+    {:.1e}", r.averaging_difference);
    println!("S-matrix (n_out {}, n_in {}):", r.s_matrix.n_out, r.s_matrix.n_in);
    let m = &r.s_matrix.matrix;
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:.3}", m[(i, j)].norm())).collect();
        println!("  |S| {}", row.join(" "));
    }
    Ok(())
}
