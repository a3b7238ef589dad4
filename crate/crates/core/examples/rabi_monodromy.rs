//! Monodromy of the rotating-frame two-level drive against its closed form,
//! plus a step-doubling order study.

use floquet::model::fleet::{rabi, rabi_propagator, rabi_quasi_energies};
use floquet::propagation::{check_cocycle, check_period_shift, convergence_study, monodromy, Order, PropagatorSchedule};

fn main() -> floquet::Result<()> {
    let (delta, v) = (0.7, 0.4);
    let h = rabi(delta, v);
    let sched = PropagatorSchedule::new(256, Order::Fourth)?;
    let m = monodromy(&h, 0.0, &sched)?;

    let exact = rabi_propagator(delta, v, 1.0);
    println!("|Theta - closed form|  {:.1e}", m.theta.max_abs_diff(&exact));
    let mut q = m.quasi_energies();
    q.sort_by(f64::total_cmp);
    println!("quasi-energies         {q:.10?}");
    println!("closed form            {:.10?}", rabi_quasi_energies(delta, v));
    println!("period shift defect    {:.1e}", check_period_shift(&h, 0.3, &sched)?);
    println!("cocycle defect         {:.1e}", check_cocycle(&h, 0.0, 0.4, 1.3, &sched)?);

    for order in [Order::Second, Order::Fourth] {
        let study = convergence_study(&h, &[16, 32, 64, 128], order)?;
        let diffs: Vec<String> = study.differences.iter().map(|d| format!("{d:.2e}")).collect();
        println!("order {}: differences [{}] ratios {:.2?}", study.order, diffs.join(", "), study.ratios);
    }
    Ok(())
}
