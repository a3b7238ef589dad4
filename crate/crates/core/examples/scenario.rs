//! Running a scenario in-process, the way `floquet-run` does.

use floquet::scenario::{run, Scenario};
use serde_json::json;
use std::path::Path;

fn main() -> floquet::Result<()> {
    let config = json!({
        "name": "rabi_correspondence",
        "task": "correspondence",
        "model": {"kind": "rabi", "delta": 0.7, "v": 0.4},
        "parameters": {"n_modes": 16, "steps_per_period": 256}
    });
    let scenario = Scenario::from_value(config, Path::new("."), None)?;
    let report = run(&scenario, None);
    println!("exit code {}", report.exit_code());
    println!("{}", serde_json::to_string_pretty(&report.payload()).unwrap());
    Ok(())
}
