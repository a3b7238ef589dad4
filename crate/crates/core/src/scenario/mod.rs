//! JSON scenario files: typed configuration, task runners, reports and sweeps.

mod config;
mod run;
mod tasks;

pub use config::{
    BoundParams, CorrespondenceParams, FloquetParams, Format, ModelSpec, MonodromyParams, OutputSpec, ResolventParams,
    Scenario, ScenarioConfig, SweepSpec, Task, TaskKind, WaveParams, FLEET_NAMES,
};
pub use run::{
    config_hash, exit_code, report_csv, run, run_configs, run_scenario, set_dotted, ErrorReport, Outcome, Provenance,
    Report, RunOptions, Status, SweepReport, SweepRow, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION,
};
pub use tasks::{
    execute, headline_keys, BoundStatesReport, CorrespondenceTaskReport, FloquetSpectrumReport, MonodromyReport,
    ResolventCheckReport, TaskReport,
};
