use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use floquet::scenario::{run_configs, RunOptions};

/// Runs Floquet scenario files and writes one report per file.
#[derive(Parser, Debug)]
#[command(name = "floquet-run", version)]
struct Cli {
    /// Scenario file (JSON); repeat to run several.
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the probe seed of wave-operator scenarios.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads shared by all scenarios and sweep rows.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let opts = RunOptions {
        out: cli.out,
        seed: cli.seed,
        jobs: cli.jobs,
    };
    let outcomes = run_configs(&cli.configs, &opts);
    let mut code = 0;
    for o in &outcomes {
        let c = o.exit_code();
        if c == 0 {
            println!("{}", o.summary());
        } else {
            eprintln!("{}", o.summary());
        }
        code = code.max(c);
    }
    ExitCode::from(code as u8)
}
