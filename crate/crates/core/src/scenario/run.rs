use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::{Format, Scenario, ScenarioConfig};
use super::tasks::{execute, headline_keys, TaskReport};
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code of an error: 2 for bad input, 3 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Singular { .. }
        | Error::EigenNoConvergence { .. }
        | Error::NoConvergence(_)
        | Error::NotUnitary { .. }
        | Error::WindowAtEdge(_)
        | Error::NearThreshold { .. } => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotSquare { .. } => "not_square",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::NotHermitian { .. } => "not_hermitian",
        Error::NotUnitary { .. } => "not_unitary",
        Error::Singular { .. } => "singular",
        Error::EigenNoConvergence { .. } => "eigen_no_convergence",
        Error::InvalidModel(_) => "invalid_model",
        Error::InvalidGrid(_) => "invalid_grid",
        Error::RealSpectralParameter { .. } => "real_spectral_parameter",
        Error::TruncationTooSmall { .. } => "truncation_too_small",
        Error::WindowAtEdge(_) => "window_at_edge",
        Error::NearThreshold { .. } => "near_threshold",
        Error::NoConvergence(_) => "no_convergence",
        Error::InvalidProbes(_) => "invalid_probes",
        Error::Validation { .. } => "validation",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ErrorReport {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
    pub exit_code: i32,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        let field = match e {
            Error::Validation { field, .. } => Some(field.clone()),
            _ => None,
        };
        Self {
            kind: error_kind(e).to_string(),
            field,
            message: e.to_string(),
            exit_code: exit_code(e),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON of the normalized configuration.
    pub config_hash: String,
    /// The configuration with defaults filled in.
    pub config: Value,
    pub version: String,
    pub seed: Option<u64>,
}

/// Outcome of one scenario run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub task: String,
    pub status: Status,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TaskReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    pub wall_time_s: f64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(EXIT_OK, |e| e.exit_code)
    }

    /// The report without its timing; identical across runs of the same input.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize to JSON");
        if let Value::Object(m) = &mut v {
            m.remove("wall_time_s");
        }
        v
    }
}

/// Canonical JSON (sorted keys, shortest round-trip floats) and its SHA-256.
pub fn config_hash(config: &ScenarioConfig) -> (Value, String) {
    let value = serde_json::to_value(config).expect("configs serialize to JSON");
    let text = serde_json::to_string(&value).expect("values serialize to JSON");
    (value, hex::encode(Sha256::digest(text.as_bytes())))
}

fn provenance(config: &ScenarioConfig, seed: Option<u64>) -> Provenance {
    let (config, config_hash) = config_hash(config);
    Provenance {
        config_hash,
        config,
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
    }
}

/// Runs a validated scenario. Numerical failures are captured in the report.
pub fn run(s: &Scenario, seed: Option<u64>) -> Report {
    let clock = Instant::now();
    let outcome = execute(s);
    let wall_time_s = clock.elapsed().as_secs_f64();
    let (status, result, error) = match outcome {
        Ok(r) => (Status::Ok, Some(r), None),
        Err(e) => (Status::Failed, None, Some(ErrorReport::from(&e))),
    };
    Report {
        scenario: s.name().to_string(),
        task: s.kind().as_str().to_string(),
        status,
        provenance: provenance(&s.config, seed),
        result,
        error,
        wall_time_s,
    }
}

/// Writes `value` at a dotted path (`parameters.lambda.1`), creating objects as needed.
pub fn set_dotted(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let bad = |msg: String| Error::validation("sweep.parameter", msg);
    if path.is_empty() {
        return Err(bad("path is empty".into()));
    }
    let mut cur = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (k, seg) in segments.iter().enumerate() {
        let last = k + 1 == segments.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), value);
                    return Ok(());
                }
                map.entry(seg.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let len = items.len();
                let idx: usize = seg
                    .parse()
                    .map_err(|_| bad(format!("`{seg}` in `{path}` must index an array")))?;
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| bad(format!("index {idx} in `{path}` is out of range for length {len}")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(bad(format!("`{path}` passes through a scalar at `{seg}`"))),
        };
    }
    unreachable!("the last segment returns")
}

/// One row of a parameter sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: Value,
    pub report: Report,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: String,
    pub task: String,
    pub parameter: String,
    pub provenance: Provenance,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn exit_code(&self) -> i32 {
        self.rows.iter().map(|r| r.report.exit_code()).max().unwrap_or(EXIT_OK)
    }

    /// Headline table: `parameter, status, <headline>, wall_time_s, error`.
    pub fn to_csv(&self) -> Result<String> {
        let kind = self.rows.first().map(|r| r.report.task.clone()).unwrap_or_default();
        let keys = self
            .rows
            .iter()
            .find_map(|r| r.report.result.as_ref().map(|t| headline_keys(t.kind())))
            .unwrap_or(&[]);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.parameter.clone(), "status".into()];
        header.extend(keys.iter().map(|k| k.to_string()));
        header.extend(["wall_time_s".to_string(), "error".to_string()]);
        w.write_record(&header).map_err(csv_error)?;
        for row in &self.rows {
            let r = &row.report;
            debug_assert_eq!(r.task, kind);
            let mut rec = vec![compact(&row.value), status_str(r.status).to_string()];
            match &r.result {
                Some(t) => rec.extend(t.headline().into_iter().map(|(_, v)| number(v))),
                None => rec.extend(keys.iter().map(|_| String::new())),
            }
            rec.push(number(r.wall_time_s));
            rec.push(r.error.as_ref().map(|e| e.message.clone()).unwrap_or_default());
            w.write_record(&rec).map_err(csv_error)?;
        }
        finish_csv(w)
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Failed => "failed",
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Headline CSV of a single report.
pub fn report_csv(r: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let keys = r.result.as_ref().map(|t| headline_keys(t.kind())).unwrap_or(&[]);
    let mut header = vec!["scenario".to_string(), "status".to_string()];
    header.extend(keys.iter().map(|k| k.to_string()));
    header.extend(["wall_time_s".to_string(), "error".to_string()]);
    w.write_record(&header).map_err(csv_error)?;
    let mut rec = vec![r.scenario.clone(), status_str(r.status).to_string()];
    if let Some(t) = &r.result {
        rec.extend(t.headline().into_iter().map(|(_, v)| number(v)));
    }
    rec.push(number(r.wall_time_s));
    rec.push(r.error.as_ref().map(|e| e.message.clone()).unwrap_or_default());
    w.write_record(&rec).map_err(csv_error)?;
    finish_csv(w)
}

/// What one configuration file produced.
#[derive(Clone, Debug)]
pub enum Outcome {
    Single(Report),
    Sweep(SweepReport),
    /// The file did not validate.
    Invalid {
        config: PathBuf,
        error: ErrorReport,
    },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Single(r) => r.exit_code(),
            Outcome::Sweep(s) => s.exit_code(),
            Outcome::Invalid { error, .. } => error.exit_code,
        }
    }

    /// One-line description for the terminal.
    pub fn summary(&self) -> String {
        match self {
            Outcome::Single(r) => match &r.error {
                None => format!("{}: ok ({:.2} s)", r.scenario, r.wall_time_s),
                Some(e) => format!("{}: failed: {}", r.scenario, e.message),
            },
            Outcome::Sweep(s) => {
                let ok = s.rows.iter().filter(|r| r.report.status == Status::Ok).count();
                format!(
                    "{}: sweep over {}, {ok}/{} rows ok",
                    s.scenario,
                    s.parameter,
                    s.rows.len()
                )
            }
            Outcome::Invalid { config, error } => format!("{}: {}", config.display(), error.message),
        }
    }
}

/// Settings shared by every configuration of one invocation.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub jobs: usize,
}

enum Plan {
    Single(Box<Scenario>),
    Sweep {
        base: Box<Scenario>,
        rows: Vec<(Value, std::result::Result<Box<Scenario>, ErrorReport>)>,
    },
}

fn plan(path: &Path, seed: Option<u64>) -> Result<Plan> {
    let base = Scenario::load(path, seed)?;
    let Some(sweep) = base.config.sweep.clone() else {
        return Ok(Plan::Single(Box::new(base)));
    };
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut raw = serde_json::to_value(&base.config)?;
    if let Value::Object(m) = &mut raw {
        m.remove("sweep");
    }
    // Reject bad paths up front, so a typo is a validation failure and not a column of failed rows.
    set_dotted(&mut raw.clone(), &sweep.parameter, sweep.values[0].clone())?;
    let rows = sweep
        .values
        .iter()
        .map(|v| {
            let mut cfg = raw.clone();
            set_dotted(&mut cfg, &sweep.parameter, v.clone()).expect("path checked on the first value");
            let s = Scenario::from_value(cfg, &dir, seed)
                .map(Box::new)
                .map_err(|e| ErrorReport::from(&e));
            (v.clone(), s)
        })
        .collect();
    Ok(Plan::Sweep {
        base: Box::new(base),
        rows,
    })
}

/// Runs every configuration, fanning scenarios and sweep rows out over `jobs` threads,
/// and writes one output file per configuration into `out`.
pub fn run_configs(configs: &[PathBuf], opts: &RunOptions) -> Vec<Outcome> {
    let plans: Vec<std::result::Result<Plan, ErrorReport>> = configs
        .iter()
        .map(|p| plan(p, opts.seed).map_err(|e| ErrorReport::from(&e)))
        .collect();

    // Flatten runnable units as (plan, row) pairs; `row` is None for single scenarios.
    let mut units: Vec<(usize, Option<usize>)> = Vec::new();
    for (i, p) in plans.iter().enumerate() {
        match p {
            Ok(Plan::Single(_)) => units.push((i, None)),
            Ok(Plan::Sweep { rows, .. }) => units.extend((0..rows.len()).map(|r| (i, Some(r)))),
            Err(_) => {}
        }
    }
    let results: Vec<Mutex<Option<Report>>> = units.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..opts.jobs.max(1).min(units.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, row)) = units.get(k) else { break };
                let report = match (&plans[i], row) {
                    (Ok(Plan::Single(s)), None) => run(s, opts.seed),
                    (Ok(Plan::Sweep { base, rows }), Some(r)) => match &rows[r].1 {
                        Ok(s) => run(s, opts.seed),
                        Err(e) => Report {
                            scenario: base.name().to_string(),
                            task: base.kind().as_str().to_string(),
                            status: Status::Failed,
                            provenance: provenance(&base.config, opts.seed),
                            result: None,
                            error: Some(e.clone()),
                            wall_time_s: 0.0,
                        },
                    },
                    _ => unreachable!("units follow the plans"),
                };
                *results[k].lock().expect("no panics while holding the lock") = Some(report);
            });
        }
    });
    let mut reports = results
        .into_iter()
        .map(|m| m.into_inner().expect("lock is not poisoned").expect("every unit ran"));

    let mut outcomes = Vec::new();
    let mut stems: Vec<String> = Vec::new();
    for (path, p) in configs.iter().zip(plans) {
        let outcome = match p {
            Err(error) => Outcome::Invalid {
                config: path.clone(),
                error,
            },
            Ok(Plan::Single(_)) => Outcome::Single(reports.next().expect("one report per unit")),
            Ok(Plan::Sweep { base, rows }) => {
                let sweep = base.config.sweep.as_ref().expect("sweep plans carry a sweep");
                Outcome::Sweep(SweepReport {
                    scenario: base.name().to_string(),
                    task: base.kind().as_str().to_string(),
                    parameter: sweep.parameter.clone(),
                    provenance: provenance(&base.config, opts.seed),
                    rows: rows
                        .into_iter()
                        .map(|(value, _)| SweepRow {
                            value,
                            report: reports.next().expect("one report per unit"),
                        })
                        .collect(),
                })
            }
        };
        let outcome = match write_outcome(path, outcome, &opts.out, &mut stems) {
            Ok(o) => o,
            Err(e) => Outcome::Invalid {
                config: path.clone(),
                error: ErrorReport::from(&e),
            },
        };
        outcomes.push(outcome);
    }
    outcomes
}

fn write_outcome(path: &Path, outcome: Outcome, out: &Path, stems: &mut Vec<String>) -> Result<Outcome> {
    let (stem, format) = match &outcome {
        Outcome::Invalid { .. } => return Ok(outcome),
        Outcome::Single(r) => stem_and_format(&r.provenance)?,
        Outcome::Sweep(s) => stem_and_format(&s.provenance)?,
    };
    if stems.contains(&stem) {
        return Err(Error::validation(
            "output.file",
            format!(
                "{}: output stem `{stem}` is already used by another configuration",
                path.display()
            ),
        ));
    }
    stems.push(stem.clone());
    std::fs::create_dir_all(out)?;
    match (&outcome, format) {
        (Outcome::Single(r), Format::Json) => write_json(&out.join(format!("{stem}.json")), r)?,
        (Outcome::Single(r), Format::Csv) => std::fs::write(out.join(format!("{stem}.csv")), report_csv(r)?)?,
        (Outcome::Sweep(s), format) => {
            std::fs::write(out.join(format!("{stem}.csv")), s.to_csv()?)?;
            if format == Format::Json {
                write_json(&out.join(format!("{stem}.json")), s)?;
            }
        }
        (Outcome::Invalid { .. }, _) => unreachable!("handled above"),
    }
    Ok(outcome)
}

fn stem_and_format(p: &Provenance) -> Result<(String, Format)> {
    let config: ScenarioConfig = serde_json::from_value(p.config.clone())?;
    let stem = config.output.file.clone().unwrap_or(config.name.clone());
    Ok((stem, config.output.format))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Loads, runs and writes a single configuration; the result mirrors the CLI.
pub fn run_scenario(config: &Path, out: &Path, seed: Option<u64>) -> Outcome {
    let opts = RunOptions {
        out: out.to_path_buf(),
        seed,
        jobs: 1,
    };
    run_configs(&[config.to_path_buf()], &opts)
        .pop()
        .expect("one outcome per configuration")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn dotted_paths_reach_nested_values() {
        let mut v = json!({"parameters": {"lambda": [0.0, 1.0]}, "model": {"kind": "rabi"}});
        set_dotted(&mut v, "parameters.lambda.1", json!(0.5)).unwrap();
        set_dotted(&mut v, "parameters.n_t", json!(32)).unwrap();
        set_dotted(&mut v, "model.v", json!(2.0)).unwrap();
        assert_eq!(
            v,
            json!({"parameters": {"lambda": [0.0, 0.5], "n_t": 32}, "model": {"kind": "rabi", "v": 2.0}})
        );
        assert!(set_dotted(&mut v, "parameters.lambda.7", json!(1)).is_err());
        assert!(set_dotted(&mut v, "model.kind.x", json!(1)).is_err());
        assert!(set_dotted(&mut v, "parameters.lambda.x", json!(1)).is_err());
    }

    #[test]
    fn exit_codes_split_input_from_numerics() {
        assert_eq!(exit_code(&Error::validation("x", "y")), EXIT_VALIDATION);
        assert_eq!(exit_code(&Error::InvalidModel("m".into())), EXIT_VALIDATION);
        assert_eq!(
            exit_code(&Error::RealSpectralParameter { re: 0.0, im: 0.0 }),
            EXIT_VALIDATION
        );
        assert_eq!(exit_code(&Error::NoConvergence("n".into())), EXIT_NUMERICAL);
        assert_eq!(
            exit_code(&Error::Singular {
                pivot: 0.0,
                threshold: 1.0
            }),
            EXIT_NUMERICAL
        );
        assert_eq!(
            exit_code(&Error::NearThreshold {
                candidate: 0.0,
                distance: 0.0
            }),
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn hash_is_stable_under_key_order() {
        let a = json!({"name": "r", "task": "monodromy", "model": {"kind": "rabi", "delta": 0.0, "v": 1.0}});
        let b = json!({"model": {"v": 1.0, "delta": 0.0, "kind": "rabi"}, "task": "monodromy", "name": "r"});
        let sa = Scenario::from_value(a, Path::new("."), None).unwrap();
        let sb = Scenario::from_value(b, Path::new("."), None).unwrap();
        assert_eq!(config_hash(&sa.config).1, config_hash(&sb.config).1);
    }
}
