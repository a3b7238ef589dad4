use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{build_lattice, central_window, fleet, read_model, LatticeModel, ModelFile, PeriodicHamiltonian};
use crate::propagation::{Order, PropagatorSchedule};
use crate::scattering::{ProbeSet, ProbeSpec, ScatteringOptions};

/// Raw scenario file. `parameters` is checked against the task's schema in [`Scenario::from_config`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub task: TaskKind,
    pub model: ModelSpec,
    #[serde(default = "empty_object")]
    pub parameters: Value,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Monodromy,
    FloquetSpectrum,
    Correspondence,
    ResolventCheck,
    WaveOperators,
    BoundStates,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Monodromy => "monodromy",
            TaskKind::FloquetSpectrum => "floquet-spectrum",
            TaskKind::Correspondence => "correspondence",
            TaskKind::ResolventCheck => "resolvent-check",
            TaskKind::WaveOperators => "wave-operators",
            TaskKind::BoundStates => "bound-states",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Circularly driven two-level system.
    Rabi {
        delta: f64,
        v: f64,
    },
    /// A named member of the built-in test fleet.
    Fleet {
        name: String,
    },
    ConstantDiagonal {
        levels: Vec<f64>,
    },
    /// Seeded random Hermitian harmonics `1..=support`.
    Random {
        dim: usize,
        support: u32,
        strength: f64,
        seed: u64,
    },
    /// Driven-well ring; the well occupies `window` sites centred on the ring.
    Lattice {
        sites: usize,
        #[serde(default = "one")]
        hopping: f64,
        well_depth: f64,
        drive_amp: f64,
        window: usize,
    },
    /// Model file, relative to the scenario file.
    File {
        path: PathBuf,
    },
    Inline {
        model: ModelFile,
    },
}

fn one() -> f64 {
    1.0
}

pub const FLEET_NAMES: [&str; 5] = [
    "rabi",
    "rabi_detuned",
    "two_harmonic_d3",
    "two_harmonic_d4",
    "constant_diagonal",
];

impl ModelSpec {
    /// Builds the Hamiltonian and, for lattices, the lattice model.
    pub fn build(&self, base: &Path) -> Result<(PeriodicHamiltonian, Option<LatticeModel>)> {
        let wrap = |e: Error| match e {
            Error::Validation { .. } => e,
            other => Error::validation("model", other.to_string()),
        };
        let h = match self {
            ModelSpec::Rabi { delta, v } => fleet::rabi(*delta, *v),
            ModelSpec::Fleet { name } => {
                let idx = FLEET_NAMES.iter().position(|n| n == name).ok_or_else(|| {
                    Error::validation(
                        "model.name",
                        format!("unknown fleet model `{name}`, expected one of {FLEET_NAMES:?}"),
                    )
                })?;
                fleet::standard_fleet().swap_remove(idx)
            }
            ModelSpec::ConstantDiagonal { levels } => {
                if levels.is_empty() {
                    return Err(Error::validation("model.levels", "needs at least one level"));
                }
                fleet::constant_diagonal(levels)
            }
            ModelSpec::Random {
                dim,
                support,
                strength,
                seed,
            } => {
                if *dim == 0 {
                    return Err(Error::validation("model.dim", "must be at least 1"));
                }
                fleet::random_model(*dim, *support, *strength, *seed)
            }
            ModelSpec::Lattice {
                sites,
                hopping,
                well_depth,
                drive_amp,
                window,
            } => {
                let lat = build_lattice(
                    *sites,
                    *hopping,
                    *well_depth,
                    *drive_amp,
                    central_window(*sites, *window),
                )
                .map_err(wrap)?;
                return Ok((lat.drive().clone(), Some(lat)));
            }
            ModelSpec::File { path } => {
                read_model(base.join(path)).map_err(|e| Error::validation("model.path", e.to_string()))?
            }
            ModelSpec::Inline { model } => model.to_hamiltonian().map_err(wrap)?,
        };
        Ok((h, None))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    /// File stem inside the output directory; defaults to the scenario name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

/// One swept parameter: a dotted path into the scenario (e.g. `parameters.n_modes`,
/// `model.drive_amp`, `parameters.lambda.1`) and its values.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonodromyParams {
    #[serde(default = "default_fine_steps")]
    pub steps_per_period: usize,
    #[serde(default = "default_order")]
    pub order: Order,
    #[serde(default)]
    pub start: f64,
    /// Step counts for an order-of-accuracy study; empty skips it.
    #[serde(default)]
    pub ladder: Vec<usize>,
    /// Times `t >= 0` at which `U(t + 1, 0) = U(t, 0) Theta` is checked.
    #[serde(default = "default_check_times")]
    pub check_times: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FloquetParams {
    #[serde(default = "default_floquet_modes")]
    pub n_modes: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceParams {
    #[serde(default = "default_correspondence_modes")]
    pub n_modes: usize,
    #[serde(default = "default_fine_steps")]
    pub steps_per_period: usize,
    #[serde(default = "default_order")]
    pub order: Order,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ResolventParams {
    /// Spectral parameter `[re, im]`, `im != 0`.
    pub lambda: [f64; 2],
    #[serde(default = "default_n_t")]
    pub n_t: usize,
    /// Mode cutoff of the block operator comparison.
    #[serde(default = "default_resolvent_modes")]
    pub n_modes: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WaveParams {
    #[serde(default = "default_lattice_steps")]
    pub steps_per_period: usize,
    #[serde(default = "default_order")]
    pub order: Order,
    #[serde(default)]
    pub probes: ProbeSpec,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default = "default_h")]
    pub averaging_h: f64,
    #[serde(default = "default_shift")]
    pub covariance_shift: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    #[serde(default = "default_lattice_steps")]
    pub steps_per_period: usize,
    #[serde(default = "default_order")]
    pub order: Order,
    /// Floquet truncation for the cross-check; `None` skips it.
    #[serde(default)]
    pub floquet_modes: Option<usize>,
    /// Mode cutoff for the `I + Q` null-vector refinement of each bound level; `None` skips it.
    #[serde(default)]
    pub resolvent_modes: Option<usize>,
}

fn default_fine_steps() -> usize {
    512
}
fn default_lattice_steps() -> usize {
    32
}
fn default_order() -> Order {
    Order::Fourth
}
fn default_check_times() -> Vec<f64> {
    vec![0.3, 1.7]
}
fn default_floquet_modes() -> usize {
    16
}
fn default_correspondence_modes() -> usize {
    32
}
fn default_n_t() -> usize {
    64
}
fn default_resolvent_modes() -> usize {
    8
}
fn default_h() -> f64 {
    1.0
}
fn default_shift() -> Option<f64> {
    Some(0.5)
}

/// Typed task parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    Monodromy(MonodromyParams),
    FloquetSpectrum(FloquetParams),
    Correspondence(CorrespondenceParams),
    ResolventCheck(ResolventParams),
    WaveOperators(WaveParams),
    BoundStates(BoundParams),
}

/// A validated scenario, ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    /// The configuration with every default filled in; re-validates to the same scenario.
    pub config: ScenarioConfig,
    pub task: Task,
    pub model: PeriodicHamiltonian,
    pub lattice: Option<LatticeModel>,
}

/// Deserializes `value`, reporting the failing path under `prefix`.
pub(crate) fn parse_at<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let field = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        Error::validation(field, e.into_inner().to_string())
    })
}

fn schedule(field: &str, steps: usize, order: Order) -> Result<PropagatorSchedule> {
    PropagatorSchedule::new(steps, order).map_err(|_| {
        Error::validation(
            format!("parameters.{field}"),
            format!("must be at least 8, got {steps}"),
        )
    })
}

fn require_lattice<'a>(lattice: &'a Option<LatticeModel>, task: TaskKind) -> Result<&'a LatticeModel> {
    lattice.as_ref().ok_or_else(|| {
        Error::validation(
            "model.kind",
            format!("task `{}` needs a `lattice` model", task.as_str()),
        )
    })
}

fn check_cutoff(field: &str, n: usize, h: &PeriodicHamiltonian) -> Result<()> {
    if n == 0 || n < h.mode_support() {
        return Err(Error::validation(
            format!("parameters.{field}"),
            format!("must be at least max(1, mode support {}), got {n}", h.mode_support()),
        ));
    }
    Ok(())
}

impl Scenario {
    /// Parses and validates a scenario file. `seed` overrides the probe seed of
    /// wave-operator tasks.
    pub fn load(path: impl AsRef<Path>, seed: Option<u64>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation("config", format!("{}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| Error::validation("config", e.to_string()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_value(value, &base, seed)
    }

    pub fn from_value(value: Value, base: &Path, seed: Option<u64>) -> Result<Self> {
        let config: ScenarioConfig = parse_at(value, "")?;
        Self::from_config(config, base, seed)
    }

    pub fn from_config(mut config: ScenarioConfig, base: &Path, seed: Option<u64>) -> Result<Self> {
        if config.name.is_empty()
            || !config
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return Err(Error::validation(
                "name",
                format!(
                    "`{}` must be non-empty and use only letters, digits, '-', '_' and '.'",
                    config.name
                ),
            ));
        }
        if let Some(stem) = &config.output.file {
            if stem.is_empty() || stem.contains(['/', '\\']) {
                return Err(Error::validation("output.file", "must be a plain file stem"));
            }
        }
        if let Some(sweep) = &config.sweep {
            if sweep.values.is_empty() {
                return Err(Error::validation("sweep.values", "needs at least one value"));
            }
        }
        let (model, lattice) = config.model.build(base)?;
        let params = config.parameters.clone();
        let task = match config.task {
            TaskKind::Monodromy => {
                let p: MonodromyParams = parse_at(params, "parameters")?;
                schedule("steps_per_period", p.steps_per_period, p.order)?;
                if !p.ladder.is_empty() {
                    if p.ladder.len() < 3 || p.ladder.windows(2).any(|w| w[1] <= w[0]) || p.ladder[0] < 8 {
                        return Err(Error::validation(
                            "parameters.ladder",
                            "needs at least three increasing step counts, each at least 8",
                        ));
                    }
                }
                if p.check_times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
                    return Err(Error::validation(
                        "parameters.check_times",
                        "times must be finite and non-negative",
                    ));
                }
                if !p.start.is_finite() {
                    return Err(Error::validation("parameters.start", "must be finite"));
                }
                Task::Monodromy(p)
            }
            TaskKind::FloquetSpectrum => {
                let p: FloquetParams = parse_at(params, "parameters")?;
                check_cutoff("n_modes", p.n_modes, &model)?;
                Task::FloquetSpectrum(p)
            }
            TaskKind::Correspondence => {
                let p: CorrespondenceParams = parse_at(params, "parameters")?;
                check_cutoff("n_modes", p.n_modes, &model)?;
                schedule("steps_per_period", p.steps_per_period, p.order)?;
                Task::Correspondence(p)
            }
            TaskKind::ResolventCheck => {
                let p: ResolventParams = parse_at(params, "parameters")?;
                if p.lambda[1] == 0.0 || !p.lambda.iter().all(|x| x.is_finite()) {
                    return Err(Error::validation(
                        "parameters.lambda",
                        "needs a finite, non-real value [re, im] with im != 0",
                    ));
                }
                check_cutoff("n_modes", p.n_modes, &model)?;
                if p.n_t < 2 * p.n_modes + 1 || p.n_t < 8 {
                    return Err(Error::validation(
                        "parameters.n_t",
                        format!(
                            "must be at least max(8, 2 n_modes + 1 = {}), got {}",
                            2 * p.n_modes + 1,
                            p.n_t
                        ),
                    ));
                }
                Task::ResolventCheck(p)
            }
            TaskKind::WaveOperators => {
                let lat = require_lattice(&lattice, config.task)?;
                let mut p: WaveParams = parse_at(params, "parameters")?;
                if seed.is_some() {
                    p.probes.seed = seed;
                }
                schedule("steps_per_period", p.steps_per_period, p.order)?;
                let probes = ProbeSet::incoming(lat, &p.probes)
                    .map_err(|e| Error::validation("parameters.probes", e.to_string()))?;
                if let Some(n) = p.n_max {
                    if n == 0 || n > probes.horizon() {
                        return Err(Error::validation(
                            "parameters.n_max",
                            format!("must lie in [1, {}] (wrap-around horizon), got {n}", probes.horizon()),
                        ));
                    }
                }
                if !(p.averaging_h > 0.0 && p.averaging_h <= 1.0) {
                    return Err(Error::validation("parameters.averaging_h", "must lie in (0, 1]"));
                }
                if let Some(s) = p.covariance_shift {
                    if !(s > 0.0 && s < 1.0) {
                        return Err(Error::validation("parameters.covariance_shift", "must lie in (0, 1)"));
                    }
                }
                Task::WaveOperators(p)
            }
            TaskKind::BoundStates => {
                require_lattice(&lattice, config.task)?;
                let p: BoundParams = parse_at(params, "parameters")?;
                schedule("steps_per_period", p.steps_per_period, p.order)?;
                if let Some(n) = p.floquet_modes {
                    check_cutoff("floquet_modes", n, &model)?;
                }
                if let Some(n) = p.resolvent_modes {
                    check_cutoff("resolvent_modes", n, &model)?;
                }
                Task::BoundStates(p)
            }
        };
        config.parameters = task.parameters_value();
        Ok(Self {
            config,
            task,
            model,
            lattice,
        })
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn kind(&self) -> TaskKind {
        self.config.task
    }

    pub fn output_stem(&self) -> &str {
        self.config.output.file.as_deref().unwrap_or(&self.config.name)
    }
}

impl Task {
    fn parameters_value(&self) -> Value {
        let v = match self {
            Task::Monodromy(p) => serde_json::to_value(p),
            Task::FloquetSpectrum(p) => serde_json::to_value(p),
            Task::Correspondence(p) => serde_json::to_value(p),
            Task::ResolventCheck(p) => serde_json::to_value(p),
            Task::WaveOperators(p) => serde_json::to_value(p),
            Task::BoundStates(p) => serde_json::to_value(p),
        };
        v.expect("parameter structs serialize to JSON")
    }
}

impl WaveParams {
    pub fn options(&self) -> ScatteringOptions {
        ScatteringOptions {
            probes: self.probes.clone(),
            n_max: self.n_max,
            averaging_h: self.averaging_h,
            covariance_shift: self.covariance_shift,
            floquet_modes: None,
        }
    }
}
