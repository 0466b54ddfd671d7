//! Experiment configuration, run manifests and the verification suites.

pub mod criteria;
pub mod verify;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::geometry::PointSet;

pub use criteria::{Criterion, SuiteParams};

/// Config used when a suite is run without `--config`.
pub const DEFAULT_CONFIG: &str = include_str!("../../configs/default.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleKind {
    CoreGeometry,
    Exact2d,
    McMeasure,
    Bounds,
    RobustRisk,
    Entropy,
}

impl FromStr for ModuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown module `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Required by `verify`; ignored by suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleKind>,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::Config(format!("experiment `{}` is stochastic and needs a seed", self.name))
        })
    }

    /// Sets `key` from a `key=value` override; the value is read as JSON when
    /// it parses, as a string otherwise.
    pub fn set_param(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.into()));
        self.parameters.insert(key.trim().to_string(), value);
        Ok(())
    }
}

/// Rejects any key outside `allowed`, naming the offender.
pub fn check_keys(params: &BTreeMap<String, Value>, allowed: &[&str]) -> Result<()> {
    if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Config(format!(
            "unknown parameter `{bad}` (expected one of: {})",
            allowed.join(", ")
        )));
    }
    Ok(())
}

fn type_error(key: &str, want: &str, got: &Value) -> Error {
    Error::Config(format!("parameter `{key}` must be {want}, got {got}"))
}

pub fn param_f64(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<f64>> {
    params
        .get(key)
        .map(|v| v.as_f64().ok_or_else(|| type_error(key, "a number", v)))
        .transpose()
}

pub fn param_u64(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<u64>> {
    params
        .get(key)
        .map(|v| {
            v.as_u64()
                .or_else(|| v.as_f64().filter(|f| f.fract() == 0.0 && *f >= 0.0).map(|f| f as u64))
                .ok_or_else(|| type_error(key, "a nonnegative integer", v))
        })
        .transpose()
}

pub fn param_str<'a>(params: &'a BTreeMap<String, Value>, key: &str) -> Result<Option<&'a str>> {
    params
        .get(key)
        .map(|v| v.as_str().ok_or_else(|| type_error(key, "a string", v)))
        .transpose()
}

pub fn param_vec(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<Vec<f64>>> {
    params
        .get(key)
        .map(|v| serde_json::from_value(v.clone()).map_err(|_| type_error(key, "an array of numbers", v)))
        .transpose()
}

/// An inline array of coordinate arrays, or a path to a point file.
pub fn param_points(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<PointSet>> {
    match params.get(key) {
        None => Ok(None),
        Some(Value::String(path)) => crate::io::read_point_file(Path::new(path)).map(|f| Some(f.points)),
        Some(v) => {
            let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone())
                .map_err(|_| type_error(key, "an array of points or a file path", v))?;
            PointSet::from_rows(&rows).map(Some)
        }
    }
}

pub fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing parameter `{key}`")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Euclidean,
    Gaussian,
    BrunnMinkowski,
    Epi,
    RobustRisk,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Euclidean => "euclidean",
            Suite::Gaussian => "gaussian",
            Suite::BrunnMinkowski => "brunn-minkowski",
            Suite::Epi => "epi",
            Suite::RobustRisk => "robust-risk",
            Suite::All => "all",
        }
    }

    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| {
            Error::Config(format!(
                "unknown suite `{s}` (expected euclidean, gaussian, brunn-minkowski, epi, robust-risk or all)"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub suite: String,
    pub config: ExperimentConfig,
    pub wall_time_seconds: f64,
    pub criteria: Vec<Criterion>,
    pub passed: bool,
}

impl RunManifest {
    pub fn reports(&self) -> Vec<BoundReport> {
        self.criteria
            .iter()
            .flat_map(|c| {
                c.reports.iter().cloned().map(|mut r| {
                    r.bound_name = format!("AC{}/{}", c.id, r.bound_name);
                    r
                })
            })
            .collect()
    }
}

/// Runs every criterion of `suite` with the config's parameters.
pub fn run_suite(suite: Suite, config: &ExperimentConfig, workers: usize) -> Result<RunManifest> {
    let params = SuiteParams::from_config(config, workers)?;
    let start = Instant::now();
    let mut results = Vec::new();
    for entry in criteria::CATALOG.iter().filter(|e| suite.includes(e.suite)) {
        results.push((entry.run)(&params)?);
    }
    let passed = results.iter().all(Criterion::passed);
    Ok(RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        suite: suite.name().into(),
        config: config.clone(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        criteria: results,
        passed,
    })
}
