//! Single experiments described by an [`ExperimentConfig`], each producing
//! bound reports.

use std::collections::BTreeMap;

use serde_json::Value;

use super::{
    check_keys, param_f64, param_points, param_str, param_u64, param_vec, required,
    ExperimentConfig, ModuleKind,
};
use crate::bounds::{
    bound_union_in_ball, bound_union_in_cube, bound_volume_constrained, evaluate,
    packing_count_bound, BoundReport,
};
use crate::entropy::{reverse_epi_check, EstimateOptions, MethodChoice};
use crate::error::{Error, Result};
use crate::exact2d::{
    disk_union_area, disk_union_perimeter, square_union_area, square_union_perimeter,
};
use crate::geometry::{greedy_packing, squared_l2, NormKind, ParallelSetSpec, PointSet};
use crate::mc::{mc_shell_lebesgue, mc_volume, McConfig};
use crate::robust::{check_w1_domination, d_r_weighted, EmpiricalMeasure};

fn norm_param(params: &BTreeMap<String, Value>) -> Result<NormKind> {
    param_str(params, "norm")?
        .map_or(Ok(NormKind::L2), |s| s.parse())
        .map_err(|e| Error::Config(e.to_string()))
}

fn measure(params: &BTreeMap<String, Value>, points: &str, weights: &str) -> Result<EmpiricalMeasure> {
    let pts = required(param_points(params, points)?, points)?;
    match param_vec(params, weights)? {
        Some(w) => EmpiricalMeasure::new(pts, w),
        None => Ok(EmpiricalMeasure::uniform(pts)),
    }
}

/// Runs the experiment of `config.module` and returns its reports.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<Vec<BoundReport>> {
    let module = config
        .module
        .ok_or_else(|| Error::Config(format!("experiment `{}` has no module", config.name)))?;
    let p = &config.parameters;
    match module {
        ModuleKind::CoreGeometry => {
            check_keys(p, &["points", "radius", "support_radius"])?;
            let points = required(param_points(p, "points")?, "points")?;
            let r = required(param_f64(p, "radius")?, "radius")?;
            let big_r = match param_f64(p, "support_radius")? {
                Some(v) => v,
                None => {
                    let first = points.point(0);
                    points.iter().map(|x| squared_l2(x, first)).fold(0.0, f64::max).sqrt()
                }
            };
            let packing = greedy_packing(&points, r, NormKind::L2)?;
            Ok(vec![BoundReport::exact(
                "packing_count",
                packing_count_bound(points.dim(), big_r, r)?,
                packing.count as f64,
            )])
        }
        ModuleKind::Exact2d => {
            check_keys(p, &["points", "radius", "norm"])?;
            let points = required(param_points(p, "points")?, "points")?;
            let r = required(param_f64(p, "radius")?, "radius")?;
            let norm = norm_param(p)?;
            let (per, ar) = match norm {
                NormKind::L2 => (disk_union_perimeter(&points, r)?, disk_union_area(&points, r)?),
                NormKind::Linf => (square_union_perimeter(&points, r)?, square_union_area(&points, r)?),
            };
            let mut reports = vec![BoundReport::exact(
                "volume_constrained",
                bound_volume_constrained(2, r, ar)?,
                per,
            )];
            let x0 = points.point(0);
            if points.iter().all(|x| norm.distance(x, x0) <= r * (1.0 + 1e-12)) {
                let bound = match norm {
                    NormKind::L2 => bound_union_in_ball(2, r)?,
                    NormKind::Linf => bound_union_in_cube(2, r)?,
                };
                reports.push(BoundReport::within_tolerance("union_in_body", bound, per, 1e-9));
            }
            Ok(reports)
        }
        ModuleKind::McMeasure => {
            check_keys(p, &["points", "radius", "norm", "samples", "delta"])?;
            let points = required(param_points(p, "points")?, "points")?;
            let r = required(param_f64(p, "radius")?, "radius")?;
            let spec = ParallelSetSpec::new(points, norm_param(p)?, r)?;
            let seed = config.require_seed()?;
            let cfg = McConfig {
                samples: param_u64(p, "samples")?.unwrap_or(1_000_000),
                seed,
                shell_delta: param_f64(p, "delta")?,
                workers,
            };
            let vol = mc_volume(&spec, &cfg)?;
            let shell = mc_shell_lebesgue(&spec, &cfg.with_seed(crate::exec::derive_seed(seed, 1)))?;
            let bound = bound_volume_constrained(spec.dim(), r, vol.value)?;
            let bound_se = if vol.value > 0.0 { bound * vol.std_error / vol.value } else { 0.0 };
            Ok(vec![BoundReport::compare(
                "volume_constrained",
                bound,
                shell.value,
                shell.std_error.hypot(bound_se),
            )])
        }
        ModuleKind::Bounds => {
            check_keys(p, &["name", "params"])?;
            let name = required(param_str(p, "name")?, "name")?;
            let args: BTreeMap<String, String> = match p.get("params") {
                None => BTreeMap::new(),
                Some(Value::Object(map)) => map
                    .iter()
                    .map(|(k, v)| (k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string)))
                    .collect(),
                Some(other) => {
                    return Err(Error::Config(format!("parameter `params` must be an object, got {other}")))
                }
            };
            let value = evaluate(name, &args)?;
            let mut reports = Vec::new();
            match &value {
                Value::Number(n) => reports.push(BoundReport::not_compared(name, n.as_f64().unwrap_or(f64::NAN))),
                Value::Object(map) => {
                    for (k, v) in map {
                        if let Some(x) = v.as_f64() {
                            reports.push(BoundReport::not_compared(format!("{name}.{k}"), x));
                        }
                    }
                }
                _ => {}
            }
            Ok(reports)
        }
        ModuleKind::RobustRisk => {
            check_keys(p, &["mu0", "mu1", "mu0_weights", "mu1_weights", "radius"])?;
            let mu0 = measure(p, "mu0", "mu0_weights")?;
            let mu1 = measure(p, "mu1", "mu1_weights")?;
            let r = required(param_f64(p, "radius")?, "radius")?;
            let dr = d_r_weighted(&mu0, &mu1, r)?.value;
            Ok(vec![
                check_w1_domination(&mu0, &mu1, r)?,
                BoundReport::not_compared("d_r", dr),
            ])
        }
        ModuleKind::Entropy => {
            check_keys(p, &["x", "y", "x_weights", "y_weights", "smoothing", "samples", "method"])?;
            let x = measure(p, "x", "x_weights")?;
            let y = measure(p, "y", "y_weights")?;
            let r = required(param_f64(p, "smoothing")?, "smoothing")?;
            let method = match param_str(p, "method")? {
                None | Some("auto") => MethodChoice::Auto,
                Some("mc") => MethodChoice::Mc,
                Some("quadrature") => MethodChoice::Quadrature,
                Some(other) => return Err(Error::Config(format!("unknown method `{other}`"))),
            };
            let stochastic = method == MethodChoice::Mc || (method == MethodChoice::Auto && x.dim() > 1);
            let seed = if stochastic { config.require_seed()? } else { config.seed.unwrap_or(0) };
            let opts = EstimateOptions {
                samples: param_u64(p, "samples")?.unwrap_or(1_000_000),
                seed,
                workers,
                method,
                ..EstimateOptions::default()
            };
            let out = reverse_epi_check(x.points(), x.weights(), y.points(), y.weights(), r, &opts)?;
            Ok(vec![out.report])
        }
    }
}

/// Parses `PointSet` rows from a JSON value; used by tests and the CLI.
pub fn points_from_value(v: &Value) -> Result<PointSet> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_value(v.clone()).map_err(|e| Error::Config(e.to_string()))?;
    PointSet::from_rows(&rows)
}
