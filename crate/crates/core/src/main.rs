use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use parset::bounds::{self, BoundReport};
use parset::entropy::{reverse_epi_check, EstimateOptions, MethodChoice};
use parset::error::{Error, Result};
use parset::exact2d;
use parset::exec::default_workers;
use parset::harness::{self, verify, ExperimentConfig, Suite};
use parset::io::{fmt_float, read_point_file, write_reports_csv, write_table_csv, PointFile};
use parset::mc::{self, McConfig};
use parset::robust::{self, ConvergenceConfig, EmpiricalMeasure};
use parset::{NormKind, ParallelSetSpec, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    Volume,
    Shell,
    Gshell,
    Kneser,
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Disk,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Mc,
    Quadrature,
}

#[derive(Parser)]
#[command(name = "parset", version, about = "Parallel-set measures, reverse isoperimetric bounds and robust-risk checks")]
struct Cli {
    /// Seed for every stochastic computation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (PARSET_WORKERS overrides).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; a directory for `suite`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact perimeter (and area) of a planar union of disks or squares.
    Exact2d {
        #[arg(long, value_enum, default_value_t = Shape::Disk)]
        shape: Shape,
        /// Point file of centres (CSV or JSON).
        #[arg(long)]
        centers: PathBuf,
        #[arg(long)]
        radius: f64,
        /// Also report the enclosed area.
        #[arg(long)]
        area: bool,
        /// Write the boundary arcs or segments here as CSV.
        #[arg(long)]
        boundary_out: Option<PathBuf>,
        /// Also test star-shapedness from this point (`x,y`).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        star_from: Option<Vec<f64>>,
        #[arg(long, default_value_t = exact2d::DEFAULT_RAYS)]
        rays: usize,
    },
    /// Monte Carlo measures described by a JSON spec file.
    Mc {
        #[arg(long, value_enum, default_value_t = Op::Volume)]
        op: Op,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Shell width.
        #[arg(long)]
        delta: Option<f64>,
        /// Standard deviation of the Gaussian measure.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// List or evaluate closed-form bounds.
    Bounds {
        #[arg(long)]
        list: bool,
        #[arg(long, value_name = "NAME")]
        eval: Option<String>,
        /// `k=v` pairs, comma separated.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Run one experiment config and report its bounds.
    Verify {
        #[arg(long, visible_alias = "config")]
        experiment: PathBuf,
    },
    /// Adversarial transport cost between two empirical measures.
    Dr {
        #[arg(long)]
        mu0: PathBuf,
        #[arg(long)]
        mu1: PathBuf,
        #[arg(long)]
        radius: f64,
        /// Use file weights (max-flow) instead of uniform matching.
        #[arg(long)]
        weighted: bool,
    },
    /// Finite-sample convergence experiment for the transport cost.
    DrConverge {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reverse entropy power inequality for two smoothed discrete laws.
    Epi {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Variance of the Gaussian smoothing.
        #[arg(long)]
        smoothing: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Run a verification suite.
    Suite {
        /// euclidean, gaussian, brunn-minkowski, epi, robust-risk or all.
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// `k=v` parameter override; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
    },
}

/// Error carrying the process exit code.
enum Failure {
    Checks,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_pairs(out: Option<&Path>, format: Format, pairs: &[(&str, Value)]) -> Result<()> {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, Value> =
                pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            write_json(out, &Value::Object(map))
        }
        Format::Csv => {
            let header: Vec<&str> = pairs.iter().map(|p| p.0).collect();
            let row = pairs
                .iter()
                .map(|(_, v)| match v {
                    Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt_float),
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect();
            write_table_csv(output(out)?, &header, &[row])
        }
    }
}

fn need_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::Config("this command is stochastic: pass --seed".into()))
}

fn load_measure(path: &Path, weighted: bool) -> Result<EmpiricalMeasure> {
    let PointFile { points, weights } = read_point_file(path)?;
    match (weighted, weights) {
        (true, Some(w)) => EmpiricalMeasure::new(points, w),
        _ => Ok(EmpiricalMeasure::uniform(points)),
    }
}

fn reports_out(out: Option<&Path>, format: Format, reports: &[BoundReport]) -> Result<bool> {
    match format {
        Format::Csv => write_reports_csv(output(out)?, reports)?,
        Format::Json => write_json(out, &serde_json::to_value(reports)?)?,
    }
    Ok(reports.iter().all(BoundReport::passed))
}

type Table = (f64, f64, &'static [&'static str], Vec<Vec<String>>);

/// Perimeter, area and the boundary pieces as CSV rows.
fn boundary_table(shape: Shape, centers: &PointSet, radius: f64) -> Result<Table> {
    Ok(match shape {
        Shape::Disk => {
            let dec = exact2d::disk_union_boundary(centers, radius)?;
            let rows = dec
                .arcs
                .iter()
                .map(|a| {
                    let c = dec.centers.point(a.center_index);
                    vec![
                        a.center_index.to_string(),
                        fmt_float(c[0]),
                        fmt_float(c[1]),
                        fmt_float(a.theta_start),
                        fmt_float(a.theta_end),
                        fmt_float(a.angle() * radius),
                    ]
                })
                .collect();
            (dec.perimeter(), dec.area(), &["center_index", "cx", "cy", "theta_start", "theta_end", "length"], rows)
        }
        Shape::Square => {
            let dec = exact2d::square_union_boundary(centers, radius)?;
            let rows = dec
                .segments
                .iter()
                .map(|s| {
                    vec![
                        s.square_index.to_string(),
                        format!("{:?}", s.orientation).to_lowercase(),
                        fmt_float(s.fixed_coord),
                        fmt_float(s.span_start),
                        fmt_float(s.span_end),
                        s.outward_sign.to_string(),
                    ]
                })
                .collect();
            (dec.perimeter(), dec.area(), &["square_index", "orientation", "fixed", "start", "end", "outward_sign"], rows)
        }
    })
}

const SET_KEYS: &[&str] = &["points", "norm", "radius"];
const HALFSPACE_KEYS: &[&str] = &["normal", "offset"];
const KNESER_KEYS: &[&str] = &["points", "norm", "inner", "outer", "t"];
const ANGLE_KEYS: &[&str] = &["axis", "half_angle", "apex"];

/// Reads an `mc` spec file; relative point-file paths resolve against it.
fn load_spec(path: &Path) -> Result<BTreeMap<String, Value>> {
    let text = std::fs::read_to_string(path)?;
    let mut map: BTreeMap<String, Value> = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: line {}: {e}", path.display(), e.line())))?;
    if let Some(Value::String(p)) = map.get("points") {
        let p = Path::new(p);
        if p.is_relative() {
            let joined = path.parent().unwrap_or(Path::new(".")).join(p);
            map.insert("points".into(), Value::String(joined.to_string_lossy().into_owned()));
        }
    }
    Ok(map)
}

fn spec_set(map: &BTreeMap<String, Value>) -> Result<ParallelSetSpec> {
    let norm: NormKind = harness::param_str(map, "norm")?.unwrap_or("l2").parse()?;
    let points = harness::required(harness::param_points(map, "points")?, "points")?;
    ParallelSetSpec::new(points, norm, harness::required(harness::param_f64(map, "radius")?, "radius")?)
}

fn run_mc(op: Op, path: &Path, cfg: &McConfig, sigma: f64) -> Result<Vec<(&'static str, Value)>> {
    use harness::{check_keys, param_f64, param_points, param_str, param_vec, required};
    let map = load_spec(path)?;
    let basic = |est: mc::MeasureEstimate| {
        vec![("value", json!(est.value)), ("std_error", json!(est.std_error)), ("samples", json!(est.samples_used))]
    };
    Ok(match op {
        Op::Volume => {
            check_keys(&map, SET_KEYS)?;
            basic(mc::mc_volume(&spec_set(&map)?, cfg)?)
        }
        Op::Shell => {
            check_keys(&map, SET_KEYS)?;
            basic(mc::mc_shell_lebesgue(&spec_set(&map)?, cfg)?)
        }
        Op::Gshell if map.contains_key("normal") => {
            check_keys(&map, HALFSPACE_KEYS)?;
            let h = mc::Halfspace::new(required(param_vec(&map, "normal")?, "normal")?, param_f64(&map, "offset")?.unwrap_or(0.0))?;
            basic(mc::mc_gaussian_shell(&h, cfg, sigma)?)
        }
        Op::Gshell => {
            check_keys(&map, SET_KEYS)?;
            basic(mc::mc_gaussian_shell(&spec_set(&map)?, cfg, sigma)?)
        }
        Op::Kneser => {
            check_keys(&map, KNESER_KEYS)?;
            let norm: NormKind = param_str(&map, "norm")?.unwrap_or("l2").parse()?;
            let est = mc::kneser_shells(
                &required(param_points(&map, "points")?, "points")?,
                norm,
                required(param_f64(&map, "inner")?, "inner")?,
                required(param_f64(&map, "outer")?, "outer")?,
                required(param_f64(&map, "t")?, "t")?,
                cfg,
            )?;
            vec![
                ("value", json!(est.lhs.value - est.scale * est.rhs.value)),
                ("std_error", json!(est.diff_std_error)),
                ("samples", json!(cfg.samples)),
                ("lhs", json!(est.lhs.value)),
                ("rhs_scaled", json!(est.scale * est.rhs.value)),
            ]
        }
        Op::Angle => {
            check_keys(&map, ANGLE_KEYS)?;
            let cap = mc::SphericalCap::new(
                required(param_vec(&map, "axis")?, "axis")?,
                required(param_f64(&map, "half_angle")?, "half_angle")?,
            )?;
            let apex = required(param_vec(&map, "apex")?, "apex")?;
            let cmp = mc::compare_solid_angles(&apex, &cap, cfg)?;
            // delta method; dropping the positive covariance overstates the error
            let ratio = cmp.ratio();
            let (sa, sc) = (cmp.at_apex.std_error, cmp.at_center.std_error);
            let se = (sa * sa + ratio * ratio * sc * sc).sqrt() / cmp.at_center.value;
            vec![
                ("value", json!(ratio)),
                ("std_error", json!(se)),
                ("samples", json!(cfg.samples)),
                ("at_apex", json!(cmp.at_apex.value)),
                ("at_center", json!(cmp.at_center.value)),
            ]
        }
    })
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let workers = cli.workers.unwrap_or_else(default_workers);
    let out = cli.out.as_deref();
    let format = cli.format.unwrap_or(match cli.command {
        Command::Verify { .. } | Command::DrConverge { .. } | Command::Suite { .. } => Format::Csv,
        _ => Format::Json,
    });
    match cli.command {
        Command::Exact2d { shape, centers, radius, area, boundary_out, star_from, rays } => {
            let centers = read_point_file(&centers)?.points;
            let star = match star_from {
                Some(v) if v.len() == 2 => Some(exact2d::star_shaped_check(&centers, radius, [v[0], v[1]], rays)?),
                Some(_) => return Err(Error::Config("--star-from takes `x,y`".into()).into()),
                None => None,
            };
            let (perimeter, enclosed, header, rows) = boundary_table(shape, &centers, radius)?;
            if let Some(path) = boundary_out {
                write_table_csv(BufWriter::new(File::create(path)?), header, &rows)?;
            }
            let mut pairs = vec![("perimeter", json!(perimeter))];
            if area {
                pairs.push(("area", json!(enclosed)));
            }
            pairs.push(("pieces", json!(rows.len())));
            if let Some(s) = star {
                pairs.push(("star_shaped", json!(s.star_shaped)));
            }
            write_pairs(out, format, &pairs)?;
        }
        Command::Mc { op, spec, samples, delta, sigma } => {
            let cfg = McConfig { samples, seed: need_seed(cli.seed)?, shell_delta: delta, workers };
            let pairs = run_mc(op, &spec, &cfg, sigma)?;
            write_pairs(out, format, &pairs)?;
        }
        Command::Bounds { list, eval, params } => {
            if list || eval.is_none() {
                let rows: Vec<Vec<String>> = bounds::CATALOG
                    .iter()
                    .map(|b| vec![b.name.into(), b.params.join(" "), b.formula.into()])
                    .collect();
                match format {
                    Format::Csv => write_table_csv(output(out)?, &["name", "params", "formula"], &rows)?,
                    Format::Json => write_json(
                        out,
                        &Value::Array(
                            bounds::CATALOG
                                .iter()
                                .map(|b| json!({"name": b.name, "params": b.params, "formula": b.formula}))
                                .collect(),
                        ),
                    )?,
                }
            }
            if let Some(name) = eval {
                let mut args = BTreeMap::new();
                for p in params {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("expected k=v, got `{p}`")))?;
                    args.insert(k.trim().to_string(), v.trim().to_string());
                }
                let value = bounds::evaluate(&name, &args)?;
                match (&value, format) {
                    (Value::Object(map), Format::Csv) => {
                        let pairs: Vec<(&str, Value)> = map
                            .iter()
                            .filter(|(_, v)| !v.is_array())
                            .map(|(k, v)| (k.as_str(), v.clone()))
                            .collect();
                        write_pairs(out, format, &pairs)?;
                    }
                    (Value::Number(_), Format::Csv) => write_pairs(out, format, &[("name", json!(name)), ("value", value.clone())])?,
                    _ => write_json(out, &value)?,
                }
            }
        }
        Command::Verify { experiment } => {
            let mut cfg = ExperimentConfig::load(&experiment)?;
            if cli.seed.is_some() {
                cfg.seed = cli.seed;
            }
            let reports = verify::run_experiment(&cfg, workers)?;
            let target = out.map(Path::to_path_buf).or(cfg.output_path.clone());
            if !reports_out(target.as_deref(), format, &reports)? {
                return Err(Failure::Checks);
            }
        }
        Command::Dr { mu0, mu1, radius, weighted } => {
            let a = load_measure(&mu0, weighted)?;
            let b = load_measure(&mu1, weighted)?;
            let res = if weighted {
                robust::d_r_weighted(&a, &b, radius)?
            } else {
                robust::d_r_uniform(a.points(), b.points(), radius)?
            };
            let risk = robust::robust_risk(res.value)?;
            match format {
                Format::Json => write_json(
                    out,
                    &json!({"d_r": res.value, "robust_risk": risk, "radius": radius, "certificate": res.certificate}),
                )?,
                Format::Csv => write_pairs(
                    out,
                    format,
                    &[("d_r", json!(res.value)), ("robust_risk", json!(risk)), ("radius", json!(radius))],
                )?,
            }
        }
        Command::DrConverge { config } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg: ConvergenceConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let table = robust::convergence_experiment(&cfg, workers)?;
            match format {
                Format::Json => write_json(out, &serde_json::to_value(&table).map_err(Error::from)?)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = table
                        .rows
                        .iter()
                        .map(|r| vec![r.n.to_string(), r.trial.to_string(), fmt_float(r.d_r), fmt_float(r.abs_dev)])
                        .collect();
                    write_table_csv(output(out)?, &["n", "trial", "d_r", "abs_dev"], &rows)?;
                }
            }
        }
        Command::Epi { x, y, smoothing, samples, method } => {
            let fx = load_measure(&x, true)?;
            let fy = load_measure(&y, true)?;
            let method = match method {
                Method::Auto => MethodChoice::Auto,
                Method::Mc => MethodChoice::Mc,
                Method::Quadrature => MethodChoice::Quadrature,
            };
            let stochastic = method == MethodChoice::Mc || (method == MethodChoice::Auto && fx.dim() > 1);
            let seed = if stochastic { need_seed(cli.seed)? } else { cli.seed.unwrap_or(0) };
            let opts = EstimateOptions { samples, seed, workers, method, ..EstimateOptions::default() };
            let res = reverse_epi_check(fx.points(), fx.weights(), fy.points(), fy.weights(), smoothing, &opts)?;
            let passed = res.report.passed();
            write_pairs(
                out,
                format,
                &[
                    ("h_x", json!(res.h_x.value)),
                    ("h_y", json!(res.h_y.value)),
                    ("h_sum", json!(res.h_sum.value)),
                    ("bound", json!(res.bound)),
                    ("slack", json!(res.report.slack)),
                    ("verdict", json!(res.report.verdict.to_string())),
                ],
            )?;
            if !passed {
                return Err(Failure::Checks);
            }
        }
        Command::Suite { suite, config, params } => {
            let suite: Suite = suite.parse()?;
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::parse(harness::DEFAULT_CONFIG)?,
            };
            for p in &params {
                cfg.set_param(p)?;
            }
            if cli.seed.is_some() {
                cfg.seed = cli.seed;
            }
            let manifest = harness::run_suite(suite, &cfg, workers)?;
            for c in &manifest.criteria {
                eprintln!("AC{:<2} {:<28} {}", c.id, c.name, if c.passed() { "pass" } else { "FAIL" });
            }
            let reports = manifest.reports();
            let dir = out.map(Path::to_path_buf).or(cfg.output_path.clone());
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir)?;
                write_reports_csv(BufWriter::new(File::create(dir.join("report.csv"))?), &reports)?;
                let mut w = BufWriter::new(File::create(dir.join("manifest.json"))?);
                serde_json::to_writer_pretty(&mut w, &manifest).map_err(Error::from)?;
                writeln!(w)?;
                w.flush()?;
            }
            match format {
                Format::Csv => write_reports_csv(output(None)?, &reports)?,
                Format::Json => write_json(
                    None,
                    &json!({"suite": manifest.suite, "passed": manifest.passed, "criteria": manifest.criteria}),
                )?,
            }
            if !manifest.passed {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}
