//! Adversarial transport cost `D_r`, the `W₁` comparison, robust risk and the
//! finite-sample convergence experiment.
//!
//! `D_r(μ, ν)` is the optimal transport cost under `c(x, y) = 1{‖x − y‖ > 2r}`,
//! i.e. one minus the largest mass that can be matched within distance `2r`.

pub mod flow;
pub mod matching;
pub mod ot;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::exec::{block_rng, derive_seed, map_indices};
use crate::geometry::{check_dim, squared_l2, PointSet};
use crate::mc::Halfspace;

use flow::FlowNetwork;
use matching::{maximum_matching, BipartiteGraph};

/// Tolerance on the weight total of an empirical measure.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Slack allowed in inequalities between exactly computed transport costs.
pub const EXACT_SLACK: f64 = 1e-12;
/// Largest support size accepted by the `W₁` solver.
pub const W1_MAX_POINTS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: PointSet,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(points: PointSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(Error::invalid(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::invalid(format!("weights must be positive, got {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }

    pub fn uniform(points: PointSet) -> Self {
        let n = points.len();
        Self {
            points,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Matched index pairs `(i, j)` of a uniform instance.
    Matching(Vec<(usize, usize)>),
    /// Mass moved from `i` to `j`.
    Flow(Vec<(usize, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportResult {
    pub value: f64,
    pub certificate: Certificate,
    pub threshold_r: Option<f64>,
}

impl TransportResult {
    /// Mass moved by the certificate (pairs carry `1/n` each).
    pub fn certified_mass(&self, n: usize) -> f64 {
        match &self.certificate {
            Certificate::Matching(pairs) => pairs.len() as f64 / n as f64,
            Certificate::Flow(flow) => flow.iter().map(|f| f.2).sum(),
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be nonnegative, got {r}")));
    }
    Ok(())
}

/// `x` and `y` may be matched at radius `r`: `‖x − y‖ ≤ 2r`.
#[inline]
fn matchable(x: &[f64], y: &[f64], r: f64) -> bool {
    squared_l2(x, y) <= 4.0 * r * r
}

/// `D_r` between two uniform empirical measures of equal size, by maximum
/// matching on the graph of pairs within `2r`. `r = 0` gives the total
/// variation distance.
pub fn d_r_uniform(x: &PointSet, y: &PointSet, r: f64) -> Result<TransportResult> {
    check_radius(r)?;
    check_dim(x.dim(), y.dim())?;
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "uniform D_r needs equal sizes, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    let g = BipartiteGraph::from_predicate(n, n, |i, j| matchable(x.point(i), y.point(j), r));
    let pairs: Vec<(usize, usize)> = maximum_matching(&g)
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|j| (i, j)))
        .collect();
    Ok(TransportResult {
        value: 1.0 - pairs.len() as f64 / n as f64,
        certificate: Certificate::Matching(pairs),
        threshold_r: Some(r),
    })
}

/// `D_r` between weighted empirical measures by maximum flow.
pub fn d_r_weighted(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, r: f64) -> Result<TransportResult> {
    check_radius(r)?;
    check_dim(mu.dim(), nu.dim())?;
    let (n, m) = (mu.len(), nu.len());
    let (s, t) = (n + m, n + m + 1);
    let mut net = FlowNetwork::new(n + m + 2);
    for (i, &w) in mu.weights.iter().enumerate() {
        net.add_edge(s, i, w);
    }
    for (j, &w) in nu.weights.iter().enumerate() {
        net.add_edge(n + j, t, w);
    }
    let mut middle = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if matchable(mu.points.point(i), nu.points.point(j), r) {
                middle.push((i, j, net.add_edge(i, n + j, f64::INFINITY)));
            }
        }
    }
    let moved = net.max_flow(s, t);
    let flow = middle
        .into_iter()
        .map(|(i, j, e)| (i, j, net.flow(e)))
        .filter(|f| f.2 > 0.0)
        .collect();
    Ok(TransportResult {
        value: (1.0 - moved).clamp(0.0, 1.0),
        certificate: Certificate::Flow(flow),
        threshold_r: Some(r),
    })
}

/// `D_r` of two equal-size uniform instances by enumerating all `n!`
/// assignments. Only for tiny `n`; used to cross-check [`d_r_uniform`].
pub fn d_r_brute_force(x: &PointSet, y: &PointSet, r: f64) -> Result<f64> {
    check_radius(r)?;
    check_dim(x.dim(), y.dim())?;
    let n = x.len();
    if n != y.len() || n > 10 {
        return Err(Error::invalid("brute force needs equal sizes n <= 10"));
    }
    let ok: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| matchable(x.point(i), y.point(j), r)).collect())
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let score = |p: &[usize]| p.iter().enumerate().filter(|(i, j)| ok[*i][**j]).count();
    let mut best = score(&perm);
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(1.0 - best as f64 / n as f64)
}

/// Exact 1-Wasserstein distance under the Euclidean cost. On the line the
/// quantile formula is used.
pub fn w1_empirical(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<TransportResult> {
    check_dim(mu.dim(), nu.dim())?;
    if mu.dim() == 1 {
        let value = ot::w1_line(mu.points.coords(), &mu.weights, nu.points.coords(), &nu.weights);
        return Ok(TransportResult {
            value,
            certificate: Certificate::Flow(Vec::new()),
            threshold_r: None,
        });
    }
    w1_network(mu, nu)
}

/// `W₁` by the transportation solver in any dimension, with the transport
/// plan as certificate.
pub fn w1_network(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<TransportResult> {
    check_dim(mu.dim(), nu.dim())?;
    if mu.len() > W1_MAX_POINTS || nu.len() > W1_MAX_POINTS {
        return Err(Error::invalid(format!(
            "W1 solver limited to {W1_MAX_POINTS} points per measure; subsample the inputs"
        )));
    }
    let (value, plan) = ot::transport_plan(&mu.weights, &nu.weights, |i, j| {
        squared_l2(mu.points.point(i), nu.points.point(j)).sqrt()
    });
    Ok(TransportResult {
        value,
        certificate: Certificate::Flow(plan),
        threshold_r: None,
    })
}

/// `D_r(μ, ν) ≤ W₁(μ, ν) / 2r`, both sides computed exactly.
pub fn check_w1_domination(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, r: f64) -> Result<BoundReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    let dr = d_r_weighted(mu, nu, r)?.value;
    let w1 = w1_empirical(mu, nu)?.value;
    Ok(BoundReport::within_tolerance("w1_domination", w1 / (2.0 * r), dr, EXACT_SLACK))
}

/// Optimal adversarial risk `(1 − D_r) / 2`.
pub fn robust_risk(d_r_value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d_r_value) {
        return Err(Error::invalid(format!("D_r must lie in [0, 1], got {d_r_value}")));
    }
    Ok((1.0 - d_r_value) / 2.0)
}

/// Decision regions whose `r`-dilation and complement dilation are exact.
#[derive(Debug, Clone, PartialEq)]
pub enum DecisionRegion {
    Empty,
    Full,
    Halfspace(Halfspace),
    /// Union of closed Euclidean balls; the balls may touch but not overlap.
    Balls { centers: PointSet, radius: f64 },
}

impl DecisionRegion {
    fn dim(&self) -> Option<usize> {
        match self {
            DecisionRegion::Empty | DecisionRegion::Full => None,
            DecisionRegion::Halfspace(h) => Some(h.normal().len()),
            DecisionRegion::Balls { centers, .. } => Some(centers.dim()),
        }
    }

    fn validate(&self) -> Result<()> {
        if let DecisionRegion::Balls { centers, radius } = self {
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
            }
            for i in 0..centers.len() {
                for j in i + 1..centers.len() {
                    if squared_l2(centers.point(i), centers.point(j)) < 4.0 * radius * radius {
                        return Err(Error::invalid(
                            "overlapping balls have no exact erosion; use disjoint balls",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `x ∈ A ⊕ rB`.
    pub fn in_dilation(&self, x: &[f64], r: f64) -> bool {
        match self {
            DecisionRegion::Empty => false,
            DecisionRegion::Full => true,
            DecisionRegion::Halfspace(h) => h.signed_distance(x) <= r,
            DecisionRegion::Balls { centers, radius } => {
                let reach = radius + r;
                centers.iter().any(|c| squared_l2(x, c) <= reach * reach)
            }
        }
    }

    /// `x ∈ closure(A^c ⊕ rB)`: the complement of the open erosion of `A`.
    pub fn in_complement_dilation(&self, x: &[f64], r: f64) -> bool {
        match self {
            DecisionRegion::Empty => true,
            DecisionRegion::Full => false,
            DecisionRegion::Halfspace(h) => h.signed_distance(x) >= -r,
            DecisionRegion::Balls { centers, radius } => {
                let inner = radius - r;
                inner <= 0.0 || centers.iter().all(|c| squared_l2(x, c) >= inner * inner)
            }
        }
    }
}

/// Plug-in adversarial error `(μ₀(A_r) + μ₁((A^c)_r)) / 2` of a decision
/// region on uniform empirical samples.
pub fn decision_region_risk(
    region: &DecisionRegion,
    mu0: &PointSet,
    mu1: &PointSet,
    r: f64,
) -> Result<f64> {
    check_radius(r)?;
    check_dim(mu0.dim(), mu1.dim())?;
    if let Some(d) = region.dim() {
        check_dim(d, mu0.dim())?;
    }
    region.validate()?;
    let p0 = mu0.iter().filter(|x| region.in_dilation(x, r)).count() as f64 / mu0.len() as f64;
    let p1 = mu1
        .iter()
        .filter(|x| region.in_complement_dilation(x, r))
        .count() as f64
        / mu1.len() as f64;
    Ok((p0 + p1) / 2.0)
}

/// Adds independent `N(0, σ² I)` noise to every point.
pub fn gaussian_smooth(samples: &PointSet, sigma: f64, seed: u64) -> Result<PointSet> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(samples.clone());
    }
    let mut rng = block_rng(seed, 0);
    let coords = samples
        .coords()
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v + sigma * z
        })
        .collect();
    PointSet::new(samples.dim(), coords)
}

/// Distribution primitives for the convergence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Generator {
    /// Atom `i` drawn with probability `weights[i]`, plus `N(0, sigma² I)`.
    GaussianMixture {
        atoms: Vec<Vec<f64>>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
        #[serde(default)]
        sigma: f64,
    },
    UniformBall { center: Vec<f64>, radius: f64 },
}

impl Generator {
    pub fn dim(&self) -> Result<usize> {
        match self {
            Generator::GaussianMixture { atoms, .. } => PointSet::from_rows(atoms).map(|p| p.dim()),
            Generator::UniformBall { center, .. } => {
                if center.is_empty() {
                    Err(Error::invalid("uniform-ball center is empty"))
                } else {
                    Ok(center.len())
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        self.dim()?;
        match self {
            Generator::GaussianMixture { atoms, weights, sigma } => {
                if let Some(w) = weights {
                    EmpiricalMeasure::new(PointSet::from_rows(atoms)?, w.clone())?;
                }
                if !(*sigma >= 0.0 && sigma.is_finite()) {
                    return Err(Error::invalid(format!("generator sigma must be nonnegative, got {sigma}")));
                }
            }
            Generator::UniformBall { radius, .. } => {
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!("uniform-ball radius must be nonnegative, got {radius}")));
                }
            }
        }
        Ok(())
    }

    /// `n` independent draws.
    pub fn sample(&self, n: usize, seed: u64) -> Result<PointSet> {
        self.validate()?;
        let d = self.dim()?;
        let mut rng = block_rng(seed, 0);
        let mut coords = Vec::with_capacity(n * d);
        match self {
            Generator::GaussianMixture { atoms, weights, sigma } => {
                let cumulative: Vec<f64> = match weights {
                    Some(w) => w
                        .iter()
                        .scan(0.0, |acc, v| {
                            *acc += v;
                            Some(*acc)
                        })
                        .collect(),
                    None => (1..=atoms.len()).map(|k| k as f64 / atoms.len() as f64).collect(),
                };
                for _ in 0..n {
                    let u: f64 = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                    let k = cumulative.partition_point(|&c| c <= u).min(atoms.len() - 1);
                    for &a in &atoms[k] {
                        let z: f64 = rng.sample(StandardNormal);
                        coords.push(a + sigma * z);
                    }
                }
            }
            Generator::UniformBall { center, radius } => {
                for _ in 0..n {
                    let p = crate::mc::uniform_in_ball(&mut rng, d);
                    coords.extend(p.iter().zip(center).map(|(v, c)| c + radius * v));
                }
            }
        }
        PointSet::new(d, coords)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub gen0: Generator,
    pub gen1: Generator,
    pub r: f64,
    /// Smoothing applied on top of each generator.
    pub sigma: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Defaults to `8 · max(n_grid)`.
    #[serde(default)]
    pub n_ref: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub trial: usize,
    pub d_r: f64,
    pub abs_dev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub n: usize,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
    pub mean_d_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub n_ref: usize,
    pub reference: f64,
    pub rows: Vec<ConvergenceRow>,
    pub summary: Vec<ConvergenceSummary>,
}

impl ConvergenceTable {
    /// Number of grid steps where the median deviation goes up.
    pub fn median_inversions(&self) -> usize {
        self.summary
            .windows(2)
            .filter(|w| w[1].median > w[0].median)
            .count()
    }
}

/// Nearest-rank quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let k = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

fn smoothed_draw(gen: &Generator, n: usize, sigma: f64, seed: u64) -> Result<PointSet> {
    let raw = gen.sample(n, derive_seed(seed, 1))?;
    gaussian_smooth(&raw, sigma, derive_seed(seed, 2))
}

/// Empirical `D_r` at each sample size of the grid against a large-sample
/// reference `D_r(μ₀^{n_ref}, μ₁^{n_ref})`.
pub fn convergence_experiment(cfg: &ConvergenceConfig, workers: usize) -> Result<ConvergenceTable> {
    check_radius(cfg.r)?;
    check_dim(cfg.gen0.dim()?, cfg.gen1.dim()?)?;
    if cfg.n_grid.is_empty() || cfg.n_grid.contains(&0) {
        return Err(Error::invalid("n_grid must be nonempty with positive sizes"));
    }
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let n_ref = cfg
        .n_ref
        .unwrap_or(8 * cfg.n_grid.iter().copied().max().unwrap_or(1));
    let draw_pair = |n: usize, tag: u64| -> Result<f64> {
        let s = derive_seed(cfg.seed, tag);
        let x = smoothed_draw(&cfg.gen0, n, cfg.sigma, derive_seed(s, 0))?;
        let y = smoothed_draw(&cfg.gen1, n, cfg.sigma, derive_seed(s, 1))?;
        Ok(d_r_uniform(&x, &y, cfg.r)?.value)
    };
    let reference = draw_pair(n_ref, u64::MAX)?;

    let jobs: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let values = map_indices(jobs.len(), workers, |k| draw_pair(jobs[k].0, k as u64))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ConvergenceRow> = jobs
        .iter()
        .zip(values)
        .map(|(&(n, trial), d_r)| ConvergenceRow {
            n,
            trial,
            d_r,
            abs_dev: (d_r - reference).abs(),
        })
        .collect();
    let summary = cfg
        .n_grid
        .iter()
        .map(|&n| {
            let mine: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.n == n).collect();
            let mut devs: Vec<f64> = mine.iter().map(|r| r.abs_dev).collect();
            devs.sort_by(f64::total_cmp);
            ConvergenceSummary {
                n,
                median: quantile(&devs, 0.5),
                q10: quantile(&devs, 0.1),
                q90: quantile(&devs, 0.9),
                mean_d_r: mine.iter().map(|r| r.d_r).sum::<f64>() / mine.len() as f64,
            }
        })
        .collect();
    Ok(ConvergenceTable {
        n_ref,
        reference,
        rows,
        summary,
    })
}

/// Both finite-sample coupling inequalities, for `η ∈ (0, r/3)`:
///
/// `D_{r+2η}(μ₀, μ₁) ≤ D_r(μ₀ⁿ, μ₁ⁿ) + D_η(μ₀, μ₀ⁿ) + D_η(μ₁, μ₁ⁿ)` and
/// `D_r(μ₀ⁿ, μ₁ⁿ) ≤ D_{r−2η}(μ₀, μ₁) + D_η(μ₀, μ₀ⁿ) + D_η(μ₁, μ₁ⁿ)`.
pub fn coupling_sandwich_check(
    mu0: &EmpiricalMeasure,
    mu1: &EmpiricalMeasure,
    mu0n: &EmpiricalMeasure,
    mu1n: &EmpiricalMeasure,
    r: f64,
    eta: f64,
) -> Result<[BoundReport; 2]> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    if !(eta > 0.0 && eta < r / 3.0) {
        return Err(Error::invalid(format!("eta must lie in (0, r/3), got {eta}")));
    }
    let sample = d_r_weighted(mu0n, mu1n, r)?.value;
    let outer = d_r_weighted(mu0, mu1, r + 2.0 * eta)?.value;
    let inner = d_r_weighted(mu0, mu1, r - 2.0 * eta)?.value;
    let noise = d_r_weighted(mu0, mu0n, eta)?.value + d_r_weighted(mu1, mu1n, eta)?.value;
    Ok([
        BoundReport::within_tolerance("coupling_upper", sample + noise, outer, EXACT_SLACK),
        BoundReport::within_tolerance("coupling_lower", inner + noise, sample, EXACT_SLACK),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> PointSet {
        PointSet::new(1, v.to_vec()).unwrap()
    }

    #[test]
    fn d_r_examples() {
        let x = line(&[0.0, 1.0, 2.0]);
        assert_eq!(d_r_uniform(&x, &x, 0.1).unwrap().value, 0.0);
        assert_eq!(d_r_uniform(&x, &line(&[10.0, 11.0, 12.0]), 0.1).unwrap().value, 1.0);
        let res = d_r_uniform(&x, &line(&[0.5, 2.1, 9.0]), 0.3).unwrap();
        assert!((res.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(res.certified_mass(3) + res.value, 1.0);
        assert!((d_r_brute_force(&x, &line(&[0.5, 2.1, 9.0]), 0.3).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(d_r_uniform(&x, &line(&[0.0]), 0.3).is_err());
    }

    #[test]
    fn tie_at_two_r_is_matchable() {
        assert_eq!(d_r_uniform(&line(&[0.0]), &line(&[1.0]), 0.5).unwrap().value, 0.0);
    }

    #[test]
    fn zero_radius_is_total_variation() {
        assert_eq!(d_r_uniform(&line(&[0.0, 1.0]), &line(&[0.5, 2.0]), 0.0).unwrap().value, 1.0);
        assert_eq!(d_r_uniform(&line(&[0.0, 1.0]), &line(&[1.0, 2.0]), 0.0).unwrap().value, 0.5);
    }

    #[test]
    fn weighted_two_atom_example() {
        let r = 0.5;
        let mu = EmpiricalMeasure::uniform(line(&[0.0]));
        let nu = EmpiricalMeasure::new(line(&[2.0 * r, 3.0 * r]), vec![0.5, 0.5]).unwrap();
        let res = d_r_weighted(&mu, &nu, r).unwrap();
        assert!((res.value - 0.5).abs() < 1e-15);
        assert!(d_r_weighted(&mu, &mu, r).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn w1_examples() {
        let mu = EmpiricalMeasure::uniform(line(&[0.0, 1.0]));
        let nu = EmpiricalMeasure::uniform(line(&[2.0, 3.0]));
        assert_eq!(w1_empirical(&mu, &nu).unwrap().value, 2.0);
        assert!((w1_network(&mu, &nu).unwrap().value - 2.0).abs() < 1e-14);
        let a = EmpiricalMeasure::uniform(PointSet::new(2, vec![0.0, 0.0]).unwrap());
        let b = EmpiricalMeasure::uniform(PointSet::new(2, vec![3.0, 4.0]).unwrap());
        assert_eq!(w1_empirical(&a, &b).unwrap().value, 5.0);
        assert_eq!(w1_empirical(&a, &a).unwrap().value, 0.0);
    }

    #[test]
    fn robust_risk_values() {
        assert_eq!(robust_risk(1.0).unwrap(), 0.0);
        assert_eq!(robust_risk(0.0).unwrap(), 0.5);
        assert!((robust_risk(1.0 / 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(robust_risk(1.5).is_err());
    }

    #[test]
    fn trivial_regions_give_one_half() {
        let x = line(&[0.0, 1.0]);
        assert_eq!(decision_region_risk(&DecisionRegion::Empty, &x, &x, 0.1).unwrap(), 0.5);
        assert_eq!(decision_region_risk(&DecisionRegion::Full, &x, &x, 0.1).unwrap(), 0.5);
    }

    #[test]
    fn halfspace_region_dominates_optimal_risk() {
        let g0 = Generator::GaussianMixture { atoms: vec![vec![-1.5, 0.0]], weights: None, sigma: 1.0 };
        let g1 = Generator::GaussianMixture { atoms: vec![vec![1.5, 0.0]], weights: None, sigma: 1.0 };
        let x = g0.sample(200, 1).unwrap();
        let y = g1.sample(200, 2).unwrap();
        let r = 0.1;
        let region = DecisionRegion::Halfspace(Halfspace::new(vec![-1.0, 0.0], 0.0).unwrap());
        let risk = decision_region_risk(&region, &x, &y, r).unwrap();
        let opt = robust_risk(d_r_uniform(&x, &y, r).unwrap().value).unwrap();
        assert!(risk < 0.5 && risk >= opt, "risk {risk} optimum {opt}");
    }

    #[test]
    fn overlapping_balls_rejected() {
        let region = DecisionRegion::Balls { centers: line(&[0.0, 1.0]), radius: 1.0 };
        assert!(decision_region_risk(&region, &line(&[0.0]), &line(&[0.0]), 0.1).is_err());
    }

    #[test]
    fn smoothing_moments() {
        let base = PointSet::new(1, vec![0.0; 20_000]).unwrap();
        assert_eq!(gaussian_smooth(&base, 0.0, 1).unwrap(), base);
        let s = gaussian_smooth(&base, 0.5, 1).unwrap();
        let n = s.len() as f64;
        let mean = s.coords().iter().sum::<f64>() / n;
        let var = s.coords().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 3.0 * 0.5 / n.sqrt());
        assert!((var - 0.25).abs() < 0.02);
    }

    #[test]
    fn sandwich_reduces_to_monotonicity() {
        let mu0 = EmpiricalMeasure::uniform(line(&[0.0, 0.4, 1.3]));
        let mu1 = EmpiricalMeasure::uniform(line(&[0.7, 1.1, 3.0]));
        for rep in coupling_sandwich_check(&mu0, &mu1, &mu0, &mu1, 0.3, 0.05).unwrap() {
            assert!(rep.passed(), "{rep:?}");
        }
        assert!(coupling_sandwich_check(&mu0, &mu1, &mu0, &mu1, 0.3, 0.1).is_err());
    }

    #[test]
    fn convergence_on_identical_generators_is_zero() {
        let g = Generator::GaussianMixture { atoms: vec![vec![0.0]], weights: None, sigma: 0.0 };
        let cfg = ConvergenceConfig {
            gen0: g.clone(),
            gen1: g,
            r: 0.1,
            sigma: 0.0,
            n_grid: vec![5, 10],
            trials: 3,
            seed: 1,
            n_ref: None,
        };
        let table = convergence_experiment(&cfg, 2).unwrap();
        assert_eq!(table.reference, 0.0);
        assert!(table.rows.iter().all(|r| r.abs_dev == 0.0));
        assert_eq!(table.n_ref, 80);
    }
}
