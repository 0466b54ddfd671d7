//! Differential entropy and Fisher information of isotropic Gaussian
//! mixtures `p(x) = Σ p_i g_v(x − x_i)`, and numerical checks of the reverse
//! entropy power inequality, its pointwise convolution lemma, the Fisher
//! bound `J ≤ d/v` and de Bruijn's identity. Entropies are in nats.

use std::f64::consts::{E, PI};
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::bounds::{reverse_epi_constant, BoundReport};
use crate::error::{Error, Result};
use crate::exec::{default_workers, map_blocks};
use crate::geometry::{check_dim, squared_l2, PointSet};

/// Tolerance for merging coincident atoms and checking weight totals.
pub const ATOM_TOL: f64 = 1e-12;
/// Deterministic tolerance of quadrature-based comparisons.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    atoms: PointSet,
    weights: Vec<f64>,
    variance: f64,
}

impl GaussianMixture {
    pub fn new(atoms: PointSet, weights: Vec<f64>, variance: f64) -> Result<Self> {
        if weights.len() != atoms.len() {
            return Err(Error::invalid(format!(
                "{} weights for {} atoms",
                weights.len(),
                atoms.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("mixture weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > ATOM_TOL {
            return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::invalid(format!("variance must be positive, got {variance}")));
        }
        Ok(Self {
            atoms,
            weights,
            variance,
        })
    }

    pub fn uniform(atoms: PointSet, variance: f64) -> Result<Self> {
        let n = atoms.len();
        Self::new(atoms, vec![1.0 / n as f64; n], variance)
    }

    /// Single Gaussian `N(mean, v I)`.
    pub fn gaussian(mean: &[f64], variance: f64) -> Result<Self> {
        Self::new(PointSet::new(mean.len(), mean.to_vec())?, vec![1.0], variance)
    }

    pub fn dim(&self) -> usize {
        self.atoms.dim()
    }

    pub fn atoms(&self) -> &PointSet {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn with_variance(&self, variance: f64) -> Result<Self> {
        Self::new(self.atoms.clone(), self.weights.clone(), variance)
    }

    /// Shifts every atom by `t`.
    pub fn translated(&self, t: &[f64]) -> Result<Self> {
        check_dim(self.dim(), t.len())?;
        let coords = self
            .atoms
            .iter()
            .flat_map(|a| a.iter().zip(t).map(|(x, s)| x + s))
            .collect();
        Self::new(PointSet::new(self.dim(), coords)?, self.weights.clone(), self.variance)
    }

    /// `ln p(x)` by log-sum-exp.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let v = self.variance;
        let norm = -0.5 * self.dim() as f64 * (2.0 * PI * v).ln();
        let mut m = f64::NEG_INFINITY;
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            m = m.max(w.ln() - squared_l2(x, a) / (2.0 * v));
        }
        let s: f64 = self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| (w.ln() - squared_l2(x, a) / (2.0 * v) - m).exp())
            .sum();
        norm + m + s.ln()
    }

    /// `∇ ln p(x) = Σ_i ρ_i(x) (x_i − x) / v` with responsibilities `ρ_i`.
    pub fn score(&self, x: &[f64], out: &mut [f64]) {
        let v = self.variance;
        let logits: Vec<f64> = self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w.ln() - squared_l2(x, a) / (2.0 * v))
            .collect();
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logits.iter().map(|l| (l - m).exp()).sum();
        out.fill(0.0);
        for (a, l) in self.atoms.iter().zip(&logits) {
            let rho = (l - m).exp() / z;
            for k in 0..out.len() {
                out[k] += rho * (a[k] - x[k]) / v;
            }
        }
    }

    fn cumulative(&self) -> Vec<f64> {
        self.weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }

    /// Draws one sample into `x`; returns the atom index used.
    fn draw(&self, cumulative: &[f64], rng: &mut impl Rng, x: &mut [f64]) -> usize {
        let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
        let k = cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
        let sd = self.variance.sqrt();
        for (xi, a) in x.iter_mut().zip(self.atoms.point(k)) {
            let z: f64 = rng.sample(StandardNormal);
            *xi = a + sd * z;
        }
        k
    }
}

pub fn mixture_density(gm: &GaussianMixture, x: &[f64]) -> Result<f64> {
    check_dim(gm.dim(), x.len())?;
    Ok(gm.log_density(x).exp())
}

/// Law of `X + Y` for independent mixtures: atoms `x_i + y_j` with weights
/// `p_i q_j` and variance `v_x + v_y`; coincident atoms are merged.
pub fn convolve_mixtures(x: &GaussianMixture, y: &GaussianMixture) -> Result<GaussianMixture> {
    check_dim(x.dim(), y.dim())?;
    let d = x.dim();
    let mut atoms: Vec<(Vec<f64>, f64)> = Vec::with_capacity(x.atoms.len() * y.atoms.len());
    for (a, p) in x.atoms.iter().zip(&x.weights) {
        for (b, q) in y.atoms.iter().zip(&y.weights) {
            atoms.push((a.iter().zip(b).map(|(s, t)| s + t).collect(), p * q));
        }
    }
    atoms.sort_by(|u, v| u.0[0].total_cmp(&v.0[0]));
    let mut merged: Vec<(Vec<f64>, f64)> = Vec::with_capacity(atoms.len());
    for (pt, w) in atoms {
        let same = merged.iter_mut().rev().take_while(|m| pt[0] - m.0[0] <= ATOM_TOL).find(|m| {
            m.0.iter().zip(&pt).all(|(s, t)| (s - t).abs() <= ATOM_TOL)
        });
        match same {
            Some(m) => m.1 += w,
            None => merged.push((pt, w)),
        }
    }
    let total: f64 = merged.iter().map(|m| m.1).sum();
    let coords = merged.iter().flat_map(|m| m.0.iter().copied()).collect();
    let weights = merged.iter().map(|m| m.1 / total).collect();
    GaussianMixture::new(PointSet::new(d, coords)?, weights, x.variance + y.variance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    Mc,
    Quadrature,
    /// Closed form (single Gaussian).
    Exact,
}

/// An entropy (nats) or Fisher information estimate. For quadrature the
/// `std_error` field carries the tail-truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
}

/// Which estimator the composite checks use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    /// Closed form for single Gaussians, quadrature in `d = 1`, else MC.
    Auto,
    Mc,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateOptions {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub method: MethodChoice,
    /// Quadrature range beyond the extreme atoms, in standard deviations.
    pub span: f64,
    /// Gauss–Legendre panels per standard deviation.
    pub panels_per_sd: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            workers: default_workers(),
            method: MethodChoice::Auto,
            span: 12.0,
            panels_per_sd: 4,
        }
    }
}

impl EstimateOptions {
    pub fn mc(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            method: MethodChoice::Mc,
            ..Self::default()
        }
    }

    pub fn quadrature() -> Self {
        Self {
            method: MethodChoice::Quadrature,
            ..Self::default()
        }
    }

    fn resolve(&self, gm: &GaussianMixture, allow_exact: bool) -> EstimateMethod {
        match self.method {
            MethodChoice::Mc => EstimateMethod::Mc,
            MethodChoice::Quadrature => EstimateMethod::Quadrature,
            MethodChoice::Auto if allow_exact && gm.atoms.len() == 1 => EstimateMethod::Exact,
            MethodChoice::Auto if gm.dim() == 1 => EstimateMethod::Quadrature,
            MethodChoice::Auto => EstimateMethod::Mc,
        }
    }
}

/// `h = E[−ln p(X)]` as a sample mean with its standard error.
pub fn entropy_mc(gm: &GaussianMixture, samples: u64, seed: u64, workers: usize) -> Result<EntropyEstimate> {
    if samples < 2 {
        return Err(Error::invalid("entropy MC needs at least 2 samples"));
    }
    let cum = gm.cumulative();
    let d = gm.dim();
    let (sum, sum_sq) = map_blocks(samples, seed, workers, |_, range, rng| {
        let mut x = vec![0.0; d];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in range {
            gm.draw(&cum, rng, &mut x);
            let v = -gm.log_density(&x);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    })
    .into_iter()
    .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let est = crate::mc::MeasureEstimate::from_moments(sum, sum_sq, samples);
    Ok(EntropyEstimate {
        value: est.value,
        std_error: est.std_error,
        method: EstimateMethod::Mc,
    })
}

/// `J = E‖∇ ln p(X)‖²` by sampling with the analytic score.
pub fn fisher_information_mc(
    gm: &GaussianMixture,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<EntropyEstimate> {
    if samples < 2 {
        return Err(Error::invalid("Fisher MC needs at least 2 samples"));
    }
    let cum = gm.cumulative();
    let d = gm.dim();
    let (sum, sum_sq) = map_blocks(samples, seed, workers, |_, range, rng| {
        let mut x = vec![0.0; d];
        let mut g = vec![0.0; d];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in range {
            gm.draw(&cum, rng, &mut x);
            gm.score(&x, &mut g);
            let v: f64 = g.iter().map(|c| c * c).sum();
            s += v;
            s2 += v * v;
        }
        (s, s2)
    })
    .into_iter()
    .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let est = crate::mc::MeasureEstimate::from_moments(sum, sum_sq, samples);
    Ok(EntropyEstimate {
        value: est.value,
        std_error: est.std_error,
        method: EstimateMethod::Mc,
    })
}

/// 16-point Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 16;
        let mut rule = Vec::with_capacity(N);
        for i in 0..N {
            let mut x = (PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

fn require_line(gm: &GaussianMixture) -> Result<()> {
    if gm.dim() != 1 {
        return Err(Error::invalid(format!(
            "quadrature is only available in dimension 1, got {}",
            gm.dim()
        )));
    }
    Ok(())
}

/// `∫ f` over the union of `[x_i − span·sd, x_i + span·sd]`.
fn integrate_line(gm: &GaussianMixture, span: f64, panels_per_sd: usize, f: impl Fn(f64) -> f64) -> f64 {
    let sd = gm.variance.sqrt();
    let mut intervals: Vec<(f64, f64)> = gm
        .atoms
        .coords()
        .iter()
        .map(|&a| (a - span * sd, a + span * sd))
        .collect();
    intervals.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    let rule = gauss_legendre();
    let mut total = 0.0;
    for (lo, hi) in merged {
        let panels = (((hi - lo) / sd) * panels_per_sd as f64).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * h;
            let part: f64 = rule.iter().map(|(x, w)| w * f(mid + 0.5 * h * x)).sum();
            total += 0.5 * h * part;
        }
    }
    total
}

fn upper_tail(s: f64) -> f64 {
    0.5 * libm::erfc(s / std::f64::consts::SQRT_2)
}

/// Bound on `∫ p |ln p|` outside the integration range, using
/// `−ln p ≤ −ln p_i − ln g_v(x − x_i)` component by component.
fn entropy_tail_bound(gm: &GaussianMixture, span: f64) -> f64 {
    let phi = (-0.5 * span * span).exp() / (2.0 * PI).sqrt();
    let q = upper_tail(span);
    gm.weights
        .iter()
        .map(|w| {
            let level = (-w.ln() + 0.5 * (2.0 * PI * gm.variance).ln()).max(0.0);
            w * (2.0 * q * level + span * phi + q)
        })
        .sum()
}

/// `−∫ p ln p` on the line by composite Gauss–Legendre quadrature.
pub fn entropy_quadrature(gm: &GaussianMixture, span: f64, panels_per_sd: usize) -> Result<EntropyEstimate> {
    require_line(gm)?;
    if !(span > 0.0) || panels_per_sd == 0 {
        return Err(Error::invalid("quadrature needs span > 0 and at least one panel"));
    }
    let value = integrate_line(gm, span, panels_per_sd, |x| {
        let lp = gm.log_density(&[x]);
        -lp.exp() * lp
    });
    Ok(EntropyEstimate {
        value,
        std_error: entropy_tail_bound(gm, span),
        method: EstimateMethod::Quadrature,
    })
}

/// `∫ p (ln p)'²` on the line by composite Gauss–Legendre quadrature.
pub fn fisher_quadrature(gm: &GaussianMixture, span: f64, panels_per_sd: usize) -> Result<EntropyEstimate> {
    require_line(gm)?;
    if !(span > 0.0) || panels_per_sd == 0 {
        return Err(Error::invalid("quadrature needs span > 0 and at least one panel"));
    }
    let value = integrate_line(gm, span, panels_per_sd, |x| {
        let mut g = [0.0];
        gm.score(&[x], &mut g);
        gm.log_density(&[x]).exp() * g[0] * g[0]
    });
    // E[(x_i − x)² / v²] over the tails of each component
    let phi = (-0.5 * span * span).exp() / (2.0 * PI).sqrt();
    let tail = 2.0 * (span * phi + upper_tail(span)) / gm.variance;
    Ok(EntropyEstimate {
        value,
        std_error: tail,
        method: EstimateMethod::Quadrature,
    })
}

/// `(d/2) ln(2πe v)`.
pub fn gaussian_entropy(d: usize, variance: f64) -> f64 {
    0.5 * d as f64 * (2.0 * PI * E * variance).ln()
}

/// Entropy with the estimator picked by `opts`.
pub fn entropy(gm: &GaussianMixture, opts: &EstimateOptions) -> Result<EntropyEstimate> {
    match opts.resolve(gm, true) {
        EstimateMethod::Exact => Ok(EntropyEstimate {
            value: gaussian_entropy(gm.dim(), gm.variance),
            std_error: 0.0,
            method: EstimateMethod::Exact,
        }),
        EstimateMethod::Quadrature => entropy_quadrature(gm, opts.span, opts.panels_per_sd),
        EstimateMethod::Mc => entropy_mc(gm, opts.samples, opts.seed, opts.workers),
    }
}

/// Fisher information with the estimator picked by `opts`.
pub fn fisher_information(gm: &GaussianMixture, opts: &EstimateOptions) -> Result<EntropyEstimate> {
    match opts.resolve(gm, true) {
        EstimateMethod::Exact => Ok(EntropyEstimate {
            value: gm.dim() as f64 / gm.variance,
            std_error: 0.0,
            method: EstimateMethod::Exact,
        }),
        EstimateMethod::Quadrature => fisher_quadrature(gm, opts.span, opts.panels_per_sd),
        EstimateMethod::Mc => fisher_information_mc(gm, opts.samples, opts.seed, opts.workers),
    }
}

fn compare_estimates(
    name: &str,
    bound: f64,
    measured: f64,
    parts: &[EntropyEstimate],
) -> BoundReport {
    let se = parts.iter().map(|p| p.std_error.powi(2)).sum::<f64>().sqrt();
    if parts.iter().any(|p| p.method == EstimateMethod::Mc) {
        BoundReport::compare(name, bound, measured, se)
    } else {
        BoundReport::within_tolerance(name, bound, measured, QUADRATURE_TOL + 4.0 * se)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpiOutcome {
    pub h_x: EntropyEstimate,
    pub h_y: EntropyEstimate,
    pub h_sum: EntropyEstimate,
    /// `C(d, r) = −(d/2) ln(πr)`.
    pub bound: f64,
    /// `h_sum − h_x − h_y`.
    pub gap: f64,
    pub report: BoundReport,
}

/// `h(X_r + Y_r) ≤ h(X_r) + h(Y_r) − (d/2) ln(πr)` for discrete `X`, `Y`
/// smoothed by `N(0, r I)`.
pub fn reverse_epi_check(
    x_atoms: &PointSet,
    x_weights: &[f64],
    y_atoms: &PointSet,
    y_weights: &[f64],
    r: f64,
    opts: &EstimateOptions,
) -> Result<EpiOutcome> {
    check_dim(x_atoms.dim(), y_atoms.dim())?;
    let gx = GaussianMixture::new(x_atoms.clone(), x_weights.to_vec(), r)?;
    let gy = GaussianMixture::new(y_atoms.clone(), y_weights.to_vec(), r)?;
    let gs = convolve_mixtures(&gx, &gy)?;
    let tagged = |tag: u64| EstimateOptions {
        seed: crate::exec::derive_seed(opts.seed, tag),
        ..*opts
    };
    let h_x = entropy(&gx, &tagged(1))?;
    let h_y = entropy(&gy, &tagged(2))?;
    let h_sum = entropy(&gs, &tagged(3))?;
    let bound = reverse_epi_constant(x_atoms.dim(), r)?;
    let gap = h_sum.value - h_x.value - h_y.value;
    let report = compare_estimates(
        "reverse_epi",
        h_x.value + h_y.value + bound,
        h_sum.value,
        &[h_x, h_y, h_sum],
    );
    Ok(EpiOutcome {
        h_x,
        h_y,
        h_sum,
        bound,
        gap,
        report,
    })
}

/// `ln g_{2r}(a + b) − ln g_r(a) − ln g_r(b)`, which equals
/// `(d/2) ln(πr) + ‖a − b‖² / 4r`.
pub fn pointwise_log_ratio(a: &[f64], b: &[f64], r: f64) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("r must be positive, got {r}")));
    }
    let d = a.len() as f64;
    let ln_g = |x: f64, v: f64| -0.5 * d * (2.0 * PI * v).ln() - x / (2.0 * v);
    let sum: f64 = a.iter().zip(b).map(|(s, t)| (s + t).powi(2)).sum();
    let na: f64 = a.iter().map(|v| v * v).sum();
    let nb: f64 = b.iter().map(|v| v * v).sum();
    Ok(ln_g(sum, 2.0 * r) - ln_g(na, r) - ln_g(nb, r))
}

/// `g_{2r}(a + b) ≥ (πr)^{d/2} g_r(a) g_r(b)`, compared in log space with a
/// rounding allowance.
pub fn pointwise_lemma_check(a: &[f64], b: &[f64], r: f64) -> Result<bool> {
    let lhs = pointwise_log_ratio(a, b, r)?;
    let rhs = 0.5 * a.len() as f64 * (PI * r).ln();
    let scale = 1.0 + rhs.abs() + lhs.abs();
    Ok(lhs >= rhs - 1e-12 * scale)
}

/// `J ≤ d / v`.
pub fn fisher_bound_check(gm: &GaussianMixture, opts: &EstimateOptions) -> Result<BoundReport> {
    let j = fisher_information(gm, opts)?;
    Ok(compare_estimates(
        "fisher_bound",
        gm.dim() as f64 / gm.variance,
        j.value,
        &[j],
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeBruijnOutcome {
    /// `(h(t₀ + dt) − h(t₀ − dt)) / 2dt`.
    pub derivative: EntropyEstimate,
    pub half_fisher: EntropyEstimate,
    pub discrepancy: f64,
    /// Allowed discrepancy: `4σ` plus the central-difference term.
    pub allowance: f64,
    pub passed: bool,
}

/// Central difference of `h(X + √t Z)` at `t₀` in `MC` mode, using the same
/// atoms and normals on both sides.
fn entropy_difference_mc(
    gm: &GaussianMixture,
    t0: f64,
    dt: f64,
    opts: &EstimateOptions,
) -> Result<EntropyEstimate> {
    let plus = gm.with_variance(t0 + dt)?;
    let minus = gm.with_variance(t0 - dt)?;
    let cum = gm.cumulative();
    let d = gm.dim();
    let (sp, sm) = ((t0 + dt).sqrt(), (t0 - dt).sqrt());
    let (sum, sum_sq) = map_blocks(opts.samples, opts.seed, opts.workers, |_, range, rng| {
        let mut z = vec![0.0; d];
        let mut xp = vec![0.0; d];
        let mut xm = vec![0.0; d];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in range {
            let u = rng.random::<f64>() * cum[cum.len() - 1];
            let k = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
            for v in z.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let a = gm.atoms.point(k);
            for i in 0..d {
                xp[i] = a[i] + sp * z[i];
                xm[i] = a[i] + sm * z[i];
            }
            let v = (minus.log_density(&xm) - plus.log_density(&xp)) / (2.0 * dt);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    })
    .into_iter()
    .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let est = crate::mc::MeasureEstimate::from_moments(sum, sum_sq, opts.samples);
    Ok(EntropyEstimate {
        value: est.value,
        std_error: est.std_error,
        method: EstimateMethod::Mc,
    })
}

/// de Bruijn's identity `d/dt h(X + √t Z) = J(X + √t Z) / 2` at `t₀`, with the
/// mixture's atoms and weights as the law of `X`.
pub fn de_bruijn_check(
    base: &GaussianMixture,
    t0: f64,
    dt: f64,
    opts: &EstimateOptions,
) -> Result<DeBruijnOutcome> {
    if !(dt > 0.0 && dt < t0) {
        return Err(Error::invalid(format!("need 0 < dt < t0, got dt = {dt}, t0 = {t0}")));
    }
    let at = base.with_variance(t0)?;
    let derivative = match opts.resolve(&at, true) {
        EstimateMethod::Exact => EntropyEstimate {
            value: (gaussian_entropy(at.dim(), t0 + dt) - gaussian_entropy(at.dim(), t0 - dt))
                / (2.0 * dt),
            std_error: 0.0,
            method: EstimateMethod::Exact,
        },
        EstimateMethod::Quadrature => {
            let hp = entropy_quadrature(&base.with_variance(t0 + dt)?, opts.span, opts.panels_per_sd)?;
            let hm = entropy_quadrature(&base.with_variance(t0 - dt)?, opts.span, opts.panels_per_sd)?;
            EntropyEstimate {
                value: (hp.value - hm.value) / (2.0 * dt),
                std_error: (hp.std_error + hm.std_error) / (2.0 * dt),
                method: EstimateMethod::Quadrature,
            }
        }
        EstimateMethod::Mc => entropy_difference_mc(base, t0, dt, opts)?,
    };
    let fisher_opts = EstimateOptions {
        seed: crate::exec::derive_seed(opts.seed, 7),
        ..*opts
    };
    let j = fisher_information(&at, &fisher_opts)?;
    let half_fisher = EntropyEstimate {
        value: j.value / 2.0,
        std_error: j.std_error / 2.0,
        method: j.method,
    };
    let discrepancy = (derivative.value - half_fisher.value).abs();
    // third derivative of the entropy of a Gaussian is d/t³; the central
    // difference error is dt²/6 times it
    let d = at.dim() as f64;
    let truncation = d * dt * dt / t0.powi(3);
    let se = (derivative.std_error.powi(2) + half_fisher.std_error.powi(2)).sqrt();
    let rounding = if derivative.method == EstimateMethod::Mc { 0.0 } else { 1e-12 / dt };
    let allowance = 4.0 * se + truncation + rounding;
    Ok(DeBruijnOutcome {
        derivative,
        half_fisher,
        discrepancy,
        allowance,
        passed: discrepancy <= allowance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_mixture(atoms: &[f64], weights: &[f64], v: f64) -> GaussianMixture {
        GaussianMixture::new(PointSet::new(1, atoms.to_vec()).unwrap(), weights.to_vec(), v).unwrap()
    }

    #[test]
    fn density_of_standard_normal() {
        let g = GaussianMixture::gaussian(&[0.0], 1.0).unwrap();
        assert!((mixture_density(&g, &[0.0]).unwrap() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn density_matches_direct_sum() {
        let g = line_mixture(&[-1.0, 0.3, 2.0], &[0.2, 0.5, 0.3], 0.7);
        for &x in &[-3.0, 0.0, 0.9, 4.0] {
            let direct: f64 = [(-1.0f64, 0.2f64), (0.3, 0.5), (2.0, 0.3)]
                .iter()
                .map(|(a, w)| w * (-(x - a) * (x - a) / 1.4).exp() / (2.0 * PI * 0.7f64).sqrt())
                .sum();
            assert!((mixture_density(&g, &[x]).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_merges_and_normalizes() {
        let x = line_mixture(&[0.0, 1.0], &[0.5, 0.5], 0.5);
        let y = line_mixture(&[0.0, 1.0], &[0.5, 0.5], 0.25);
        let s = convolve_mixtures(&x, &y).unwrap();
        assert_eq!(s.atoms().coords(), &[0.0, 1.0, 2.0]);
        assert_eq!(s.weights(), &[0.25, 0.5, 0.25]);
        assert_eq!(s.variance(), 0.75);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre();
        let w: f64 = rule.iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
        let x30: f64 = rule.iter().map(|(x, w)| w * x.powi(30)).sum();
        assert!((x30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_single_gaussian() {
        for &v in &[0.01, 1.0, 9.0] {
            let h = entropy_quadrature(&GaussianMixture::gaussian(&[3.0], v).unwrap(), 12.0, 4).unwrap();
            assert!((h.value - gaussian_entropy(1, v)).abs() < 1e-8, "{v}: {h:?}");
            assert!(h.std_error < 1e-25);
        }
    }

    #[test]
    fn quadrature_far_pair_approaches_ln_two() {
        let g = line_mixture(&[0.0, 100.0], &[0.5, 0.5], 1.0);
        let h = entropy_quadrature(&g, 12.0, 4).unwrap();
        assert!((h.value - 2f64.ln() - gaussian_entropy(1, 1.0)).abs() < 1e-10);
    }

    #[test]
    fn quadrature_refinement_is_stable() {
        let g = line_mixture(&[-0.4, 0.5, 2.0], &[0.3, 0.3, 0.4], 0.3);
        let a = entropy_quadrature(&g, 12.0, 4).unwrap().value;
        let b = entropy_quadrature(&g, 12.0, 8).unwrap().value;
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn mc_agrees_with_quadrature() {
        let g = line_mixture(&[-1.0, 1.5], &[0.4, 0.6], 0.5);
        let q = entropy_quadrature(&g, 12.0, 4).unwrap().value;
        let m = entropy_mc(&g, 400_000, 3, 4).unwrap();
        assert!((m.value - q).abs() < 3.0 * m.std_error, "{m:?} vs {q}");
    }

    #[test]
    fn fisher_single_gaussian_and_shift_invariance() {
        let g = GaussianMixture::gaussian(&[0.0, 0.0], 0.5).unwrap();
        let j = fisher_information_mc(&g, 200_000, 1, 4).unwrap();
        assert!((j.value - 4.0).abs() < 4.0 * j.std_error);
        let m = line_mixture(&[0.0, 1.0], &[0.5, 0.5], 0.4);
        let a = fisher_quadrature(&m, 12.0, 4).unwrap().value;
        let b = fisher_quadrature(&m.translated(&[17.0]).unwrap(), 12.0, 4).unwrap().value;
        assert!((a - b).abs() < 1e-10);
        assert!(a < 1.0 / 0.4);
        let mc = fisher_information_mc(&m, 400_000, 2, 4).unwrap();
        assert!((mc.value - a).abs() < 4.0 * mc.std_error);
    }

    #[test]
    fn single_atom_epi_is_strict_by_half_d() {
        let x = PointSet::new(2, vec![0.0, 0.0]).unwrap();
        let out = reverse_epi_check(&x, &[1.0], &x, &[1.0], 0.7, &EstimateOptions::default()).unwrap();
        assert!(out.report.passed());
        assert!((out.report.slack.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pointwise_equality_when_a_equals_b() {
        let a = [0.3, -1.2];
        let lhs = pointwise_log_ratio(&a, &a, 0.8).unwrap();
        assert!((lhs - (PI * 0.8f64).ln()).abs() < 1e-12);
        assert!(pointwise_lemma_check(&a, &a, 0.8).unwrap());
        assert!(pointwise_log_ratio(&a, &[-0.3, 1.2], 0.8).unwrap() > lhs);
    }

    #[test]
    fn de_bruijn_single_gaussian_and_pair() {
        let g = GaussianMixture::gaussian(&[0.0], 1.0).unwrap();
        let out = de_bruijn_check(&g, 1.0, 1e-3, &EstimateOptions::default()).unwrap();
        assert!(out.passed, "{out:?}");
        let m = line_mixture(&[0.0, 1.5], &[0.5, 0.5], 1.0);
        let out = de_bruijn_check(&m, 0.5, 1e-3, &EstimateOptions::quadrature()).unwrap();
        assert!(out.passed, "{out:?}");
    }
}
