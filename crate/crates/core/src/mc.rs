//! Monte Carlo volume, Lebesgue shell and Gaussian shell estimators, plus the
//! Kneser shell-scaling and inscribed solid-angle checks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::exec::{derive_seed, map_blocks, map_indices};
use crate::geometry::{check_dim, NormKind, ParallelSetSpec, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Shell width `δ`; `None` means `r / 1000` for parallel sets and `1e-3`
    /// for other predicates.
    pub shell_delta: Option<f64>,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            shell_delta: None,
            workers: crate::exec::default_workers(),
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.shell_delta = Some(delta);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        if let Some(d) = self.shell_delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::invalid(format!("shell delta must be positive, got {d}")));
            }
        }
        Ok(())
    }

    fn delta_or(&self, default: f64) -> f64 {
        self.shell_delta.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples_used: u64,
}

impl MeasureEstimate {
    /// `scale · p̂` with the binomial standard error `scale · √(p̂(1-p̂)/n)`.
    pub fn from_proportion(hits: u64, n: u64, scale: f64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            value: scale * p,
            std_error: scale * (p * (1.0 - p) / n as f64).sqrt(),
            samples_used: n,
        }
    }

    /// Sample mean with the standard error of the mean.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error: (var / nf).sqrt(),
            samples_used: n,
        }
    }

    /// `|value - target| ≤ k · std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Region of space a predicate lives in, for choosing a sampling domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Extent {
    Bounded { lo: Vec<f64>, hi: Vec<f64> },
    Unbounded,
}

/// A closed set given by a deterministic, boundary-inclusive membership test
/// and an analytic dilation `A ⊕ δK`.
pub trait MembershipPredicate: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    fn contains_dilated(&self, x: &[f64], delta: f64) -> bool;
    /// Bounding box of `A ⊕ δK`.
    fn extent(&self, delta: f64) -> Extent;
}

impl MembershipPredicate for ParallelSetSpec {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.contains_unchecked(x)
    }

    fn contains_dilated(&self, x: &[f64], delta: f64) -> bool {
        self.contains_at_radius(x, self.radius + delta)
    }

    fn extent(&self, delta: f64) -> Extent {
        let (lo, hi) = self.bounding_box(delta);
        Extent::Bounded { lo, hi }
    }
}

/// `{x : ⟨n, x⟩ ≤ offset}` with unit normal `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) || !offset.is_finite() {
            return Err(Error::invalid("halfspace needs a nonzero finite normal"));
        }
        Ok(Self {
            normal: normal.iter().map(|v| v / norm).collect(),
            offset: offset / norm,
        })
    }

    /// `{x : x_axis ≤ offset}` in `R^dim`.
    pub fn axis(dim: usize, axis: usize, offset: f64) -> Result<Self> {
        if axis >= dim {
            return Err(Error::invalid(format!("axis {axis} out of range for dim {dim}")));
        }
        let mut normal = vec![0.0; dim];
        normal[axis] = 1.0;
        Self::new(normal, offset)
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

impl MembershipPredicate for Halfspace {
    fn dim(&self) -> usize {
        self.normal.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.signed_distance(x) <= 0.0
    }

    fn contains_dilated(&self, x: &[f64], delta: f64) -> bool {
        self.signed_distance(x) <= delta
    }

    fn extent(&self, _delta: f64) -> Extent {
        Extent::Unbounded
    }
}

/// All of `R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSpace(pub usize);

impl MembershipPredicate for FullSpace {
    fn dim(&self) -> usize {
        self.0
    }

    fn contains(&self, _x: &[f64]) -> bool {
        true
    }

    fn contains_dilated(&self, _x: &[f64], _delta: f64) -> bool {
        true
    }

    fn extent(&self, _delta: f64) -> Extent {
        Extent::Unbounded
    }
}

fn box_volume(lo: &[f64], hi: &[f64]) -> f64 {
    lo.iter().zip(hi).map(|(a, b)| b - a).product()
}

#[inline]
fn fill_uniform(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64], x: &mut [f64]) {
    for k in 0..x.len() {
        x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
    }
}

#[inline]
fn fill_normal(rng: &mut ChaCha8Rng, sigma: f64, x: &mut [f64]) {
    for v in x.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v = sigma * z;
    }
}

/// Smallest `K`-distance from `x` to the base points.
#[inline]
fn min_distance(base: &PointSet, norm: NormKind, x: &[f64]) -> f64 {
    match norm {
        NormKind::L2 => base
            .iter()
            .map(|p| crate::geometry::squared_l2(x, p))
            .fold(f64::INFINITY, f64::min)
            .sqrt(),
        NormKind::Linf => base
            .iter()
            .map(|p| NormKind::Linf.distance(x, p))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Counts uniform samples from `[lo, hi]` satisfying `hit`.
fn count_uniform<F>(lo: &[f64], hi: &[f64], cfg: &McConfig, hit: F) -> u64
where
    F: Fn(&[f64]) -> bool + Sync + Send,
{
    let dim = lo.len();
    map_blocks(cfg.samples, cfg.seed, cfg.workers, |_, range, rng| {
        let mut x = vec![0.0; dim];
        let mut hits = 0u64;
        for _ in range {
            fill_uniform(rng, lo, hi, &mut x);
            hits += u64::from(hit(&x));
        }
        hits
    })
    .into_iter()
    .sum()
}

/// `λ(A ⊕ rK)` by hit-or-miss sampling over the tight bounding box.
pub fn mc_volume(spec: &ParallelSetSpec, cfg: &McConfig) -> Result<MeasureEstimate> {
    cfg.validate()?;
    let (lo, hi) = spec.bounding_box(0.0);
    let vol = box_volume(&lo, &hi);
    let r = spec.radius;
    let hits = count_uniform(&lo, &hi, cfg, |x| min_distance(&spec.base, spec.norm, x) <= r);
    Ok(MeasureEstimate::from_proportion(hits, cfg.samples, vol))
}

/// `λ(A_{r+δ} \ A_r) / δ`, the Minkowski surface area at fixed `δ`.
pub fn mc_shell_lebesgue(spec: &ParallelSetSpec, cfg: &McConfig) -> Result<MeasureEstimate> {
    cfg.validate()?;
    let r = spec.radius;
    let delta = cfg.delta_or(r / 1000.0);
    let (lo, hi) = spec.bounding_box(delta);
    let vol = box_volume(&lo, &hi);
    let hits = count_uniform(&lo, &hi, cfg, |x| {
        let dist = min_distance(&spec.base, spec.norm, x);
        dist > r && dist <= r + delta
    });
    Ok(MeasureEstimate::from_proportion(hits, cfg.samples, vol / delta))
}

/// `(γ_σ(A ⊕ δK) - γ_σ(A)) / δ` under `N(0, σ² I)`: the upper Gaussian
/// surface area at fixed `δ`.
pub fn mc_gaussian_shell<P: MembershipPredicate + ?Sized>(
    pred: &P,
    cfg: &McConfig,
    sigma: f64,
) -> Result<MeasureEstimate> {
    cfg.validate()?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    let delta = cfg.delta_or(1e-3);
    let dim = pred.dim();
    let hits: u64 = map_blocks(cfg.samples, cfg.seed, cfg.workers, |_, range, rng| {
        let mut x = vec![0.0; dim];
        let mut hits = 0u64;
        for _ in range {
            fill_normal(rng, sigma, &mut x);
            hits += u64::from(pred.contains_dilated(&x, delta) && !pred.contains(&x));
        }
        hits
    })
    .into_iter()
    .sum();
    Ok(MeasureEstimate::from_proportion(hits, cfg.samples, 1.0 / delta))
}

/// Gaussian measure `γ_σ(A)`.
pub fn mc_gaussian_measure<P: MembershipPredicate + ?Sized>(
    pred: &P,
    cfg: &McConfig,
    sigma: f64,
) -> Result<MeasureEstimate> {
    cfg.validate()?;
    let dim = pred.dim();
    let hits: u64 = map_blocks(cfg.samples, cfg.seed, cfg.workers, |_, range, rng| {
        let mut x = vec![0.0; dim];
        let mut hits = 0u64;
        for _ in range {
            fill_normal(rng, sigma, &mut x);
            hits += u64::from(pred.contains(&x));
        }
        hits
    })
    .into_iter()
    .sum();
    Ok(MeasureEstimate::from_proportion(hits, cfg.samples, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KneserEstimate {
    /// `λ((A ⊕ tbK) \ (A ⊕ taK))`.
    pub lhs: MeasureEstimate,
    /// `λ((A ⊕ bK) \ (A ⊕ aK))`.
    pub rhs: MeasureEstimate,
    /// Standard error of `lhs - t^d rhs` under common random numbers.
    pub diff_std_error: f64,
    pub scale: f64,
}

/// Estimates both shells of the scaling inequality
/// `λ((A⊕tbK) \ (A⊕taK)) ≤ t^d λ((A⊕bK) \ (A⊕aK))` from one sample stream.
pub fn kneser_shells(
    a: &PointSet,
    norm: NormKind,
    inner: f64,
    outer: f64,
    t: f64,
    cfg: &McConfig,
) -> Result<KneserEstimate> {
    cfg.validate()?;
    if !(inner > 0.0 && inner <= outer && outer.is_finite()) {
        return Err(Error::invalid(format!(
            "need 0 < a <= b, got a = {inner}, b = {outer}"
        )));
    }
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::invalid(format!("scale t must be at least 1, got {t}")));
    }
    let spec = ParallelSetSpec::new(a.clone(), norm, t * outer)?;
    let (lo, hi) = spec.bounding_box(0.0);
    let vol = box_volume(&lo, &hi);
    let dim = a.dim();
    let counts = map_blocks(cfg.samples, cfg.seed, cfg.workers, |_, range, rng| {
        let mut x = vec![0.0; dim];
        let mut c = [0u64; 3];
        for _ in range {
            fill_uniform(rng, &lo, &hi, &mut x);
            let dist = min_distance(a, norm, &x);
            let in_l = dist > t * inner && dist <= t * outer;
            let in_r = dist > inner && dist <= outer;
            c[0] += u64::from(in_l);
            c[1] += u64::from(in_r);
            c[2] += u64::from(in_l && in_r);
        }
        c
    })
    .into_iter()
    .fold([0u64; 3], |acc, c| [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]);

    let n = cfg.samples as f64;
    let scale = t.powi(dim as i32);
    let (pl, pr, pb) = (counts[0] as f64 / n, counts[1] as f64 / n, counts[2] as f64 / n);
    let mean = pl - scale * pr;
    let second = pl + scale * scale * pr - 2.0 * scale * pb;
    let var = (second - mean * mean).max(0.0);
    Ok(KneserEstimate {
        lhs: MeasureEstimate::from_proportion(counts[0], cfg.samples, vol),
        rhs: MeasureEstimate::from_proportion(counts[1], cfg.samples, vol),
        diff_std_error: vol * (var / n).sqrt(),
        scale,
    })
}

pub fn kneser_shell_check(
    a: &PointSet,
    norm: NormKind,
    inner: f64,
    outer: f64,
    t: f64,
    cfg: &McConfig,
) -> Result<BoundReport> {
    let est = kneser_shells(a, norm, inner, outer, t, cfg)?;
    Ok(BoundReport::compare(
        "kneser_shell",
        est.scale * est.rhs.value,
        est.lhs.value,
        est.diff_std_error,
    )
    .with_note(format!("t={t} a={inner} b={outer}")))
}

/// Spherical cap `{y ∈ S^{d-1} : ⟨y, axis⟩ ≥ cos(half_angle)}` on the unit
/// sphere centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalCap {
    axis: Vec<f64>,
    cos_half_angle: f64,
}

impl SphericalCap {
    pub fn new(axis: Vec<f64>, half_angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("cap axis must be nonzero"));
        }
        if !(half_angle > 0.0 && half_angle < std::f64::consts::PI) {
            return Err(Error::invalid(format!(
                "cap half angle must lie in (0, π), got {half_angle}"
            )));
        }
        Ok(Self {
            axis: axis.iter().map(|v| v / norm).collect(),
            cos_half_angle: half_angle.cos(),
        })
    }

    pub fn dim(&self) -> usize {
        self.axis.len()
    }

    #[inline]
    fn contains(&self, y: &[f64]) -> bool {
        self.axis.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() >= self.cos_half_angle
    }

    /// Does the ray from `apex` (inside the closed unit ball) along unit
    /// direction `u` leave the ball through the cap?
    #[inline]
    fn ray_hits(&self, apex: &[f64], u: &[f64], y: &mut [f64]) -> bool {
        let b: f64 = apex.iter().zip(u).map(|(p, v)| p * v).sum();
        let c: f64 = apex.iter().map(|p| p * p).sum::<f64>() - 1.0;
        let t = -b + (b * b - c).max(0.0).sqrt();
        for k in 0..y.len() {
            y[k] = apex[k] + t * u[k];
        }
        self.contains(y)
    }
}

/// Uniform unit vector written into `u`.
#[inline]
pub fn fill_direction(rng: &mut ChaCha8Rng, u: &mut [f64]) {
    loop {
        fill_normal(rng, 1.0, u);
        let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-300 {
            u.iter_mut().for_each(|v| *v /= n);
            return;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolidAngleComparison {
    /// Fraction of directions from the apex whose ray hits the cap.
    pub at_apex: MeasureEstimate,
    /// Same fraction seen from the sphere's centre.
    pub at_center: MeasureEstimate,
    /// Standard error of `at_apex - at_center / 2^{d-1}` (common directions).
    pub diff_std_error: f64,
}

impl SolidAngleComparison {
    pub fn ratio(&self) -> f64 {
        self.at_apex.value / self.at_center.value
    }
}

/// Normalised solid angles of `cap` seen from `apex` and from the centre,
/// estimated by uniform direction sampling with shared directions.
pub fn compare_solid_angles(
    apex: &[f64],
    cap: &SphericalCap,
    cfg: &McConfig,
) -> Result<SolidAngleComparison> {
    cfg.validate()?;
    check_dim(cap.dim(), apex.len())?;
    let d = cap.dim();
    if d < 2 {
        return Err(Error::invalid("solid angles need d >= 2"));
    }
    if apex.iter().map(|v| v * v).sum::<f64>() > 1.0 + 1e-12 {
        return Err(Error::invalid("apex must lie in the closed unit ball"));
    }
    let weight = 0.5f64.powi(d as i32 - 1);
    let center = vec![0.0; d];
    let counts = map_blocks(cfg.samples, cfg.seed, cfg.workers, |_, range, rng| {
        let mut u = vec![0.0; d];
        let mut y = vec![0.0; d];
        let mut c = [0u64; 3];
        for _ in range {
            fill_direction(rng, &mut u);
            let ha = cap.ray_hits(apex, &u, &mut y);
            let hc = cap.ray_hits(&center, &u, &mut y);
            c[0] += u64::from(ha);
            c[1] += u64::from(hc);
            c[2] += u64::from(ha && hc);
        }
        c
    })
    .into_iter()
    .fold([0u64; 3], |acc, c| [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]);
    let n = cfg.samples as f64;
    let (pa, pc, pb) = (counts[0] as f64 / n, counts[1] as f64 / n, counts[2] as f64 / n);
    let mean = pa - weight * pc;
    let second = pa + weight * weight * pc - 2.0 * weight * pb;
    Ok(SolidAngleComparison {
        at_apex: MeasureEstimate::from_proportion(counts[0], cfg.samples, 1.0),
        at_center: MeasureEstimate::from_proportion(counts[1], cfg.samples, 1.0),
        diff_std_error: ((second - mean * mean).max(0.0) / n).sqrt(),
    })
}

/// Uniform point of the closed unit ball in `R^d`.
pub fn uniform_in_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let mut u = vec![0.0; d];
    fill_direction(rng, &mut u);
    let radius = rng.random::<f64>().powf(1.0 / d as f64);
    u.iter_mut().for_each(|v| *v *= radius);
    u
}

/// Checks `Ω(S; x0) ≥ Ω(S; x_i) / 2^{d-1}` for `trials` random caps of the
/// given half angle and random apexes `x0` in the ball; returns the worst
/// trial.
pub fn inscribed_angle_check(
    d: usize,
    cap_half_angle: f64,
    trials: usize,
    cfg: &McConfig,
) -> Result<BoundReport> {
    if d < 2 {
        return Err(Error::invalid("inscribed angle check needs d >= 2"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let weight = 0.5f64.powi(d as i32 - 1);
    let per_trial = |trial: usize| -> Result<(BoundReport, f64)> {
        let mut rng = crate::exec::block_rng(derive_seed(cfg.seed, trial as u64), u64::MAX);
        let mut axis = vec![0.0; d];
        fill_direction(&mut rng, &mut axis);
        let cap = SphericalCap::new(axis, cap_half_angle)?;
        let apex = uniform_in_ball(&mut rng, d);
        let trial_cfg = cfg.with_seed(derive_seed(cfg.seed, trial as u64 + 1));
        let cmp = compare_solid_angles(&apex, &cap, &trial_cfg)?;
        let report = BoundReport::compare(
            "inscribed_solid_angle",
            cmp.at_apex.value,
            weight * cmp.at_center.value,
            cmp.diff_std_error,
        );
        Ok((report, cmp.ratio()))
    };
    // trials in sequence; each estimate is itself parallel
    let results = map_indices(trials, 1, per_trial)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let min_ratio = results
        .iter()
        .map(|(_, r)| *r)
        .fold(f64::INFINITY, f64::min);
    let worst = BoundReport::worst(results.into_iter().map(|(r, _)| r)).expect("trials > 0");
    Ok(worst.with_note(format!(
        "d={d} half_angle={cap_half_angle} trials={trials} min_ratio={min_ratio:.6} floor={weight}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn single(dim: usize, norm: NormKind, r: f64) -> ParallelSetSpec {
        ParallelSetSpec::new(PointSet::new(dim, vec![0.0; dim]).unwrap(), norm, r).unwrap()
    }

    #[test]
    fn ball_and_cube_volumes() {
        let cfg = McConfig::new(400_000, 11);
        let ball = mc_volume(&single(3, NormKind::L2, 1.0), &cfg).unwrap();
        assert!(ball.within(4.0 * PI / 3.0, 3.0), "{ball:?}");
        let cube = mc_volume(&single(4, NormKind::Linf, 1.0), &cfg).unwrap();
        assert_eq!(cube.value, 16.0);
        assert_eq!(cube.std_error, 0.0);
    }

    #[test]
    fn shell_of_single_disk_and_square() {
        let cfg = McConfig::new(2_000_000, 5).with_delta(1e-3);
        let circle = mc_shell_lebesgue(&single(2, NormKind::L2, 1.0), &cfg).unwrap();
        assert!((circle.value - 2.0 * PI).abs() <= 3.0 * circle.std_error + PI * 1e-3, "{circle:?}");
        let square = mc_shell_lebesgue(&single(2, NormKind::Linf, 1.0), &cfg).unwrap();
        assert!((square.value - 8.0).abs() <= 3.0 * square.std_error + 4e-3, "{square:?}");
    }

    #[test]
    fn halfspace_gaussian_shell() {
        let hs = Halfspace::axis(2, 0, 0.0).unwrap();
        let est = mc_gaussian_shell(&hs, &McConfig::new(2_000_000, 3).with_delta(1e-2), 1.0).unwrap();
        let target = 1.0 / (2.0 * PI).sqrt();
        assert!(est.within(target, 3.0) || (est.value - target).abs() < 2e-3, "{est:?}");
    }

    #[test]
    fn full_space_has_unit_mass_and_no_shell() {
        let cfg = McConfig::new(10_000, 1);
        assert_eq!(mc_gaussian_measure(&FullSpace(3), &cfg, 1.0).unwrap().value, 1.0);
        assert_eq!(mc_gaussian_shell(&FullSpace(3), &cfg, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn far_outside_gaussian_mass_has_empty_shell() {
        let spec = single(2, NormKind::L2, 30.0);
        let est = mc_gaussian_shell(&spec, &McConfig::new(50_000, 2), 1.0).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn kneser_identity_and_ball_scaling() {
        let a = PointSet::new(2, vec![0.0, 0.0]).unwrap();
        let cfg = McConfig::new(200_000, 9);
        let same = kneser_shells(&a, NormKind::L2, 0.5, 1.0, 1.0, &cfg).unwrap();
        assert_eq!(same.lhs.value, same.rhs.value);
        assert_eq!(same.diff_std_error, 0.0);
        let scaled = kneser_shells(&a, NormKind::L2, 0.5, 1.0, 1.5, &cfg).unwrap();
        let exact_lhs = PI * (1.5f64.powi(2) - 0.75f64.powi(2));
        assert!(scaled.lhs.within(exact_lhs, 4.0));
        assert!((scaled.lhs.value - scaled.scale * scaled.rhs.value).abs() <= 4.0 * scaled.diff_std_error);
        assert!(kneser_shells(&a, NormKind::L2, 1.0, 0.5, 1.5, &cfg).is_err());
        assert!(kneser_shells(&a, NormKind::L2, 0.5, 1.0, 0.9, &cfg).is_err());
    }

    #[test]
    fn apex_at_center_gives_ratio_one() {
        let cap = SphericalCap::new(vec![0.0, 0.0, 1.0], 0.7).unwrap();
        let cmp = compare_solid_angles(&[0.0, 0.0, 0.0], &cap, &McConfig::new(50_000, 4)).unwrap();
        assert_eq!(cmp.ratio(), 1.0);
    }

    #[test]
    fn inscribed_angle_in_the_plane_is_half() {
        let cap = SphericalCap::new(vec![1.0, 0.0], 0.8).unwrap();
        let cmp = compare_solid_angles(&[-1.0, 0.0], &cap, &McConfig::new(1_000_000, 8)).unwrap();
        assert!((cmp.ratio() - 0.5).abs() < 0.01, "{}", cmp.ratio());
    }

    #[test]
    fn inscribed_angle_sweep_passes() {
        let report = inscribed_angle_check(3, 0.9, 10, &McConfig::new(20_000, 21)).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn estimates_are_worker_independent() {
        let spec = single(3, NormKind::L2, 1.0);
        let a = mc_volume(&spec, &McConfig::new(50_000, 77).with_workers(1)).unwrap();
        let b = mc_volume(&spec, &McConfig::new(50_000, 77).with_workers(4)).unwrap();
        assert_eq!(a, b);
    }
}
