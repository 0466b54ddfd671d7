//! Point sets, the two norm bodies (Euclidean ball and cube), parallel-set
//! membership and greedy packings.

use serde::{Deserialize, Serialize};
use libm::lgamma as ln_gamma;

use crate::error::{Error, Result};

/// A finite, nonempty set of points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("point set dimension must be positive"));
        }
        if coords.is_empty() {
            return Err(Error::invalid("point set must be nonempty"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { dim, coords })
    }

    /// Builds a point set from rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("point set must be nonempty"))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::invalid(format!(
                    "ragged point set: row {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Per-axis minimum and maximum coordinates.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Subset of the points at the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::new(self.dim, coords)
    }

    /// All pairwise sums `x_i + y_j`, i.e. the Minkowski sum of two finite sets.
    pub fn minkowski_sum(&self, other: &PointSet) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut coords = Vec::with_capacity(self.len() * other.len() * self.dim);
        for x in self.iter() {
            for y in other.iter() {
                coords.extend(x.iter().zip(y).map(|(a, b)| a + b));
            }
        }
        Self::new(self.dim, coords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Euclidean ball `B`.
    L2,
    /// Cube `C = [-1, 1]^d`.
    Linf,
}

impl NormKind {
    #[inline]
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            NormKind::L2 => squared_l2(x, y).sqrt(),
            NormKind::Linf => x
                .iter()
                .zip(y)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())),
        }
    }

    /// `distance(x, y) <= radius`, without a square root for L2.
    #[inline]
    pub fn within(self, x: &[f64], y: &[f64], radius: f64) -> bool {
        match self {
            NormKind::L2 => squared_l2(x, y) <= radius * radius,
            NormKind::Linf => x.iter().zip(y).all(|(a, b)| (a - b).abs() <= radius),
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" | "ball" | "b" => Ok(NormKind::L2),
            "linf" | "cube" | "c" => Ok(NormKind::Linf),
            other => Err(Error::invalid(format!("unknown norm '{other}' (use l2 or linf)"))),
        }
    }
}

#[inline]
pub fn squared_l2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::invalid(format!(
            "dimension mismatch: expected {expected}, got {got}"
        )));
    }
    Ok(())
}

/// `A ⊕ rK` for a finite base set `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelSetSpec {
    pub base: PointSet,
    pub norm: NormKind,
    pub radius: f64,
}

impl ParallelSetSpec {
    pub fn new(base: PointSet, norm: NormKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { base, norm, radius })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Same base and norm with a different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.base.clone(), self.norm, radius)
    }

    /// Membership without the dimension check; `x` must have `dim()` entries.
    #[inline]
    pub fn contains_unchecked(&self, x: &[f64]) -> bool {
        self.contains_at_radius(x, self.radius)
    }

    #[inline]
    pub(crate) fn contains_at_radius(&self, x: &[f64], radius: f64) -> bool {
        self.base.iter().any(|a| self.norm.within(x, a, radius))
    }

    /// Tight axis-aligned box of `A ⊕ (r + pad)K`.
    pub fn bounding_box(&self, pad: f64) -> (Vec<f64>, Vec<f64>) {
        let (mut lo, mut hi) = self.base.bounds();
        let grow = self.radius + pad;
        lo.iter_mut().for_each(|v| *v -= grow);
        hi.iter_mut().for_each(|v| *v += grow);
        (lo, hi)
    }
}

pub fn distance_to_set(x: &[f64], a: &PointSet, norm: NormKind) -> Result<f64> {
    check_dim(a.dim(), x.len())?;
    Ok(a.iter()
        .map(|p| norm.distance(x, p))
        .fold(f64::INFINITY, f64::min))
}

/// Closed membership test: `d(x, A) <= r`.
pub fn contains(spec: &ParallelSetSpec, x: &[f64]) -> Result<bool> {
    check_dim(spec.dim(), x.len())?;
    Ok(spec.contains_unchecked(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionConstants {
    pub dim: usize,
    /// Volume of the unit ball.
    pub omega_d: f64,
    /// Surface area of the unit sphere, `d * omega_d`.
    pub big_omega_d: f64,
}

/// `ln ω_d = (d/2) ln π − ln Γ(1 + d/2)`.
pub fn ln_unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(1.0 + h)
}

pub fn dimension_constants(d: usize) -> Result<DimensionConstants> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let omega_d = ln_unit_ball_volume(d).exp();
    Ok(DimensionConstants {
        dim: d,
        omega_d,
        big_omega_d: d as f64 * omega_d,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingResult {
    pub representatives: PointSet,
    /// Indices of the representatives in the input set.
    pub indices: Vec<usize>,
    pub count: usize,
    pub radius: f64,
    pub norm: NormKind,
}

/// First-fit maximal `r`-packing: scan in input order and keep a point iff it
/// is farther than `r` from every point kept so far.
///
/// The result is maximal, so `count` witnesses the packing number for the
/// purposes of the volume/packing bounds, but it need not be optimal.
pub fn greedy_packing(a: &PointSet, r: f64, norm: NormKind) -> Result<PackingResult> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("packing radius must be positive, got {r}")));
    }
    let mut indices: Vec<usize> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        if indices.iter().all(|&j| norm.distance(x, a.point(j)) > r) {
            indices.push(i);
        }
    }
    Ok(PackingResult {
        representatives: a.select(&indices)?,
        count: indices.len(),
        indices,
        radius: r,
        norm,
    })
}
