//! Independent numerical references for planar unions of disks and squares:
//! area by counting pixel centres, perimeter by the Cauchy–Crofton formula.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{NormKind, PointSet};

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_DIRECTIONS: usize = 128;
pub const DEFAULT_LINES: usize = 1024;

fn require_planar(centers: &PointSet, r: f64) -> Result<()> {
    if centers.dim() != 2 {
        return Err(Error::invalid("oracle needs planar points"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

fn merge(intervals: &mut [(f64, f64)]) -> usize {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut count = 0;
    let mut end = f64::NEG_INFINITY;
    for &(lo, hi) in intervals.iter() {
        if lo > end {
            count += 1;
            end = hi;
        } else {
            end = end.max(hi);
        }
    }
    count
}

/// Area of `⋃ (c + rK)` from a `grid × grid` raster of its bounding box: each
/// pixel counts when its centre lies in the union.
pub fn raster_area(centers: &PointSet, r: f64, norm: NormKind, grid: usize) -> Result<f64> {
    require_planar(centers, r)?;
    let (lo, hi) = centers.bounds();
    let (x0, y0) = (lo[0] - r, lo[1] - r);
    let hx = (hi[0] - lo[0] + 2.0 * r) / grid as f64;
    let hy = (hi[1] - lo[1] + 2.0 * r) / grid as f64;
    let mut count: u64 = 0;
    let mut spans: Vec<(f64, f64)> = Vec::new();
    for row in 0..grid {
        let y = y0 + (row as f64 + 0.5) * hy;
        spans.clear();
        for c in centers.iter() {
            let dy = (y - c[1]).abs();
            if dy <= r {
                let half = match norm {
                    NormKind::L2 => (r * r - dy * dy).sqrt(),
                    NormKind::Linf => r,
                };
                spans.push((c[0] - half, c[0] + half));
            }
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        // pixel k covered iff x0 + (k + 1/2) hx ∈ [a, b]
        let mut next_free: i64 = 0;
        for &(a, b) in &spans {
            let first = (((a - x0) / hx - 0.5).ceil() as i64).max(next_free);
            let last = (((b - x0) / hx - 0.5).floor() as i64).min(grid as i64 - 1);
            if last >= first {
                count += (last - first + 1) as u64;
                next_free = last + 1;
            }
        }
    }
    Ok(count as f64 * hx * hy)
}

/// Parameter range `[t0, t1]` of the line `p·n + t·u` inside `c + rK`.
fn chord(c: &[f64], r: f64, norm: NormKind, u: [f64; 2], n: [f64; 2], p: f64) -> Option<(f64, f64)> {
    match norm {
        NormKind::L2 => {
            let off = n[0] * c[0] + n[1] * c[1] - p;
            if off.abs() > r {
                return None;
            }
            let mid = u[0] * c[0] + u[1] * c[1];
            let half = (r * r - off * off).sqrt();
            Some((mid - half, mid + half))
        }
        NormKind::Linf => {
            let base = [p * n[0], p * n[1]];
            let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
            for k in 0..2 {
                let (lo, hi) = (c[k] - r - base[k], c[k] + r - base[k]);
                if u[k].abs() < 1e-300 {
                    if lo > 0.0 || hi < 0.0 {
                        return None;
                    }
                } else {
                    let (a, b) = (lo / u[k], hi / u[k]);
                    t0 = t0.max(a.min(b));
                    t1 = t1.min(a.max(b));
                }
            }
            (t0 <= t1).then_some((t0, t1))
        }
    }
}

/// Boundary length by Cauchy–Crofton: `½ ∫₀^π ∫ #(line ∩ ∂A) dp dθ`, with
/// midpoint rules in both the direction and the offset.
pub fn crofton_perimeter(
    centers: &PointSet,
    r: f64,
    norm: NormKind,
    directions: usize,
    lines: usize,
) -> Result<f64> {
    require_planar(centers, r)?;
    let reach = match norm {
        NormKind::L2 => r,
        NormKind::Linf => r * std::f64::consts::SQRT_2,
    };
    let mut total = 0.0;
    let mut spans: Vec<(f64, f64)> = Vec::new();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(centers.len());
    for k in 0..directions {
        let theta = (k as f64 + 0.5) * PI / directions as f64;
        let u = [theta.cos(), theta.sin()];
        let n = [-u[1], u[0]];
        order.clear();
        order.extend(centers.iter().enumerate().map(|(i, c)| (n[0] * c[0] + n[1] * c[1], i)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let p_lo = order[0].0 - reach;
        let p_hi = order[order.len() - 1].0 + reach;
        let h = (p_hi - p_lo) / lines as f64;
        let mut start = 0;
        let mut crossings = 0usize;
        for l in 0..lines {
            let p = p_lo + (l as f64 + 0.5) * h;
            while start < order.len() && order[start].0 < p - reach {
                start += 1;
            }
            spans.clear();
            for &(proj, i) in &order[start..] {
                if proj > p + reach {
                    break;
                }
                if let Some(s) = chord(centers.point(i), r, norm, u, n, p) {
                    spans.push(s);
                }
            }
            crossings += 2 * merge(&mut spans);
        }
        total += crossings as f64 * h;
    }
    Ok(0.5 * total * PI / directions as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> PointSet {
        PointSet::new(2, vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn single_disk() {
        let a = raster_area(&origin(), 1.0, NormKind::L2, 1024).unwrap();
        assert!((a - PI).abs() < 1e-3 * PI);
        let p = crofton_perimeter(&origin(), 1.0, NormKind::L2, 64, 1024).unwrap();
        assert!((p - 2.0 * PI).abs() < 1e-3 * 2.0 * PI, "{p}");
    }

    #[test]
    fn single_square() {
        let a = raster_area(&origin(), 1.0, NormKind::Linf, 256).unwrap();
        assert!((a - 4.0).abs() < 1e-12);
        let p = crofton_perimeter(&origin(), 1.0, NormKind::Linf, 64, 1024).unwrap();
        assert!((p - 8.0).abs() < 8e-3, "{p}");
    }

    #[test]
    fn two_separate_disks() {
        let c = PointSet::new(2, vec![0.0, 0.0, 5.0, 0.0]).unwrap();
        let p = crofton_perimeter(&c, 1.0, NormKind::L2, 128, 2048).unwrap();
        assert!((p - 4.0 * PI).abs() < 1e-2 * 4.0 * PI, "{p}");
    }
}
