//! Exact boundary, perimeter and area of unions of congruent disks and
//! congruent axis-aligned squares in the plane.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{squared_l2, PointSet};

/// Centers closer than this (in every coordinate) are merged.
pub const DEDUP_TOL: f64 = 1e-12;
/// Exposed arcs or segments shorter than this are dropped.
pub const MIN_PIECE: f64 = 1e-12;
/// Tolerance for deciding that two square edges lie on the same line.
pub const LINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryArc {
    /// Index into [`ArcDecomposition::centers`].
    pub center_index: usize,
    pub theta_start: f64,
    /// `theta_start < theta_end < theta_start + 2π`; may exceed `2π` when the
    /// arc wraps through angle zero.
    pub theta_end: f64,
}

impl BoundaryArc {
    pub fn angle(&self) -> f64 {
        self.theta_end - self.theta_start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcDecomposition {
    /// Deduplicated centers.
    pub centers: PointSet,
    pub radius: f64,
    /// Sorted by center index, then start angle.
    pub arcs: Vec<BoundaryArc>,
}

impl ArcDecomposition {
    pub fn perimeter(&self) -> f64 {
        self.radius * self.arcs.iter().map(BoundaryArc::angle).sum::<f64>()
    }

    /// Green's theorem over the exposed arcs, all traversed counterclockwise
    /// around their own circle.
    pub fn area(&self) -> f64 {
        let r = self.radius;
        0.5 * self
            .arcs
            .iter()
            .map(|arc| {
                let c = self.centers.point(arc.center_index);
                let (s0, c0) = arc.theta_start.sin_cos();
                let (s1, c1) = arc.theta_end.sin_cos();
                r * r * arc.angle() + r * c[0] * (s1 - s0) - r * c[1] * (c1 - c0)
            })
            .sum::<f64>()
    }

    /// Exposed arc length per (deduplicated) circle.
    pub fn arc_length_per_center(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.centers.len()];
        for arc in &self.arcs {
            out[arc.center_index] += self.radius * arc.angle();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySegment {
    pub orientation: Orientation,
    /// `y` for horizontal segments, `x` for vertical ones.
    pub fixed_coord: f64,
    pub span_start: f64,
    pub span_end: f64,
    /// Direction of the outward normal along the fixed axis.
    pub outward_sign: i8,
    pub square_index: usize,
}

impl BoundarySegment {
    pub fn length(&self) -> f64 {
        self.span_end - self.span_start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentDecomposition {
    pub centers: PointSet,
    pub radius: f64,
    pub segments: Vec<BoundarySegment>,
}

impl SegmentDecomposition {
    pub fn perimeter(&self) -> f64 {
        self.segments.iter().map(BoundarySegment::length).sum()
    }

    /// Divergence theorem with the field `(x, 0)`: only vertical edges count.
    pub fn area(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.orientation == Orientation::Vertical)
            .map(|s| f64::from(s.outward_sign) * s.fixed_coord * s.length())
            .sum()
    }
}

fn check_planar(centers: &PointSet, r: f64) -> Result<()> {
    if centers.dim() != 2 {
        return Err(Error::invalid(format!(
            "exact boundary needs planar centers, got dimension {}",
            centers.dim()
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

/// Drops centers that coincide (within [`DEDUP_TOL`]) with an earlier one.
pub fn dedup_centers(centers: &PointSet) -> PointSet {
    let mut keep: Vec<usize> = Vec::with_capacity(centers.len());
    for (i, p) in centers.iter().enumerate() {
        let dup = keep.iter().any(|&j| {
            centers
                .point(j)
                .iter()
                .zip(p)
                .all(|(a, b)| (a - b).abs() <= DEDUP_TOL)
        });
        if !dup {
            keep.push(i);
        }
    }
    centers.select(&keep).expect("nonempty subset")
}

/// Sorts and merges closed intervals; touching intervals are joined.
fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (s, e) in iv {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}

/// Complement of merged intervals inside `[lo, hi]`, keeping pieces longer
/// than [`MIN_PIECE`].
fn complement(merged: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cursor = lo;
    for &(s, e) in merged {
        if s > cursor && s - cursor > MIN_PIECE {
            out.push((cursor, s.min(hi)));
        }
        cursor = cursor.max(e);
        if cursor >= hi {
            break;
        }
    }
    if hi - cursor > MIN_PIECE {
        out.push((cursor, hi));
    }
    out
}

pub fn disk_union_boundary(centers: &PointSet, r: f64) -> Result<ArcDecomposition> {
    check_planar(centers, r)?;
    let centers = dedup_centers(centers);
    let n = centers.len();
    let two_r = 2.0 * r;
    let mut arcs = Vec::new();

    for i in 0..n {
        let ci = centers.point(i);
        let mut covered = Vec::new();
        for j in (0..n).filter(|&j| j != i) {
            let cj = centers.point(j);
            let dist = squared_l2(ci, cj).sqrt();
            // tangent disks only share a point
            if dist >= two_r {
                continue;
            }
            let half = (dist / two_r).acos();
            let dir = (cj[1] - ci[1]).atan2(cj[0] - ci[0]);
            let start = (dir - half).rem_euclid(TAU);
            let end = start + 2.0 * half;
            if end > TAU {
                covered.push((start, TAU));
                covered.push((0.0, end - TAU));
            } else {
                covered.push((start, end));
            }
        }
        let exposed = complement(&merge_intervals(covered), 0.0, TAU);
        let mut pieces: Vec<(f64, f64)> = exposed;
        // join the piece ending at 2π with the one starting at 0
        if pieces.len() >= 2 {
            let first = pieces[0];
            let last = pieces[pieces.len() - 1];
            if first.0 <= 0.0 && last.1 >= TAU {
                pieces.pop();
                pieces[0] = (last.0, TAU + first.1);
                pieces.rotate_left(1);
            }
        }
        arcs.extend(pieces.into_iter().map(|(s, e)| BoundaryArc {
            center_index: i,
            theta_start: s,
            theta_end: e,
        }));
    }
    arcs.sort_by(|a, b| {
        a.center_index
            .cmp(&b.center_index)
            .then(a.theta_start.total_cmp(&b.theta_start))
    });
    Ok(ArcDecomposition {
        centers,
        radius: r,
        arcs,
    })
}

pub fn disk_union_perimeter(centers: &PointSet, r: f64) -> Result<f64> {
    Ok(disk_union_boundary(centers, r)?.perimeter())
}

pub fn disk_union_area(centers: &PointSet, r: f64) -> Result<f64> {
    Ok(disk_union_boundary(centers, r)?.area())
}

/// Exposed edges of the union of squares `[c - r, c + r]^2`.
pub fn square_union_boundary(centers: &PointSet, r: f64) -> Result<SegmentDecomposition> {
    check_planar(centers, r)?;
    let centers = dedup_centers(centers);
    let n = centers.len();
    let mut segments = Vec::new();

    for i in 0..n {
        let ci = centers.point(i);
        for (orientation, fixed_axis) in [(Orientation::Horizontal, 1), (Orientation::Vertical, 0)] {
            let along = 1 - fixed_axis;
            for sign in [-1i8, 1] {
                let s = f64::from(sign);
                let fixed = ci[fixed_axis] + s * r;
                let mut covered = Vec::new();
                for j in (0..n).filter(|&j| j != i) {
                    let cj = centers.point(j);
                    let lo = cj[fixed_axis] - r;
                    let hi = cj[fixed_axis] + r;
                    // is the point just outside this edge inside square j?
                    let outside_covered = if sign > 0 {
                        lo - LINE_TOL <= fixed && fixed < hi - LINE_TOL
                    } else {
                        lo + LINE_TOL < fixed && fixed <= hi + LINE_TOL
                    };
                    // collinear edge with the same outward normal: lowest index owns it
                    let shared = j < i && (fixed - (cj[fixed_axis] + s * r)).abs() <= LINE_TOL;
                    if outside_covered || shared {
                        covered.push((cj[along] - r, cj[along] + r));
                    }
                }
                let span = (ci[along] - r, ci[along] + r);
                let clipped: Vec<(f64, f64)> = covered
                    .into_iter()
                    .filter_map(|(a, b)| {
                        let (a, b) = (a.max(span.0), b.min(span.1));
                        (b > a).then_some((a, b))
                    })
                    .collect();
                for (a, b) in complement(&merge_intervals(clipped), span.0, span.1) {
                    segments.push(BoundarySegment {
                        orientation,
                        fixed_coord: fixed,
                        span_start: a,
                        span_end: b,
                        outward_sign: sign,
                        square_index: i,
                    });
                }
            }
        }
    }
    Ok(SegmentDecomposition {
        centers,
        radius: r,
        segments,
    })
}

pub fn square_union_perimeter(centers: &PointSet, r: f64) -> Result<f64> {
    Ok(square_union_boundary(centers, r)?.perimeter())
}

pub fn square_union_area(centers: &PointSet, r: f64) -> Result<f64> {
    Ok(square_union_boundary(centers, r)?.area())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarShapedOutcome {
    pub star_shaped: bool,
    /// Angle of the first ray that leaves and re-enters the union.
    pub violating_angle: Option<f64>,
    pub rays_checked: usize,
}

pub const DEFAULT_RAYS: usize = 4096;

/// Ray-sampled check that the disk union is star-shaped from `x0`: along
/// every ray, membership must switch from inside to outside at most once.
pub fn star_shaped_check(
    centers: &PointSet,
    r: f64,
    x0: [f64; 2],
    num_rays: usize,
) -> Result<StarShapedOutcome> {
    check_planar(centers, r)?;
    if num_rays == 0 {
        return Err(Error::invalid("num_rays must be positive"));
    }
    let tol = 1e-12 * (1.0 + r);
    for (i, c) in centers.iter().enumerate() {
        if squared_l2(c, &x0).sqrt() > r + tol {
            return Err(Error::invalid(format!(
                "center {i} lies outside B(x0; r); star-shapedness is only claimed inside"
            )));
        }
    }
    for k in 0..num_rays {
        let theta = TAU * k as f64 / num_rays as f64;
        let (uy, ux) = theta.sin_cos();
        let mut chords = Vec::new();
        for c in centers.iter() {
            let rel = [c[0] - x0[0], c[1] - x0[1]];
            let b = ux * rel[0] + uy * rel[1];
            let disc = b * b - (rel[0] * rel[0] + rel[1] * rel[1] - r * r);
            if disc < 0.0 {
                continue;
            }
            let root = disc.sqrt();
            let (t0, t1) = ((b - root).max(0.0), b + root);
            if t1 >= 0.0 {
                chords.push((t0, t1));
            }
        }
        let merged = merge_intervals(
            chords
                .into_iter()
                .map(|(a, b)| (a - tol, b + tol))
                .collect(),
        );
        let ok = match merged.as_slice() {
            [] => true,
            [(start, _)] => *start <= tol,
            _ => false,
        };
        if !ok {
            return Ok(StarShapedOutcome {
                star_shaped: false,
                violating_angle: Some(theta),
                rays_checked: k + 1,
            });
        }
    }
    Ok(StarShapedOutcome {
        star_shaped: true,
        violating_angle: None,
        rays_checked: num_rays,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pts(rows: &[[f64; 2]]) -> PointSet {
        PointSet::from_rows(rows).unwrap()
    }

    fn b_puzzle() -> PointSet {
        let mut rows = vec![[0.0, 0.0]];
        for k in 0..3 {
            let a = 2.0 * PI * k as f64 / 3.0;
            rows.push([a.cos(), a.sin()]);
        }
        pts(&rows)
    }

    #[test]
    fn lone_circle() {
        let arcs = disk_union_boundary(&pts(&[[1.0, -2.0]]), 1.0).unwrap();
        assert_eq!(arcs.arcs.len(), 1);
        assert!((arcs.perimeter() - 2.0 * PI).abs() < 1e-12);
        assert!((arcs.area() - PI).abs() < 1e-12);
        assert!((disk_union_perimeter(&pts(&[[0.0, 0.0]]), 2.0).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn tangent_and_disjoint_pairs() {
        let tangent = pts(&[[0.0, 0.0], [2.0, 0.0]]);
        assert!((disk_union_perimeter(&tangent, 1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        let far = pts(&[[0.0, 0.0], [10.0, 0.0]]);
        assert!((disk_union_perimeter(&far, 1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        let three = pts(&[[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]]);
        assert!((disk_union_area(&three, 1.0).unwrap() - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn lens_area_closed_form() {
        // union of two unit disks at distance 1: 2π - lens, lens = 2 acos(1/2) - (1/2)√3
        let two = pts(&[[0.0, 0.0], [1.0, 0.0]]);
        let lens = 2.0 * (0.5f64).acos() - 0.5 * 3f64.sqrt();
        let expected = 2.0 * PI - lens;
        assert!((disk_union_area(&two, 1.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn b_puzzle_equality_configuration() {
        let arcs = disk_union_boundary(&b_puzzle(), 1.0).unwrap();
        assert!((arcs.perimeter() - 4.0 * PI).abs() < 1e-9);
        let per_center = arcs.arc_length_per_center();
        assert!(per_center[0] < 1e-9, "central circle exposed: {}", per_center[0]);
    }

    #[test]
    fn wrapping_arc_is_single_piece() {
        // the neighbour on the left covers an interval around angle π only
        let arcs = disk_union_boundary(&pts(&[[0.0, 0.0], [-1.0, 0.0]]), 1.0).unwrap();
        let first: Vec<_> = arcs.arcs.iter().filter(|a| a.center_index == 0).collect();
        assert_eq!(first.len(), 1);
        assert!(first[0].theta_end > TAU);
    }

    #[test]
    fn coincident_centers_are_deduplicated() {
        let dup = pts(&[[0.5, 0.5], [0.5, 0.5]]);
        assert!((disk_union_perimeter(&dup, 1.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((square_union_perimeter(&dup, 0.75).unwrap() - 8.0 * 0.75).abs() < 1e-12);
    }

    #[test]
    fn square_examples() {
        assert!((square_union_perimeter(&pts(&[[0.0, 0.0]]), 1.0).unwrap() - 8.0).abs() < 1e-12);
        assert!((square_union_perimeter(&pts(&[[3.0, 1.0]]), 0.5).unwrap() - 4.0).abs() < 1e-12);
        let pair = pts(&[[0.0, 0.0], [2.0, 0.0]]);
        assert!((square_union_perimeter(&pair, 1.0).unwrap() - 12.0).abs() < 1e-12);
        assert!((square_union_area(&pair, 1.0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_edges_counted_once() {
        // stacked squares sharing the x = ±1 lines over y in [0, 1]
        let stack = pts(&[[0.0, 0.0], [0.0, 1.0]]);
        let seg = square_union_boundary(&stack, 1.0).unwrap();
        assert!((seg.perimeter() - 10.0).abs() < 1e-12);
        assert!((seg.area() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn star_shaped_examples() {
        let single = star_shaped_check(&pts(&[[0.0, 0.0]]), 1.0, [0.0, 0.0], 256).unwrap();
        assert!(single.star_shaped);
        let puzzle = star_shaped_check(&b_puzzle(), 1.0, [0.0, 0.0], DEFAULT_RAYS).unwrap();
        assert!(puzzle.star_shaped);
        assert!(star_shaped_check(&pts(&[[3.0, 0.0]]), 1.0, [0.0, 0.0], 16).is_err());
    }

    #[test]
    fn rejects_non_planar() {
        let p = PointSet::from_rows(&[[0.0, 0.0, 0.0]]).unwrap();
        assert!(disk_union_boundary(&p, 1.0).is_err());
        assert!(square_union_boundary(&pts(&[[0.0, 0.0]]), -1.0).is_err());
    }
}
