use std::f64::consts::PI;

use parset::bounds::{bound_union_in_ball, bound_union_in_cube, packing_count_bound};
use parset::exact2d::{
    disk_union_area, disk_union_boundary, disk_union_perimeter, square_union_area, square_union_perimeter,
    star_shaped_check,
};
use parset::geometry::greedy_packing;
use parset::mc::{mc_volume, McConfig};
use parset::oracle::{crofton_perimeter, raster_area};
use parset::{NormKind, ParallelSetSpec, PointSet};
use proptest::prelude::*;

fn planar(points: &[(f64, f64)]) -> PointSet {
    let rows: Vec<[f64; 2]> = points.iter().map(|&(x, y)| [x, y]).collect();
    PointSet::from_rows(&rows).unwrap()
}

/// Points of the closed unit disc, drawn in polar form.
fn disc_points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..(2.0 * PI)), 1..=max)
        .prop_map(|v| v.into_iter().map(|(s, t)| (s.sqrt() * t.cos(), s.sqrt() * t.sin())).collect())
}

fn square_points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..=1.0f64, -1.0..=1.0f64), 1..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn disk_union_perimeter_is_at_most_four_pi(pts in disc_points(30)) {
        let p = disk_union_perimeter(&planar(&pts), 1.0).unwrap();
        prop_assert!(p <= 4.0 * PI + 1e-9, "perimeter {p}");
        prop_assert!(p >= 2.0 * PI - 1e-9);
    }

    #[test]
    fn square_union_perimeter_is_at_most_sixteen(pts in square_points(30)) {
        let p = square_union_perimeter(&planar(&pts), 1.0).unwrap();
        prop_assert!(p <= 16.0 + 1e-9, "perimeter {p}");
        prop_assert!(p >= 8.0 - 1e-9);
    }

    #[test]
    fn area_is_monotone_in_radius(pts in disc_points(12), r in 0.05..1.0f64, dr in 0.0..0.5f64) {
        let a = planar(&pts);
        prop_assert!(disk_union_area(&a, r).unwrap() <= disk_union_area(&a, r + dr).unwrap() + 1e-9);
        prop_assert!(square_union_area(&a, r).unwrap() <= square_union_area(&a, r + dr).unwrap() + 1e-9);
    }

    #[test]
    fn union_area_between_one_and_sum(pts in disc_points(12), r in 0.05..1.0f64) {
        let a = planar(&pts);
        let n = a.len() as f64;
        let area = disk_union_area(&a, r).unwrap();
        prop_assert!(area >= PI * r * r - 1e-9);
        prop_assert!(area <= n * PI * r * r + 1e-9);
        let sq = square_union_area(&a, r).unwrap();
        prop_assert!(sq >= 4.0 * r * r - 1e-9 && sq <= n * 4.0 * r * r + 1e-9);
    }

    #[test]
    fn translation_and_order_invariance(pts in disc_points(10), tx in -5.0..5.0f64, ty in -5.0..5.0f64) {
        let a = planar(&pts);
        let moved: Vec<(f64, f64)> = pts.iter().rev().map(|&(x, y)| (x + tx, y + ty)).collect();
        let b = planar(&moved);
        let (pa, pb) = (disk_union_perimeter(&a, 0.7).unwrap(), disk_union_perimeter(&b, 0.7).unwrap());
        prop_assert!((pa - pb).abs() < 1e-8 * pa.max(1.0));
        let (qa, qb) = (square_union_perimeter(&a, 0.7).unwrap(), square_union_perimeter(&b, 0.7).unwrap());
        prop_assert!((qa - qb).abs() < 1e-8 * qa.max(1.0));
    }

    #[test]
    fn centered_union_is_star_shaped(pts in disc_points(10)) {
        // with r = 1 and centres in the unit disc, every disc contains the origin
        let out = star_shaped_check(&planar(&pts), 1.0, [0.0, 0.0], 512).unwrap();
        prop_assert!(out.star_shaped);
    }

    #[test]
    fn greedy_packing_is_maximal_and_bounded(pts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..80), r in 0.2..1.0f64) {
        let rows: Vec<[f64; 3]> = pts.iter().map(|&(x, y, z)| [x, y, z]).collect();
        let a = PointSet::from_rows(&rows).unwrap();
        let pack = greedy_packing(&a, r, NormKind::L2).unwrap();
        let reps = &pack.representatives;
        for i in 0..reps.len() {
            for j in 0..i {
                prop_assert!(NormKind::L2.distance(reps.point(i), reps.point(j)) > r);
            }
        }
        for x in a.iter() {
            prop_assert!(reps.iter().any(|p| NormKind::L2.distance(x, p) <= r));
        }
        // the cube [-1,1]^3 sits inside B(sqrt 3)
        prop_assert!(pack.count as f64 <= packing_count_bound(3, 3f64.sqrt(), r).unwrap());
    }
}

#[test]
fn disjoint_discs_add_up() {
    let a = planar(&[(0.0, 0.0), (5.0, 0.0), (0.0, 5.0)]);
    assert!((disk_union_perimeter(&a, 1.0).unwrap() - 6.0 * PI).abs() < 1e-12);
    assert!((disk_union_area(&a, 1.0).unwrap() - 3.0 * PI).abs() < 1e-12);
    assert!((square_union_perimeter(&a, 1.0).unwrap() - 24.0).abs() < 1e-12);
}

#[test]
fn two_overlapping_discs_lens() {
    // centres 1 apart, r = 1: each disc loses a 2π/3 arc
    let a = planar(&[(0.0, 0.0), (1.0, 0.0)]);
    let p = disk_union_perimeter(&a, 1.0).unwrap();
    assert!((p - 2.0 * (2.0 * PI - 2.0 * PI / 3.0)).abs() < 1e-12);
    let lens = 2.0 * (PI / 3.0) - 3f64.sqrt() / 2.0;
    assert!((disk_union_area(&a, 1.0).unwrap() - (2.0 * PI - lens)).abs() < 1e-12);
}

#[test]
fn four_point_equality_case() {
    let mut pts = vec![(0.0, 0.0)];
    for k in 0..3 {
        let t = 2.0 * PI * k as f64 / 3.0;
        pts.push((t.cos(), t.sin()));
    }
    let p = disk_union_perimeter(&planar(&pts), 1.0).unwrap();
    assert!((p - 4.0 * PI).abs() < 1e-9, "{p}");
    assert!((bound_union_in_ball(2, 1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
    assert!((bound_union_in_cube(2, 1.0).unwrap() - 16.0).abs() < 1e-12);
}

#[test]
fn arcs_partition_perimeter() {
    let a = planar(&[(0.0, 0.0), (0.8, 0.1), (-0.3, 0.6), (0.2, -0.7)]);
    let dec = disk_union_boundary(&a, 0.6).unwrap();
    let sum: f64 = dec.arc_length_per_center().iter().sum();
    assert!((sum - dec.perimeter()).abs() < 1e-12);
}

#[test]
fn exact_matches_oracles_on_fixed_instance() {
    let a = planar(&[(0.0, 0.0), (0.9, 0.2), (-0.4, 0.7), (0.3, -0.8), (1.7, 1.1)]);
    for norm in [NormKind::L2, NormKind::Linf] {
        let (p, area) = match norm {
            NormKind::L2 => (disk_union_perimeter(&a, 0.6).unwrap(), disk_union_area(&a, 0.6).unwrap()),
            NormKind::Linf => (square_union_perimeter(&a, 0.6).unwrap(), square_union_area(&a, 0.6).unwrap()),
        };
        let ra = raster_area(&a, 0.6, norm, 2048).unwrap();
        let cp = crofton_perimeter(&a, 0.6, norm, 128, 1024).unwrap();
        assert!((ra - area).abs() / area < 2e-3, "{norm:?} area {ra} vs {area}");
        assert!((cp - p).abs() / p < 1e-2, "{norm:?} perimeter {cp} vs {p}");
    }
}

#[test]
fn mc_volume_matches_exact_area() {
    let a = planar(&[(0.0, 0.0), (0.9, 0.2), (-0.4, 0.7)]);
    let exact = disk_union_area(&a, 0.5).unwrap();
    let spec = ParallelSetSpec::new(a, NormKind::L2, 0.5).unwrap();
    let est = mc_volume(&spec, &McConfig::new(400_000, 3)).unwrap();
    assert!(est.within(exact, 4.0), "{} ± {} vs {exact}", est.value, est.std_error);
}
