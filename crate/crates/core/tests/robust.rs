use parset::robust::ot::w1_line;
use parset::robust::{
    check_w1_domination, d_r_brute_force, d_r_uniform, d_r_weighted, robust_risk, w1_network, Certificate,
    EmpiricalMeasure,
};
use parset::PointSet;
use proptest::prelude::*;

fn cloud(d: usize, max: usize) -> impl Strategy<Value = PointSet> {
    (1..=max).prop_flat_map(move |n| {
        prop::collection::vec(-2.0..2.0f64, n * d).prop_map(move |c| PointSet::new(d, c).unwrap())
    })
}

fn pair(d: usize, max: usize) -> impl Strategy<Value = (PointSet, PointSet)> {
    (1..=max).prop_flat_map(move |n| {
        let side = move || prop::collection::vec(-2.0..2.0f64, n * d).prop_map(move |c| PointSet::new(d, c).unwrap());
        (side(), side())
    })
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, n).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matching_agrees_with_permutations((x, y) in pair(2, 7), r in 0.0..1.5f64) {
        let fast = d_r_uniform(&x, &y, r).unwrap();
        prop_assert_eq!(fast.value, d_r_brute_force(&x, &y, r).unwrap());
        let Certificate::Matching(pairs) = &fast.certificate else { panic!("uniform gives a matching") };
        for &(i, j) in pairs {
            let d: f64 = x.point(i).iter().zip(y.point(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(d <= 2.0 * r + 1e-12);
        }
    }

    #[test]
    fn weighted_equals_uniform_on_uniform_inputs((x, y) in pair(3, 20), r in 0.0..1.5f64) {
        let u = d_r_uniform(&x, &y, r).unwrap().value;
        let w = d_r_weighted(&EmpiricalMeasure::uniform(x), &EmpiricalMeasure::uniform(y), r).unwrap().value;
        prop_assert!((u - w).abs() <= 1e-12, "{u} vs {w}");
    }

    #[test]
    fn d_r_is_symmetric_bounded_and_monotone((x, y) in pair(2, 25), r in 0.0..1.0f64, dr in 0.0..1.0f64) {
        let a = d_r_uniform(&x, &y, r).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a, d_r_uniform(&y, &x, r).unwrap().value);
        prop_assert!(d_r_uniform(&x, &y, r + dr).unwrap().value <= a);
        prop_assert_eq!(d_r_uniform(&x, &x, r).unwrap().value, 0.0);
        let risk = robust_risk(a).unwrap();
        prop_assert!((risk - (1.0 - a) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn flow_certificate_is_feasible(x in cloud(2, 12), y in cloud(2, 12), wa in weights(12), wb in weights(12), r in 0.05..1.0f64) {
        let norm = |w: &[f64]| { let s: f64 = w.iter().sum(); w.iter().map(|v| v / s).collect::<Vec<_>>() };
        let mu = EmpiricalMeasure::new(x.clone(), norm(&wa[..x.len()])).unwrap();
        let nu = EmpiricalMeasure::new(y.clone(), norm(&wb[..y.len()])).unwrap();
        let res = d_r_weighted(&mu, &nu, r).unwrap();
        let Certificate::Flow(flow) = &res.certificate else { panic!("weighted gives a flow") };
        let mut out = vec![0.0; mu.len()];
        let mut inn = vec![0.0; nu.len()];
        for &(i, j, m) in flow {
            prop_assert!(m > 0.0);
            out[i] += m;
            inn[j] += m;
        }
        for (o, w) in out.iter().zip(mu.weights()) { prop_assert!(*o <= w + 1e-12); }
        for (o, w) in inn.iter().zip(nu.weights()) { prop_assert!(*o <= w + 1e-12); }
        prop_assert!((res.certified_mass(0) + res.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn network_w1_matches_line_formula((x, y) in pair(1, 15), wa in weights(15), wb in weights(15)) {
        let n = x.len();
        let norm = |w: &[f64]| { let s: f64 = w.iter().sum(); w.iter().map(|v| v / s).collect::<Vec<_>>() };
        let (a, b) = (norm(&wa[..n]), norm(&wb[..n]));
        let mu = EmpiricalMeasure::new(x.clone(), a.clone()).unwrap();
        let nu = EmpiricalMeasure::new(y.clone(), b.clone()).unwrap();
        let net = w1_network(&mu, &nu).unwrap().value;
        let line = w1_line(x.coords(), &a, y.coords(), &b);
        prop_assert!((net - line).abs() < 1e-9, "{net} vs {line}");
    }

    #[test]
    fn w1_dominates_d_r((x, y) in pair(3, 30), r in 0.05..2.0f64) {
        let report = check_w1_domination(&EmpiricalMeasure::uniform(x), &EmpiricalMeasure::uniform(y), r).unwrap();
        prop_assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn zero_radius_is_total_variation() {
    let x = PointSet::new(1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    let y = PointSet::new(1, vec![0.0, 1.0, 7.0, 8.0]).unwrap();
    assert_eq!(d_r_uniform(&x, &y, 0.0).unwrap().value, 0.5);
}

#[test]
fn shifted_clouds_match_at_half_shift() {
    let x = PointSet::new(2, (0..40).map(|i| i as f64 * 0.37 % 3.0).collect()).unwrap();
    let y = PointSet::new(2, x.coords().iter().map(|v| v + 0.3).collect()).unwrap();
    // every point moves by 0.3·√2, so r = 0.15·√2 is exactly enough
    let r = 0.15 * 2f64.sqrt() + 1e-12;
    assert_eq!(d_r_uniform(&x, &y, r).unwrap().value, 0.0);
}

#[test]
fn rejects_bad_input() {
    let x = PointSet::new(1, vec![0.0]).unwrap();
    assert!(d_r_uniform(&x, &x, -1.0).is_err());
    assert!(d_r_uniform(&x, &x, f64::NAN).is_err());
    assert!(robust_risk(1.5).is_err());
    assert!(EmpiricalMeasure::new(x, vec![0.7]).is_err());
}
