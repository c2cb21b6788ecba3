//! Worked examples checked against oracles kept here: exact integer
//! binomials, the linear-space ratio recursion, and hand evaluations.

use fmd_core::*;
use num_rational::Ratio;

fn choose(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn binomial_mass(n: u64, theta: f64) -> Vec<f64> {
    (0..=n)
        .map(|a| choose(n, a) as f64 * theta.powi(a as i32) * (1.0 - theta).powi((n - a) as i32))
        .collect()
}

/// The ratio recursion run directly on linear masses.
fn linear_inversion(p: &[f64]) -> Vec<f64> {
    let n = p.len() - 1;
    let mut q = vec![1.0];
    for a in 0..=n {
        let next = q[a] * ((n + 1 - a) as f64 / (a + 1) as f64) * p[a] / (1.0 - p[a]);
        q.push(next);
    }
    let total: f64 = q.iter().sum();
    q.iter().map(|v| v / total).collect()
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn pa(n: usize, a1: usize, a2: usize, pl: f64, pu: f64) -> PanAssertion {
    PanAssertion::new(n, a1, a2, pl, pu).unwrap()
}

#[test]
fn inversion_examples() {
    let q = invert_to_mass(&PredictiveVector::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap());
    assert!(max_abs_diff(&q.linear(), &[1.0 / 3.0; 3]) < 1e-15);

    let q = invert_to_mass(&PredictiveVector::constant(9, 0.5).unwrap());
    assert!(max_abs_diff(&q.linear(), &binomial_mass(10, 0.5)) < 1e-15);

    let p = build_predictive(&pa(100, 25, 60, 0.1, 0.7), CompletionKind::Strict).unwrap();
    let q = invert_to_mass(&p);
    assert!(max_abs_diff(&q.linear(), &linear_inversion(p.values())) < 1e-14);
    assert_eq!(q.local_maxima().len(), 2);
}

#[test]
fn conditioning_examples() {
    let third = MassFunction::from_linear(&[1.0 / 3.0; 3]).unwrap();
    let p = mass_to_predictive(&third).unwrap();
    assert!(max_abs_diff(p.values(), &[1.0 / 3.0, 2.0 / 3.0]) < 1e-15);

    let q = MassFunction::from_linear(&binomial_mass(20, 0.37)).unwrap();
    assert!(mass_to_predictive(&q).unwrap().values().iter().all(|v| (v - 0.37).abs() < 1e-13));

    let mut holes = vec![0.1; 11];
    holes[5] = 0.0;
    let q = MassFunction::from_linear(&holes).unwrap();
    assert_eq!(mass_to_predictive(&q), Err(Error::Degenerate { index: 5 }));
}

#[test]
fn round_trip_examples() {
    let q = MassFunction::from_linear(&binomial_mass(11, 0.3)).unwrap();
    assert!(roundtrip_check(&q).unwrap() < 1e-12);
    let q = theorem1_mass(10, 0.2, 0.05).unwrap();
    assert!(roundtrip_check(&q).unwrap() < 1e-12);
}

#[test]
fn reduction_examples() {
    let third = MassFunction::from_linear(&[1.0 / 3.0; 3]).unwrap();
    assert!(max_abs_diff(&reduce_mass_one(&third).unwrap().linear(), &[0.5, 0.5]) < 1e-15);

    let q = MassFunction::from_linear(&binomial_mass(30, 0.2)).unwrap();
    let r = reduce_mass_one(&q).unwrap();
    assert!(max_abs_diff(&r.linear(), &binomial_mass(29, 0.2)) < 1e-15);
    let r = reduce_mass_to(&q, 7).unwrap();
    assert!(max_abs_diff(&r.linear(), &binomial_mass(7, 0.2)) < 1e-14);

    let q = invert_to_mass(&build_predictive(&pa(100, 25, 60, 0.1, 0.7), CompletionKind::Linear).unwrap());
    let once = reduce_mass_one(&q).unwrap();
    let general = reduce_mass_to(&q, 100).unwrap();
    assert!(max_abs_diff(&once.linear(), &general.linear()) < 1e-12);
    assert_eq!(reduce_mass_to(&q, 101).unwrap(), q);
    assert!(matches!(reduce_mass_to(&q, 102), Err(Error::Dimension { .. })));
}

#[test]
fn predictive_reduction_examples() {
    let mut v = vec![0.5; 9];
    v[2] = 2.0 / 8.0;
    v[3] = 3.0 / 8.0;
    let r = reduce_predictive(&PredictiveVector::new(v).unwrap()).unwrap();
    assert!((r.get(2) - 2.0 / 7.0).abs() < 1e-15);

    let r = reduce_predictive(&PredictiveVector::constant(12, 0.83).unwrap()).unwrap();
    assert_eq!(r.n(), 11);
    assert!(r.values().iter().all(|v| (v - 0.83).abs() < 1e-15));
}

#[test]
fn harmonic_examples() {
    assert_eq!(harmonic_sum(1), 1.0);
    assert_eq!(harmonic_sum(2), 1.5);
    assert!((harmonic_sum(4) - 25.0 / 12.0).abs() < 1e-15);
}

#[test]
fn histogram_examples() {
    let h = density_histogram(&MassFunction::from_linear(&[1.0 / 3.0; 3]).unwrap());
    assert!(max_abs_diff(&h.densities, &[1.0; 3]) < 1e-15);
    assert_eq!(h.bin_centers, vec![0.0, 0.5, 1.0]);

    let h = density_histogram(&MassFunction::from_linear(&binomial_mass(101, 0.5)).unwrap());
    let peak = 102.0 * choose(101, 50) as f64 / 2f64.powi(101);
    assert!((h.densities[50] - peak).abs() < 1e-13 * peak);
    assert!((h.densities[51] - peak).abs() < 1e-13 * peak);
    assert!((h.bin_centers[50] - 0.5).abs() < 0.01);

    let q = invert_to_mass(&build_predictive(&pa(100, 25, 60, 0.1, 0.7), CompletionKind::Weak).unwrap());
    let h = density_histogram(&q);
    let near: f64 = h
        .bin_centers
        .iter()
        .zip(&h.densities)
        .filter(|(x, _)| (0.04..0.18).contains(*x))
        .map(|(_, d)| d * h.bin_width)
        .sum();
    assert!(near > 0.5, "{near}");
    let top = q.local_maxima();
    assert!((h.bin_centers[top[0]] - 0.1).abs() < 0.03, "{top:?}");
}

#[test]
fn completion_examples() {
    let s = pa(100, 25, 60, 0.1, 0.7);
    for k in CompletionKind::ALL {
        let p = build_predictive(&s, k).unwrap();
        for a in 25..=60 {
            assert_eq!(p.get(a), a as f64 / 100.0);
        }
        assert!(p.is_nondecreasing());
    }
    let lower = quartic_coefficients(&s, Side::Lower);
    assert!((lower.eval(0.0) - 0.1).abs() < 1e-14);
    assert!((lower.eval(0.25) - 0.25).abs() < 1e-14);
    assert!(lower.derivative(0.0).abs() < 1e-14);
    assert!((lower.derivative(0.25) - 1.0).abs() < 1e-14);
}

#[test]
fn theorem1_examples() {
    let q = theorem1_mass(2, 0.2, 0.2).unwrap();
    assert!(max_abs_diff(&q.linear(), &[0.2, 0.2, 0.2, 0.4]) < 1e-15);
    assert!((mass_to_predictive(&q).unwrap().get(1) - 0.5).abs() < 1e-15);
    assert!((theorem1_bound(2, 0.0) - 0.5).abs() < 1e-15);
    assert!(max_abs_diff(&theorem1_mass(2, 0.0, 0.5).unwrap().linear(), &[0.0, 0.5, 0.5, 0.0]) < 1e-15);
    let q = theorem1_mass(9, 0.35, 0.0).unwrap().linear();
    assert_eq!(q[0], 0.35);
    assert!((q[10] - 0.65).abs() < 1e-15);
    // 1 / (2 [N / (N + 1)] H(N)) with H(10^4) = 9.78760603604438...
    let b = theorem1_bound(10_000, 0.0);
    assert!((b - 10_001.0 / (20_000.0 * 9.787_606_036_044_382)).abs() < 1e-15);
    assert!((b - 0.05109).abs() < 1e-5);
    assert!(matches!(theorem1_mass(50, 0.1, 1.01 * theorem1_bound(50, 0.1)), Err(Error::BoundViolation { .. })));
}

#[test]
fn theorem2_examples() {
    let (lhs, rhs) = theorem2_sum_bound_check(100, 10, 0.3, 0.001).unwrap();
    assert!(lhs <= rhs);
    assert_eq!(theorem2_sum_bound_check(100, 10, 0.3, 0.0).unwrap(), (0.0, 0.0));
    let lhs: Vec<f64> = [100, 1000, 10_000]
        .iter()
        .map(|&n| theorem2_sum_bound_check(n, 10, 0.3, 0.5 * theorem1_bound(n, 0.3)).unwrap().0)
        .collect();
    assert!(lhs[0] > lhs[1] && lhs[1] > lhs[2], "{lhs:?}");
}

#[test]
fn theorem3_examples() {
    let s = pa(100, 25, 60, 0.1, 0.7);
    let list = implied_reductions(&s);
    assert_eq!(list.len(), 35);
    assert_eq!(list[0], pa(99, 25, 59, 0.1, 0.7));
    assert_eq!(list[1], pa(98, 25, 58, 0.1, 0.7));
    assert_eq!(list[34], pa(65, 25, 25, 0.1, 0.7));
    let small: Vec<_> = implied_reductions(&pa(8, 2, 5, 0.1, 0.7)).iter().map(|s| (s.n(), s.a1(), s.a2())).collect();
    assert_eq!(small, [(7, 2, 4), (6, 2, 3), (5, 2, 2)]);
    assert!(implied_reductions(&pa(10, 3, 3, 0.1, 0.9)).is_empty());

    assert!(verify_theorem3(&s, CompletionKind::Strict).unwrap() < 1e-12);
    assert!(verify_theorem3(&s, CompletionKind::Linear).unwrap() < 1e-12);
    assert!(verify_theorem3(&pa(8, 2, 5, 0.2, 0.7), CompletionKind::Weak).unwrap() < 1e-12);
}

#[test]
fn extension_examples() {
    let forced = forced_extension(&pa(8, 2, 5, 0.1, 0.7), 5).unwrap();
    assert_eq!(forced, (2..=6).map(|a| (a, Ratio::new(a as i64, 9))).collect::<Vec<_>>());
    let forced = forced_extension(&pa(100, 25, 60, 0.1, 0.7), 30).unwrap();
    assert_eq!(forced, (25..=61).map(|a| (a, Ratio::new(a as i64, 101))).collect::<Vec<_>>());

    let base = pa(100, 25, 60, 0.1, 0.7);
    let fig4 = ExtensionScenario { base, k: 99_900, p_lower_ext: 0.00012, p_upper_ext: 0.99998 };
    assert_eq!(extend_assertion(&fig4).unwrap(), pa(100_000, 25, 99_960, 0.00012, 0.99998));
    let same = ExtensionScenario { base, k: 0, p_lower_ext: 0.1, p_upper_ext: 0.7 };
    assert_eq!(extend_assertion(&same).unwrap(), base);
    let one = extend_assertion(&ExtensionScenario::with_midpoint_bounds(base, 1)).unwrap();
    assert_eq!((one.n(), one.a1(), one.a2()), (101, 25, 61));
}

#[test]
fn interior_mass_examples() {
    let s = ExtensionScenario { base: pa(8, 2, 5, 0.1, 0.7), k: 0, p_lower_ext: 0.1, p_upper_ext: 0.7 };
    let m = interior_mass(&s, CompletionKind::Strict).unwrap();
    assert!(m.relative_gap() < 1e-14, "{m:?}");

    // Oracle: the window sum on the linear-space recursion.
    let ext = extend_assertion(&s).unwrap();
    let q = linear_inversion(build_predictive(&ext, CompletionKind::Strict).unwrap().values());
    let direct: f64 = q[2..=5].iter().sum();
    assert!((m.direct_sum - direct).abs() < 1e-15);
}

#[test]
fn line_examples() {
    let l = line_for_conditional(4, 8, 0.5).unwrap();
    assert_eq!((l.anchor(), l.slope(), l.beta_at(0.0)), ((-4.0, -4.0), 1.0, 0.0));
    assert_eq!(line_for_conditional(0, 8, 0.1).unwrap().anchor(), (0.0, -8.0));
    assert_eq!(line_for_conditional(8, 8, 0.7).unwrap().anchor(), (-8.0, 0.0));
    let fm = |a, n| ConditionalLine::frequency(a, n).unwrap();
    assert_eq!(
        concurrency_check(&fm(2, 8), &fm(3, 8), &fm(2, 7)).unwrap(),
        Concurrency::Intersection { alpha: 0.0, beta: 0.0 }
    );
    let c = |a, n| line_for_conditional(a, n, 0.4).unwrap();
    assert_eq!(concurrency_check(&c(1, 5), &c(2, 5), &c(1, 4)).unwrap(), Concurrency::Parallel);
}

#[test]
fn limit_examples() {
    assert_eq!(fm_window(100, 0.2, 0.6).unwrap(), (20, 60));
    assert_eq!(fm_window(7, 0.2, 0.6).unwrap(), (2, 4));
    assert_eq!(fm_window(9, 4.0 / 9.0, 4.0 / 9.0).unwrap(), (4, 4));

    let p = IncompleteBetaParams::new(0.2, 0.6).unwrap();
    assert!((p.normalizer() - 6f64.ln()).abs() < 1e-15);
    let f = incomplete_beta_density(0.5, &p).unwrap();
    assert!((f - 1.0 / (0.25 * 6f64.ln())).abs() < 1e-14);
    assert!((f - 2.2324).abs() < 1e-4);
    assert_eq!(incomplete_beta_density(0.7, &p).unwrap(), 0.0);

    let q = incomplete_beta_mixture_mass(1, &p).unwrap();
    assert!((q.get(0) - 3f64.ln() / 6f64.ln()).abs() < 1e-12);
    assert!((q.get(1) - 2f64.ln() / 6f64.ln()).abs() < 1e-12);

    let sym = incomplete_beta_mixture_mass(2, &IncompleteBetaParams::new(0.25, 0.75).unwrap()).unwrap();
    assert!((sym.get(0) - sym.get(2)).abs() < 1e-15);

    // N + 1 = 101 follows the U-shaped density: dips inside (.2, .6), rises at both ends.
    let q = incomplete_beta_mixture_mass(101, &p).unwrap();
    let h = density_histogram(&q);
    let at = |x: f64| h.densities[(x * 101.0).round() as usize];
    let f = |x: f64| incomplete_beta_density(x, &p).unwrap();
    assert!(at(0.5) < at(0.3));
    assert!((at(0.4) - f(0.4)).abs() < 0.15 * f(0.4));

    assert_eq!(compare_to_limit(&q, &p, Some(0.2)).unwrap(), 0.0);
}

#[test]
fn strict_family_reaches_limit_density() {
    let p = IncompleteBetaParams::new(0.2, 0.6).unwrap();
    let n = 100_000;
    let (a1, a2) = fm_window(n, 0.2, 0.6).unwrap();
    let q = invert_to_mass(&build_predictive(&pa(n, a1, a2, 0.1, 0.8), CompletionKind::Strict).unwrap());
    let peak = incomplete_beta_density(0.2 + 1e-12, &p).unwrap();
    let d = compare_to_limit(&q, &p, None).unwrap();
    assert!(d < 0.02 * peak, "{d} vs {peak}");
}

#[test]
fn mixture_self_comparison() {
    // Binomial smoothing keeps the histogram of the mixture itself away from
    // the density by O(1/N) in the interior and more near the cut points.
    let p = IncompleteBetaParams::new(0.2, 0.6).unwrap();
    let q = incomplete_beta_mixture_mass(1001, &p).unwrap();
    let edge = compare_to_limit(&q, &p, None).unwrap();
    let inner = compare_to_limit(&q, &p, Some(0.1)).unwrap();
    assert!(inner < 1e-2, "{inner}");
    assert!(edge > inner);
}
