use kendall_core::asymptotics::{
    blackwell_hypothesis, run_diagnostic, DiagnosticExtras, GridSpec, TheoremId,
};
use kendall_core::kendall::{
    convolve, nfold, sample_nfold, weighted_renewal, weighted_series, GeneratingFunction,
    KendallMeasure,
};
use kendall_core::renewal::{renewal_series_naive, Renewal};
use kendall_core::williamson::{g_transform, invert_g};
use kendall_core::{DistModel, Interpolation, KendallParam, QuadratureSpec};
use proptest::prelude::*;

fn a(v: f64) -> KendallParam {
    KendallParam::new(v).unwrap()
}

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn smooth_law() -> impl Strategy<Value = DistModel> {
    prop_oneof![
        Just(DistModel::exponential_unit()),
        (1.5f64..4.0).prop_map(|b| DistModel::pareto(b).unwrap()),
        Just(DistModel::kendall_stable(1.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn renewal_is_nondecreasing(d in smooth_law(), x in 0.05f64..200.0, h in 0.0f64..5.0) {
        let r = Renewal::new(&d, a(1.0), q()).unwrap();
        let lo = r.value(x).unwrap();
        let hi = r.value(x + h).unwrap();
        prop_assert!(lo >= 1.0);
        prop_assert!(hi >= lo - 1e-12 * lo);
    }

    #[test]
    fn derivative_matches_central_difference(d in smooth_law(), x in 0.5f64..50.0) {
        let r = Renewal::new(&d, a(1.0), q()).unwrap();
        let h = 1e-4 * x;
        let fd = (r.value(x + h).unwrap() - r.value(x - h).unwrap()) / (2.0 * h);
        let exact = r.derivative(x).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "{} vs {}", fd, exact);
    }

    #[test]
    fn convolution_is_commutative_and_a_cdf(x in 0.01f64..100.0, b in 1.2f64..4.0, alpha in 0.5f64..2.0) {
        let p = DistModel::pareto(b.max(alpha + 0.2)).unwrap();
        let e = DistModel::exponential_unit();
        let pe = convolve(&p, &e, a(alpha), x, &q()).unwrap();
        let ep = convolve(&e, &p, a(alpha), x, &q()).unwrap();
        prop_assert_eq!(pe, ep);
        prop_assert!((0.0..=1.0).contains(&pe));
    }

    #[test]
    fn blackwell_increment_is_nonnegative(d in smooth_law(), x in 0.1f64..300.0, y in 0.01f64..10.0) {
        let r = Renewal::new(&d, a(1.0), q()).unwrap();
        prop_assert!(r.blackwell_difference(x, y).unwrap() >= -1e-12 * r.value(x).unwrap());
    }

    #[test]
    fn geometric_weights_match_series(p in 0.05f64..0.95, x in 0.1f64..30.0) {
        let d = DistModel::exponential_unit();
        let gen = GeneratingFunction::geometric(p).unwrap();
        let closed = weighted_renewal(&d, a(1.0), &gen, x, &q()).unwrap();
        let series = weighted_series(&d, a(1.0), &gen, x, &q()).unwrap();
        prop_assert!((closed - series).abs() <= 1e-9 * closed.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn blackwell_hypothesis_decays_for_steep_tails(alpha in 0.5f64..2.0, gap in 1.05f64..4.0, y in 0.1f64..5.0) {
        let d = DistModel::pareto(alpha + gap).unwrap();
        let xs = GridSpec::new(10.0, 4.0, 10).unwrap().points();
        let h = blackwell_hypothesis(&d, a(alpha), y, &xs);
        prop_assert!(h.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(h[h.len() - 1] <= 1e-2 * h[0]);
    }

    // Between α and α + 1 only finiteness is checked.
    #[test]
    fn blackwell_hypothesis_is_finite_near_alpha(alpha in 0.5f64..2.0, gap in 0.05f64..1.0) {
        let d = DistModel::pareto(alpha + gap).unwrap();
        let xs = GridSpec::new(10.0, 4.0, 10).unwrap().points();
        prop_assert!(blackwell_hypothesis(&d, a(alpha), 1.0, &xs).iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}

#[test]
fn closed_renewal_matches_series_at_moderate_x() {
    for d in [
        DistModel::dirac_at_one(),
        DistModel::pareto(2.0).unwrap(),
        DistModel::exponential_unit(),
    ] {
        for x in [0.5, 1.5, 4.0] {
            let closed = Renewal::new(&d, a(1.0), q()).unwrap().value(x).unwrap();
            let naive = renewal_series_naive(&d, a(1.0), x, 20_000, &q()).unwrap();
            assert!((closed - naive).abs() < 1e-8 * closed, "{} x={x}: {closed} vs {naive}", d.name());
        }
    }
}

#[test]
fn nfold_agrees_with_inverting_the_power() {
    let d = DistModel::exponential_unit();
    for n in [2u32, 3, 5] {
        for x in [0.3, 1.0, 4.0, 12.0] {
            let closed = nfold(&d, a(1.0), n, x, &q()).unwrap();
            let oracle =
                invert_g(|t| g_transform(&d, a(1.0), t, &q()).unwrap().powi(n as i32), a(1.0), x).unwrap();
            assert!((closed - oracle).abs() < 1e-7, "n={n} x={x}: {closed} vs {oracle}");
        }
    }
}

#[test]
fn tabulated_measure_reproduces_its_cdf() {
    let m = KendallMeasure::base(DistModel::exponential_unit(), a(1.0), q()).nfold(3);
    let xs: Vec<f64> = (0..=400).map(|i| 0.05 * i as f64).collect();
    let table = m.tabulate(&xs, Interpolation::MonotoneCubic).unwrap();
    for x in [0.123, 1.01, 3.33, 7.77, 15.5] {
        let exact = m.cdf(x).unwrap();
        assert!((table.cdf(x) - exact).abs() < 1e-5, "x={x}");
    }
}

#[test]
fn samples_follow_the_nfold_law() {
    let d = DistModel::exponential_unit();
    let n = 2;
    let count = 4000;
    let mut xs = sample_nfold(&d, a(1.0), n, count, 11, &q()).unwrap();
    xs.sort_by(f64::total_cmp);
    let mut ks: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = nfold(&d, a(1.0), n, x, &q()).unwrap();
        let lo = i as f64 / count as f64;
        let hi = (i + 1) as f64 / count as f64;
        ks = ks.max((f - lo).abs()).max((hi - f).abs());
    }
    // 1.63/√n is the 1% critical value.
    assert!(ks < 1.63 / (count as f64).sqrt(), "KS distance {ks}");
}

#[test]
fn example2_rate_on_a_long_grid() {
    let d = DistModel::pareto(2.0).unwrap();
    let grid = GridSpec::new(10.0, 2.0, 11).unwrap();
    let diag = run_diagnostic(&d, a(1.0), TheoremId::Example2Rate, &grid, &DiagnosticExtras::default(), &q())
        .unwrap();
    assert_eq!(diag.constant, 0.25);
    assert!(diag.passed(), "{:?}", diag.verdict);
}

#[test]
fn power_law_elementary_limit_is_attained() {
    let d = DistModel::power_law_unit(2.0).unwrap();
    let grid = GridSpec::new(1.0, 3.0, 9).unwrap();
    let diag = run_diagnostic(&d, a(2.0), TheoremId::Elementary, &grid, &DiagnosticExtras::default(), &q())
        .unwrap();
    assert_eq!(diag.constant, 4.0);
    assert!(diag.residuals.iter().all(|r| r.abs() < 1e-12));
}

#[test]
fn exponential_gamma_rate_converges() {
    let d = DistModel::exponential_unit();
    let grid = GridSpec::new(4.0, 1.5, 12).unwrap();
    let diag =
        run_diagnostic(&d, a(1.0), TheoremId::GammaRate, &grid, &DiagnosticExtras::default(), &q()).unwrap();
    assert_eq!(diag.constant, 1.0);
    assert!(diag.passed(), "{:?}", diag.verdict);
    // Σ G^{n−1}(F + (n−1)(F − G)) summed by hand, with 1 − G = (1 − e^{−x})/x;
    // cancellation in 2 − R/x limits the check to small x.
    for (x, v) in diag.grid.iter().zip(&diag.scaled_values).filter(|p| *p.0 < 15.0) {
        let e = (-x).exp();
        let (f, u) = (1.0 - e, (1.0 - e) / x);
        let r = 1.0 + f / u + (u - e) * (1.0 - u) / (u * u);
        let oracle = (2.0 - r / x) / (x * e);
        assert!((v - oracle).abs() < 1e-6, "x={x}: {v} vs {oracle}");
    }
}

#[test]
fn blackwell_rate_constant_is_twice_the_observed_limit() {
    // δ₁ with α = 2: R = 2x², so x·(x^{−1}(R(x+y) − R(x)) − 4y) = 2y²,
    // half of 2α(α−1)y²/m = 4y².
    let d = DistModel::dirac_at_one();
    let r = Renewal::new(&d, a(2.0), q()).unwrap();
    let y = 1.5;
    for x in [1e2, 1e4] {
        let resid = x * r.blackwell_residual(x, y).unwrap();
        assert!((resid - 2.0 * y * y).abs() < 1e-6 * y * y, "x={x}: {resid}");
    }
}
