use std::f64::consts::PI;

use proptest::prelude::*;
use qlayer_core::asymptotics::{
    classify_degrees, geometric_grid, growth_classification, h2_integrability, sector_integral_h, t_dominance,
    tail_verdict, Degree, DegreePair, DivergenceRate, Growth, GrowthOptions, SectorQuadrature, TailOptions,
};
use qlayer_core::geometry::{build, CoefficientProfile, Coefficients, SDomain, SurfaceSpec};
use qlayer_core::Error;

fn constant(a: f64, b: f64, d: f64, e: f64, j: f64) -> CoefficientProfile<f64> {
    CoefficientProfile::constant(Coefficients::constant(a, b, d, e, j), SDomain::Interval { lo: 0.0, hi: 1.0 }, (0.0, 1e9), 16)
}

fn pair(p: Degree, q: Degree) -> DegreePair {
    DegreePair { p, q }
}

fn catalog_profile(spec: SurfaceSpec) -> (CoefficientProfile<f64>, (f64, f64)) {
    let s = build::<f64>(&spec, 1.0).unwrap();
    let prof = CoefficientProfile::from_chart(&s.chart, 64);
    let win = s.chart.s_domain.bounds();
    (prof, win)
}

/// One synthetic profile per degree case with its predicted growth and `H²` behaviour.
fn cases() -> Vec<(&'static str, CoefficientProfile<f64>, DegreePair, Growth, bool)> {
    use Degree::*;
    vec![
        // Q = (1 + v/2)², P = v²/4: the cone's shape
        ("(2,2)", constant(1.0, 0.25, 0.0, 0.0, 0.25), pair(Two, Two), Growth::Polynomial(1), false),
        ("(0,0)", constant(0.0, 0.0, -1.0, 0.0, 0.0), pair(Zero, Zero), Growth::Polynomial(1), false),
        ("(1,0)", constant(0.0, 0.0, 0.0, 0.5, 0.0), pair(One, Zero), Growth::Polynomial(2), false),
        ("(1,2)", constant(0.0, 1.0, 0.0, 1.0, 0.0), pair(One, Two), Growth::Sublinear, true),
        ("(0,2)", constant(0.0, 1.0, 1.0, 0.0, 0.0), pair(Zero, Two), Growth::Sublinear, true),
    ]
}

#[test]
fn degree_cases_match_predicted_growth() {
    let q = SectorQuadrature::default();
    for (name, prof, degrees, growth, _) in cases() {
        let dp = classify_degrees(&prof, (0.0, 1.0), 1e-9, 0.0).unwrap();
        assert!(dp.stable, "{name}");
        assert_eq!(dp.degrees, degrees, "{name}");
        let t = t_dominance(&prof, (0.0, 1.0)).max(1.0);
        let v = growth_classification(&prof, &dp, t, GrowthOptions::default(), q).unwrap();
        assert_eq!(v.predicted, growth, "{name}");
        assert_eq!(v.classification, growth, "{name}: exponent {}", v.exponent);
        assert!(v.consistent);
    }
}

#[test]
fn h2_integrability_dichotomy() {
    let q = SectorQuadrature::default();
    let grid = geometric_grid(4.0, 12);
    for (name, prof, _, _, convergent) in cases() {
        let dp = classify_degrees(&prof, (0.0, 1.0), 1e-9, 0.0).unwrap();
        let v = h2_integrability(&prof, &dp, &grid, TailOptions::default(), q).unwrap();
        assert_eq!(v.tail.convergent, convergent, "{name}: {:?}", v.tail.rate);
        assert_eq!(v.predicted_convergent, convergent, "{name}");
        assert!(v.consistent, "{name}");
    }
}

#[test]
fn cone_shape_diverges_logarithmically_and_constant_h_diverges_linearly() {
    let q = SectorQuadrature::default();
    let grid = geometric_grid(4.0, 12);
    let cs = cases();
    let (_, cone, ..) = &cs[0];
    let dp = classify_degrees(cone, (0.0, 1.0), 1e-9, 0.0).unwrap();
    let v = h2_integrability(cone, &dp, &grid, TailOptions::default(), q).unwrap();
    // P²/Q^{5/2} = v⁴/16 / (1 + v/2)⁵ → 2/v, so truncations grow like 2 log V
    match v.tail.rate {
        Some(DivergenceRate::Log { slope }) => assert!((slope - 2.0).abs() < 0.05, "{slope}"),
        other => panic!("{other:?}"),
    }
    let (_, cyl, ..) = &cs[1];
    let dp = classify_degrees(cyl, (0.0, 1.0), 1e-9, 0.0).unwrap();
    let v = h2_integrability(cyl, &dp, &grid, TailOptions::default(), q).unwrap();
    match v.tail.rate {
        Some(DivergenceRate::Power { exponent }) => assert!((exponent - 1.0).abs() < 1e-6, "{exponent}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sector_integrals_match_closed_forms() {
    let q = SectorQuadrature::default();
    // P/Q = v / (1 + v²)  →  ½ log((1 + (t+t0)²)/(1 + t²))
    let prof = constant(0.0, 1.0, 0.0, 1.0, 0.0);
    let (t, t0) = (2.0f64, 30.0);
    let exact = 0.5 * ((1.0 + (t + t0) * (t + t0)) / (1.0 + t * t)).ln();
    let e = sector_integral_h(&prof, (0.0, 1.0), t, t0, q).unwrap();
    assert!((e.value - exact).abs() < 1e-9, "{} vs {exact}", e.value);
    // P/Q = 1 / (1 + v²)  →  atan
    let prof = constant(0.0, 1.0, 1.0, 0.0, 0.0);
    let exact = (t + t0).atan() - t.atan();
    let e = sector_integral_h(&prof, (0.0, 0.5), t, t0, q).unwrap();
    assert!((e.value - 0.5 * exact).abs() < 1e-9);
}

#[test]
fn catalog_surfaces_have_their_degree_cases() {
    use Degree::*;
    let (cone, w) = catalog_profile(SurfaceSpec::CappedCone { alpha: PI / 4.0, cap_radius: 1.0 });
    assert_eq!(classify_degrees(&cone, w, 1e-9, 0.0).unwrap().degrees, pair(Two, Two));
    let (cyl, w) = catalog_profile(SurfaceSpec::Cylinder { radius: 1.0 });
    assert_eq!(classify_degrees(&cyl, w, 1e-9, 0.0).unwrap().degrees, pair(Zero, Zero));
    let (plane, w) = catalog_profile(SurfaceSpec::Plane { extent: 100.0 });
    let dp = classify_degrees(&plane, w, 1e-9, 0.0).unwrap();
    assert_eq!(dp.degrees, pair(NegInf, Zero));
    let g = growth_classification(&plane, &dp, 1.0, GrowthOptions::default(), SectorQuadrature::default()).unwrap();
    assert_eq!(g.classification, Growth::Sublinear);
    let (hel, w) = catalog_profile(SurfaceSpec::Helicoid { c: 1.0, s_halfwidth: 3.0 });
    assert_eq!(classify_degrees(&hel, w, 1e-9, 0.0).unwrap().degrees, pair(NegInf, Two));
}

#[test]
fn varying_degrees_report_the_longest_stable_run() {
    let prof = CoefficientProfile::from_fn(SDomain::Interval { lo: 0.0, hi: 1.0 }, (0.0, 1e9), 21, |s: f64| {
        Coefficients::constant(0.0, 1.0, 1.0, if s > 0.7 { 1.0 } else { 0.0 }, 0.0)
    });
    let dp = classify_degrees(&prof, (0.0, 1.0), 1e-9, 0.0).unwrap();
    assert!(!dp.stable);
    assert_eq!(dp.degrees, pair(Degree::Zero, Degree::Two));
    assert!(dp.window.1 <= 0.7 + 1e-12);
    assert!(matches!(classify_degrees(&prof, (0.0, 1.0), 1e-9, 0.9), Err(Error::UnstableWindow(_))));
}

#[test]
fn tail_verdict_rejects_short_grids_and_erratic_increments() {
    assert!(tail_verdict(vec![(1.0, 0.0), (2.0, 1.0)], TailOptions::default()).is_err());
    let erratic: Vec<(f64, f64)> = (0..8).map(|k| (2f64.powi(k), if k % 2 == 0 { 1.0 } else { 3.0 + k as f64 })).collect();
    assert!(matches!(tail_verdict(erratic, TailOptions::default()), Err(Error::InconclusiveFit(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// A geometrically converging series is declared convergent with a tail
    /// bound at least as large as the true remainder.
    #[test]
    fn geometric_series_tail(r in 0.05f64..0.6, c in 0.1f64..10.0) {
        let pts: Vec<(f64, f64)> = (0..10).map(|k| (2f64.powi(k), c * (1.0 - r.powi(k + 1)) / (1.0 - r))).collect();
        let limit = c / (1.0 - r);
        let v = tail_verdict(pts.clone(), TailOptions::default());
        if let Ok(v) = v {
            prop_assert!(v.convergent);
            prop_assert!(v.tail_estimate >= (limit - pts[9].1).abs() * 0.99 - 1e-12 * limit);
        }
    }

    /// Degree prediction is monotone: raising deg Q never raises the growth.
    #[test]
    fn predicted_growth_falls_with_deg_q(p in 0i32..3) {
        let d = [Degree::Zero, Degree::One, Degree::Two][p as usize];
        let g0 = pair(d, Degree::Zero).predicted_growth().unwrap_or(0);
        let g2 = pair(d, Degree::Two).predicted_growth().unwrap_or(0);
        prop_assert!(g2 <= g0);
    }
}
