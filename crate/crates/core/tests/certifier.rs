use std::f64::consts::{E, PI};
use std::sync::OnceLock;

use proptest::prelude::*;
use qlayer_core::certifier::{
    capacity_function, certify, direct_value, evaluate, parabolic_radius, plateau_psi, verify, Candidate, SearchBudget,
    TestFunctionParams, Verdict,
};
use qlayer_core::geometry::{build, LayerModel, SurfaceSpec};
use qlayer_core::{Certificate, Error, Layer, Surface};

fn surface(spec: SurfaceSpec) -> Surface {
    build::<f64>(&spec, 1.0).unwrap()
}

fn layer(spec: SurfaceSpec, a: f64) -> Layer {
    LayerModel::new(surface(spec), a, 0.5).unwrap()
}

const CONE: SurfaceSpec = SurfaceSpec::CappedCone { alpha: PI / 4.0, cap_radius: 1.0 };
const CYLINDER: SurfaceSpec = SurfaceSpec::Cylinder { radius: 1.0 };

fn cone_certificate() -> &'static Certificate {
    static CERT: OnceLock<Certificate> = OnceLock::new();
    CERT.get_or_init(|| certify(&layer(CONE, 0.2), &SearchBudget::default()).unwrap())
}

fn cylinder_certificate() -> &'static Certificate {
    static CERT: OnceLock<Certificate> = OnceLock::new();
    CERT.get_or_init(|| certify(&layer(CYLINDER, 0.2), &SearchBudget::default()).unwrap())
}

fn candidate(l: &Layer, cert: &Certificate) -> Candidate<f64> {
    evaluate(l, &cert.params, &cert.quadrature).unwrap()
}

#[test]
fn plane_capacity_is_two_pi_over_log_ratio() {
    let s = surface(SurfaceSpec::Plane { extent: 1.0e4 });
    for (ra, rb) in [(1.0, 2.0), (3.0, 300.0), (0.5, 40.0)] {
        let c = capacity_function(&s, ra, rb).unwrap();
        let exact = 2.0 * PI / (rb / ra).ln();
        assert!((c.energy() / exact - 1.0).abs() < 1e-3, "{} vs {exact}", c.energy());
        // ψ is harmonic: linear in log r
        let mid = (ra * rb).sqrt();
        assert!((c.at_radius(mid) - 0.5).abs() < 1e-3);
        assert_eq!(c.at_radius(ra * 0.5), 1.0);
        assert_eq!(c.at_radius(rb * 2.0), 0.0);
    }
}

#[test]
fn cone_and_cylinder_capacities_match_closed_forms() {
    let alpha = PI / 4.0;
    let sa = alpha.sin();
    // outside the cap the parallel radius is sin α (r + c) with c = (1 − sin α) cap / (2 sin α)
    let c = (1.0 - sa) / (2.0 * sa);
    let cone = surface(CONE);
    for (ra, rb) in [(1.5, 10.0), (4.0, 400.0)] {
        let e = capacity_function(&cone, ra, rb).unwrap().energy();
        let exact = 2.0 * PI * sa / ((rb + c) / (ra + c)).ln();
        assert!((e / exact - 1.0).abs() < 1e-3, "{e} vs {exact}");
    }
    // two ends in parallel, each with resistance (rb − ra) / 2π
    let cyl = surface(CYLINDER);
    let e = capacity_function(&cyl, 2.0, 7.0).unwrap().energy();
    assert!((e / (4.0 * PI / 5.0) - 1.0).abs() < 1e-3, "{e}");
}

#[test]
fn capacity_energy_decays_to_zero_on_parabolic_surfaces() {
    let s = surface(SurfaceSpec::Plane { extent: 1.0e4 });
    let energies: Vec<f64> = (1..8).map(|k| capacity_function(&s, 1.0, 4f64.powi(k)).unwrap().energy()).collect();
    assert!(energies.windows(2).all(|w| w[1] < w[0]));
    let c = parabolic_radius(&s, 1.0, 0.1, 200.0).unwrap();
    assert!(c.energy() <= 0.1);
    assert!(matches!(capacity_function(&s, 2.0, 1.0), Err(Error::InvalidInput(_))));
}

#[test]
fn plateau_energy_on_the_plane() {
    let s = surface(SurfaceSpec::Plane { extent: 1.0e4 });
    let p = plateau_psi(&s, 1.0, E, E * E, E * E * E).unwrap();
    assert!((p.energy() / (4.0 * PI) - 1.0).abs() < 1e-3, "{}", p.energy());
    assert!((p.at_radius(E * 1.5) - 1.0).abs() < 1e-12);
    assert!(p.at_radius(0.5).abs() < 1e-12 && p.at_radius(30.0).abs() < 1e-12);
}

#[test]
fn plane_is_a_negative_control() {
    let l = layer(SurfaceSpec::Plane { extent: 1.0e4 }, 0.2);
    let cert = certify(&l, &SearchBudget::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::NotFound);
    let d = &cert.decomposition;
    let scale = d.q0.abs() + d.q2.abs();
    assert!(d.q1.abs() <= 1e-12 * scale, "q1 = {}", d.q1);
    assert!(d.value_at_star > 0.0);
}

#[test]
fn cylinder_is_certified_and_reproduced() {
    let l = layer(CYLINDER, 0.2);
    let cert = cylinder_certificate();
    assert_eq!(cert.verdict, Verdict::Certified);
    assert!(cert.margin > 5.0 * cert.error_bound, "{} vs {}", cert.margin, cert.error_bound);
    assert!(cert.rayleigh < cert.threshold);
    let v = verify(&l, cert).unwrap();
    assert!(v.reproduced && v.certified, "{v:?}");
}

#[test]
fn cone_is_certified_and_reproduced() {
    let l = layer(CONE, 0.2);
    let cert = cone_certificate();
    assert_eq!(cert.verdict, Verdict::Certified);
    assert!(cert.decomposition.value_at_star + cert.value_error < 0.0);
    assert!(cert.margin > 5.0 * cert.error_bound, "{} vs {}", cert.margin, cert.error_bound);
    let v = verify(&l, cert).unwrap();
    assert!(v.reproduced && v.certified, "{v:?}");
}

#[test]
fn cross_term_matches_curvature_integral() {
    for (spec, cert) in [(CONE, cone_certificate()), (CYLINDER, cylinder_certificate())] {
        let d = &cert.decomposition;
        let tol = d.errors.q1 + 1e-9 * d.q1.abs();
        assert!((d.q1 - d.q1_curvature).abs() <= tol, "{spec:?}: {} vs {}", d.q1, d.q1_curvature);
        // ∫ j H and the cross term have the sign fixed by q₁ = −(a/2) ∫ j H
        assert!((d.q1_curvature + 0.5 * cert.thickness * d.int_jh).abs() <= 1e-9 * d.q1.abs());
    }
}

#[test]
fn optimal_epsilon_minimizes_the_form() {
    for cert in [cone_certificate(), cylinder_certificate()] {
        let d = &cert.decomposition;
        let star = d.value(d.eps_star);
        assert!((star - d.value_at_star).abs() <= 1e-9 * d.q0.abs());
        assert!((d.value_at_star - (d.q0 - d.q1 * d.q1 / d.q2)).abs() <= 1e-9 * d.q0.abs());
        for f in [-3.0, -1.0, 0.0, 0.5, 0.99, 1.01, 2.0] {
            assert!(d.value(f * d.eps_star) >= star - 1e-12 * d.q0.abs());
        }
    }
}

#[test]
fn longer_windows_do_not_lower_the_growth_ratio() {
    let l = layer(CONE, 0.2);
    let base = cone_certificate().params;
    let mut prev = 0.0;
    for k in 0..3 {
        let mut p = base;
        p.t0 = base.t0 / 8.0 * 2f64.powi(k);
        p.alpha = p.t0 / 8.0;
        p.r3 = qlayer_core::certifier::window_radius_range(&l.surface, &p, 9, 33).1 * (1.0 + 1e-9) + 1e-9;
        p.r4 = p.r3 * base.r4 / base.r3;
        let g = evaluate(&l, &p, &cone_certificate().quadrature).unwrap().decomposition.growth_ratio();
        assert!(g >= prev, "{g} after {prev}");
        prev = g;
    }
}

#[test]
fn outer_capacity_decays_when_widening_the_plateau() {
    let s = surface(CONE);
    let p = cone_certificate().params;
    let mut prev = f64::INFINITY;
    for k in 0..4 {
        let r4 = p.r3 * (p.r4 / p.r3).powf(1.0 + k as f64);
        let e = plateau_psi(&s, p.r1, p.r2, p.r3, r4).unwrap().outer.energy();
        assert!(e < prev);
        prev = e;
    }
}

#[test]
fn unsupported_and_invalid_inputs() {
    let hel = layer(SurfaceSpec::Helicoid { c: 1.0, s_halfwidth: 3.0 }, 0.2);
    assert!(matches!(certify(&hel, &SearchBudget::default()), Err(Error::Unsupported(_))));
    let l = layer(CYLINDER, 0.2);
    let mut p: TestFunctionParams<f64> = cylinder_certificate().params;
    p.r3 = p.r2 * 0.5;
    assert!(evaluate(&l, &p, &cylinder_certificate().quadrature).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// `Q(φ_ε)` computed pointwise agrees with `q0 + 2εq1 + ε²q2`.
    #[test]
    fn form_is_quadratic_in_epsilon(eps in -2.0f64..2.0) {
        let l = layer(CYLINDER, 0.2);
        let cert = cylinder_certificate();
        let c = candidate(&l, cert);
        let d = &c.decomposition;
        let direct = direct_value(&l, &c.plateau, &c.cutoff, &cert.quadrature, eps).unwrap();
        let bound = d.value_error(eps) + direct.roundoff + 1e-12 * d.q0.abs();
        prop_assert!((direct.value - d.value(eps)).abs() <= bound, "{} vs {}", direct.value, d.value(eps));
        prop_assert!((direct.norm - d.norm(eps)).abs() <= d.norm_error(eps) + 1e-12 * d.n0);
    }
}
