use std::f64::consts::{FRAC_PI_4, PI, TAU};

use qlayer_core::error::Error;
use qlayer_core::geometry::{build, SurfaceSpec};
use qlayer_core::topology::{default_radius_grid, isoperimetric_constants, topology_report, total_curvature};
use qlayer_core::Surface;

fn surface(spec: SurfaceSpec) -> Surface {
    build::<f64>(&spec, 1.0).unwrap()
}

#[test]
fn plane_is_flat_with_unit_end() {
    let m = surface(SurfaceSpec::Plane { extent: 1e4 });
    let rep = topology_report(&m, &default_radius_grid(&m, 8)).unwrap();
    assert_eq!(rep.total_k.value, 0.0);
    assert!((rep.ends[0].lambda - 1.0).abs() < 1e-10);
    assert!(rep.hartman.unwrap().residual.abs() < 1e-10);
    assert!(rep.white.second_form_l2.convergent);
    assert!(rep.white.residual.unwrap() < 0.05);
}

#[test]
fn capped_cone_matches_closed_forms() {
    for alpha in [0.3, FRAC_PI_4, 1.2] {
        let m = surface(SurfaceSpec::CappedCone { alpha, cap_radius: 1.0 });
        let rep = topology_report(&m, &default_radius_grid(&m, 10)).unwrap();
        let exact = TAU * (1.0 - alpha.sin());
        assert!((rep.total_k.value - exact).abs() < 0.01 * exact);
        assert!((rep.ends[0].lambda - alpha.sin()).abs() < 1e-4, "{}", rep.ends[0].lambda - alpha.sin());
        let h = rep.hartman.unwrap();
        assert!(h.residual.abs() < 0.02, "{}", h.residual);
        assert!(rep.total_k.value > 0.0 && rep.total_k.value <= TAU);
        assert!(rep.huber_slack >= -rep.total_k.tail_estimate);
        assert!(!rep.white.second_form_l2.convergent);
        assert!(rep.white.residual.is_none());
    }
}

#[test]
fn hyperboloid_has_two_asymptotic_cone_ends() {
    let (a, c) = (1.0f64, 0.7);
    let m = surface(SurfaceSpec::Hyperboloid { a, c });
    let rep = topology_report(&m, &default_radius_grid(&m, 12)).unwrap();
    let sa = a / a.hypot(c);
    assert_eq!(rep.ends.len(), 2);
    for e in &rep.ends {
        assert!((e.lambda - sa).abs() < 1e-3, "{} vs {sa}", e.lambda);
    }
    assert!((rep.total_k.value + 2.0 * TAU * sa).abs() < 1e-3);
    assert!(rep.hartman.unwrap().residual.abs() < 0.02);
    assert!(!rep.white.second_form_l2.convergent);
}

#[test]
fn full_helicoid_total_curvature_diverges() {
    let m = surface(SurfaceSpec::Helicoid { c: 1.0, s_halfwidth: 2.0 });
    let grid: Vec<f64> = (0..5).map(|k| 4.0 * 2f64.powi(k)).collect();
    assert!(matches!(total_curvature(&m, &grid), Err(Error::NonconvergentTail(_))));
    assert!(matches!(isoperimetric_constants(&m, &grid), Err(Error::Unsupported(_))));
}

#[test]
fn cylinder_area_ratio_vanishes() {
    let m = surface(SurfaceSpec::Cylinder { radius: 1.0 });
    let rep = topology_report(&m, &default_radius_grid(&m, 10)).unwrap();
    assert_eq!(rep.euler_characteristic, 0);
    assert!(rep.total_k.value.abs() < 1e-12);
    // area of B(r) is 4πr per the two ends, so λ → 0 like 2/r
    for e in &rep.ends {
        assert!(e.lambda.abs() < 1e-6);
        assert!((e.slope - 2.0).abs() < 1e-6);
    }
    let _ = PI;
}
