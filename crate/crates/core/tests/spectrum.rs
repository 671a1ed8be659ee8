use std::f64::consts::PI;

use proptest::prelude::*;
use qlayer_core::certifier::{certify, evaluate, SearchBudget};
use qlayer_core::geometry::{build, LayerModel, SurfaceSpec};
use qlayer_core::spectrum::{
    assemble, default_ladder, lowest_eigenvalues, spectrum, threshold_scan, MeshSpec, SBoundary, SolverOptions,
};
use qlayer_core::Layer;

fn layer(spec: SurfaceSpec, a: f64) -> Layer {
    LayerModel::new(build::<f64>(&spec, 1.0).unwrap(), a, 0.5).unwrap()
}

fn plane(a: f64) -> Layer {
    layer(SurfaceSpec::Plane { extent: 1.0e4 }, a)
}

fn cone() -> Layer {
    layer(SurfaceSpec::CappedCone { alpha: PI / 4.0, cap_radius: 1.0 }, 0.2)
}

fn box_mesh(n: usize, p: usize, ls: f64, lv: f64) -> MeshSpec<f64> {
    MeshSpec::chart_box(n, n, 2, p, Some((0.0, ls)), (0.0, lv), SBoundary::Dirichlet)
}

#[test]
fn plane_box_matches_separable_closed_form() {
    let l = plane(0.5);
    let (ls, lv) = (3.0, 4.0);
    let exact = PI * PI + (PI / ls).powi(2) + (PI / lv).powi(2);
    let coarse = spectrum(&l, &box_mesh(2, 3, ls, lv), &SolverOptions::new(3)).unwrap();
    let reference = spectrum(&l, &box_mesh(4, 3, ls, lv), &SolverOptions::new(3)).unwrap();
    // second box eigenvalue: one more half-wave along the longer side
    let exact2 = PI * PI + (PI / ls).powi(2) + (2.0 * PI / lv).powi(2);
    assert!((reference.lambda1() / exact - 1.0).abs() < 5e-3, "{}", reference.lambda1());
    assert!((reference.eigenvalues[1] / exact2 - 1.0).abs() < 5e-3, "{:?}", reference.eigenvalues);
    // conforming: upper bounds, non-increasing under refinement
    assert!(reference.lambda1() >= exact * (1.0 - 1e-10));
    assert!(reference.lambda1() <= coarse.lambda1() * (1.0 + 1e-8));
    assert!(reference.eigenvalues.iter().all(|&x| x >= 0.0));
    assert_eq!(reference.count_below_threshold, 0);
}

#[test]
fn transverse_mode_rayleigh_quotient_stays_above_threshold() {
    let l = plane(0.3);
    let k = PI / 0.6;
    let asm = assemble(&l, &box_mesh(2, 2, 2.0, 2.0)).unwrap();
    let rq = asm.nodal_rayleigh(|c| (k * c[2]).cos() * (PI * c[0] / 2.0).sin() * (PI * c[1] / 2.0).sin());
    assert!(rq >= k * k, "{rq}");
}

#[test]
fn periodic_box_agrees_with_axisymmetric_solver_on_the_cylinder() {
    let l = layer(SurfaceSpec::Cylinder { radius: 1.0 }, 0.2);
    let v = 6.0;
    let opts = SolverOptions { k: 1, ..SolverOptions::new(11) };
    let axi = spectrum(&l, &MeshSpec::axisymmetric(12, 2, 3, v, 100.0), &opts).unwrap();
    let full = MeshSpec::chart_box(4, 6, 2, 3, None, (-v, v), SBoundary::Periodic);
    let box3 = spectrum(&l, &full, &opts).unwrap();
    let rel = (box3.lambda1() - axi.lambda1()).abs() / axi.lambda1();
    assert!(rel < 2e-4, "{} vs {}", box3.lambda1(), axi.lambda1());
    assert!(box3.lambda1() < l.threshold());
}

#[test]
fn plane_layer_converges_to_the_threshold_from_above() {
    let l = plane(0.5);
    let scan = threshold_scan(&l, &default_ladder(MeshSpec::axisymmetric(24, 2, 4, 25.0, 2.0)), &SolverOptions::new(1)).unwrap();
    assert!(scan.rows.iter().all(|r| r.count_below_threshold == 0 && r.lambda1 > PI * PI));
    assert!((scan.extrapolated / (PI * PI) - 1.0).abs() < 0.01);
    assert!((scan.extrapolated - PI * PI).abs() <= scan.extrapolation_error.max(1e-4), "{scan:?}");
    // the truncation error of a disc of radius V decays like V⁻²
    let order = scan.observed_order.unwrap();
    assert!((order - 2.0).abs() < 0.1, "{order}");
}

#[test]
fn cone_layer_has_a_bound_state_resolved_beyond_extrapolation_error() {
    let l = cone();
    let scan = threshold_scan(&l, &default_ladder(MeshSpec::axisymmetric(24, 2, 4, 25.0, 2.0)), &SolverOptions::new(1)).unwrap();
    assert!(scan.gap > 0.0 && scan.resolved_below(5.0), "{scan:?}");
    assert!(scan.rows.last().unwrap().count_below_threshold >= 1);
    assert!(scan.monotonicity_defect <= 1e-8 * scan.threshold);
    let last = scan.last.as_ref().unwrap();
    assert!(last.ground_state.iter().all(|p| p[3] >= -1e-8), "ground state keeps one sign");
}

#[test]
fn cylinder_layer_is_below_threshold() {
    let l = layer(SurfaceSpec::Cylinder { radius: 1.0 }, 0.2);
    let r = spectrum(&l, &MeshSpec::axisymmetric(24, 2, 4, 25.0, 2.0), &SolverOptions::new(2)).unwrap();
    assert!(r.gap() > 0.2, "{:?}", r.eigenvalues);
    assert!(r.count_below_threshold >= 1);
}

#[test]
fn cylinder_certificate_is_an_admissible_trial_function() {
    let l = layer(SurfaceSpec::Cylinder { radius: 1.0 }, 0.2);
    let cert = certify(&l, &SearchBudget::default()).unwrap();
    let cand = evaluate(&l, &cert.params, &SearchBudget::default().quadrature).unwrap();
    let v = cert.params.r4 + 1.0;
    let asm = assemble(&l, &MeshSpec::axisymmetric(64, 2, 4, v, 4.0)).unwrap();
    let rq = asm.nodal_rayleigh(|c| cand.trial_function(0.2, c[1].abs(), 0.0, c[1], c[2]));
    let pairs = lowest_eigenvalues(&asm.stiffness, &asm.mass, 1, 1e-9, 3).unwrap();
    assert!(pairs.values[0] <= rq * (1.0 + 1e-9));
    assert!((rq - cert.rayleigh).abs() < 1e-5 * cert.rayleigh, "{rq} vs {}", cert.rayleigh);
}

#[test]
fn same_seed_reproduces_the_report() {
    let l = cone();
    let m = MeshSpec::axisymmetric(16, 2, 3, 20.0, 2.0);
    let a = spectrum(&l, &m, &SolverOptions::new(9)).unwrap();
    let b = spectrum(&l, &m, &SolverOptions::new(9)).unwrap();
    assert_eq!(a.eigenvalues, b.eigenvalues);
    assert_eq!(a.residuals, b.residuals);
}

#[test]
fn invalid_meshes_are_rejected() {
    let l = cone();
    assert!(spectrum(&l, &MeshSpec::axisymmetric(1, 1, 1, 20.0, 2.0), &SolverOptions::new(1)).is_err());
    assert!(spectrum(&l, &MeshSpec::axisymmetric(8, 2, 2, 0.5, 2.0), &SolverOptions::new(1)).is_err());
    let hel = layer(SurfaceSpec::Helicoid { c: 1.0, s_halfwidth: 3.0 }, 0.2);
    assert!(spectrum(&hel, &MeshSpec::axisymmetric(8, 2, 2, 20.0, 2.0), &SolverOptions::new(1)).is_err());
    let bad = MeshSpec::chart_box(4, 4, 2, 2, None, (0.0, 10.0), SBoundary::Periodic);
    assert!(spectrum(&hel, &bad, &SolverOptions::new(1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Enlarging the truncation on a nested mesh never raises λ₁.
    #[test]
    fn dirichlet_truncation_is_monotone(n in 4usize..10, extra in 1usize..4) {
        let l = cone();
        let h = 2.0;
        let small = MeshSpec::axisymmetric(n, 2, 2, h * n as f64, 1e9);
        let large = MeshSpec::axisymmetric(n + extra, 2, 2, h * (n + extra) as f64, 1e9);
        let opts = SolverOptions { k: 1, ..SolverOptions::new(4) };
        let a = spectrum(&l, &small, &opts).unwrap().lambda1();
        let b = spectrum(&l, &large, &opts).unwrap().lambda1();
        prop_assert!(b <= a * (1.0 + 1e-8), "{} > {}", b, a);
    }

    /// Min-max: any nodal vector has Rayleigh quotient at least λ₁.
    #[test]
    fn rayleigh_quotients_bound_lambda1(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, w in 0.05f64..0.5) {
        let l = cone();
        let asm = assemble(&l, &MeshSpec::axisymmetric(8, 2, 2, 16.0, 2.0)).unwrap();
        let lam = lowest_eigenvalues(&asm.stiffness, &asm.mass, 1, 1e-9, 1).unwrap().values[0];
        let k = PI / 0.4;
        let rq = asm.nodal_rayleigh(|c| (k * c[2]).cos() * (-w * c[1]).exp() * (1.0 + c1 * c[2] + c2 * (c[1] / 16.0)));
        prop_assert!(rq >= lam * (1.0 - 1e-10));
    }
}
