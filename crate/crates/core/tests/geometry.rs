use proptest::prelude::*;
use qlayer_core::geometry::{
    build, chart_coefficients, gauss_curvature, is_developable, mean_curvature_from_forms, second_form_and_shape,
    CoefficientProfile, LayerModel, SurfaceSpec,
};
use qlayer_core::vec3::Vec3;
use qlayer_core::Surface;

fn surface(spec: SurfaceSpec) -> Surface {
    build::<f64>(&spec, 1.0).unwrap()
}

fn grid(m: &Surface, ns: usize, v_lo: f64, v_hi: f64, nv: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for s in m.chart.s_domain.samples(ns) {
        for i in 0..nv {
            out.push((s, v_lo + (v_hi - v_lo) * i as f64 / (nv - 1) as f64));
        }
    }
    out
}

/// Mean curvature by finite differences of the unit normal along the chart:
/// W = I⁻¹ II with II_ij = −⟨∂_i x, ∂_j N⟩.
fn fd_mean_curvature(m: &Surface, s: f64, v: f64) -> f64 {
    let h = 1e-5;
    let n = |s: f64, v: f64| {
        let xs = (m.chart.point(s + h, v) - m.chart.point(s - h, v)) * (0.5 / h);
        let xv = (m.chart.point(s, v + h) - m.chart.point(s, v - h)) * (0.5 / h);
        xs.cross(xv).normalized().unwrap()
    };
    let xs = (m.chart.point(s + h, v) - m.chart.point(s - h, v)) * (0.5 / h);
    let xv = (m.chart.point(s, v + h) - m.chart.point(s, v - h)) * (0.5 / h);
    let ns = (n(s + h, v) - n(s - h, v)) * (0.5 / h);
    let nv = (n(s, v + h) - n(s, v - h)) * (0.5 / h);
    let (e, f, g) = (xs.dot(xs), xs.dot(xv), xv.dot(xv));
    let (l, mm, nn) = (-xs.dot(ns), -0.5 * (xs.dot(nv) + xv.dot(ns)), -xv.dot(nv));
    (e * nn - 2.0 * f * mm + g * l) / (e * g - f * f)
}

#[test]
fn cylinder_coefficients_and_shape_operator() {
    let m = surface(SurfaceSpec::Cylinder { radius: 2.0 });
    for s in m.chart.s_domain.samples(16) {
        let c = chart_coefficients(&m.chart, s);
        assert!(c.a.abs() < 1e-14 && c.b.abs() < 1e-14 && c.e.abs() < 1e-14 && c.j.abs() < 1e-14);
        assert!((c.d + 0.5).abs() < 1e-14);
        let fd = fd_mean_curvature(&m, s, 0.3);
        assert!((fd + 0.5).abs() < 1e-5, "fd oracle {fd}");
    }
    let unit = surface(SurfaceSpec::Cylinder { radius: 1.0 });
    let f = second_form_and_shape(&unit.chart, 0.7, 1.1);
    let (tr, det) = (f.mean(), f.gauss());
    let disc = (tr * tr - 4.0 * det).sqrt();
    let mut eig = [(tr - disc) / 2.0, (tr + disc) / 2.0];
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((eig[0] + 1.0).abs() < 1e-14 && eig[1].abs() < 1e-14);
    let flipped = build::<f64>(&SurfaceSpec::Cylinder { radius: 1.0 }, -1.0).unwrap();
    assert!((chart_coefficients(&flipped.chart, 0.0).d - 1.0).abs() < 1e-14);
}

#[test]
fn helicoid_is_minimal_with_classical_gauss_curvature() {
    let m = surface(SurfaceSpec::Helicoid { c: 1.0, s_halfwidth: 5.0 });
    let c = chart_coefficients(&m.chart, 0.3);
    assert!(c.a.abs() < 1e-15 && (c.b - 1.0).abs() < 1e-14);
    assert!(c.d.abs() < 1e-15 && c.e.abs() < 1e-15 && c.j.abs() < 1e-15);
    for (s, v) in grid(&m, 21, -8.0, 8.0, 33) {
        assert!(mean_curvature_from_forms(&m.chart, s, v).abs() < 1e-9);
        let k = gauss_curvature(&m.chart, s, v);
        let exact = -1.0 / (1.0 + v * v).powi(2);
        assert!((k - exact).abs() <= 1e-12 * exact.abs());
    }
    assert!(!is_developable(&m.chart, 16, &[0.0, 1.0, 2.0], 1e-10).developable);
}

#[test]
fn cone_tail_matches_closed_form() {
    let alpha = 0.9f64;
    let m = surface(SurfaceSpec::CappedCone { alpha, cap_radius: 1.5 });
    let p = m.profile.unwrap();
    let rho_c = p.jet(1.5).rho;
    for (s, v) in grid(&m, 17, 0.0, 40.0, 41) {
        let rho = rho_c + v * alpha.sin();
        let h = mean_curvature_from_forms(&m.chart, s, v);
        assert!((h + alpha.cos() / rho).abs() < 1e-12 / rho);
        assert!(gauss_curvature(&m.chart, s, v).abs() < 1e-16);
        assert!((m.radius(s, v) - (1.5 + v)).abs() < 1e-10);
    }
    let c = chart_coefficients(&m.chart, 0.2);
    assert!((c.a * c.a - 4.0 * c.b).abs() < 1e-14);
    assert!(m.gluing_defect(32).unwrap() < 1e-10);
}

#[test]
fn tangent_developable_is_flat_with_closed_form_mean_curvature() {
    let (r, pitch, len) = (1.0f64, 0.5, 6.0);
    let m = surface(SurfaceSpec::TangentDevelopable { radius: r, pitch, length: len });
    assert!(m.chart.max_gauge_defect(101) < 1e-8);
    let kappa = r / (r * r + pitch * pitch);
    let t0 = len + 1.0;
    for (s, v) in grid(&m, 23, -0.4, 30.0, 23) {
        let sigma = t0 - (t0 * t0 - 2.0 * s / kappa).sqrt();
        let exact = (pitch / r) / (t0 - sigma + v);
        let h = mean_curvature_from_forms(&m.chart, s, v);
        assert!((h.abs() - exact).abs() <= 1e-6 * exact, "s={s} v={v} h={h} exact={exact}");
        assert!(gauss_curvature(&m.chart, s, v).abs() < 1e-10 * exact * exact);
    }
    assert!(is_developable(&m.chart, 32, &[0.0, 1.0, 5.0], 1e-10).developable);
}

#[test]
fn hyperboloid_chart_lies_on_the_quadric() {
    let (a, c) = (1.0f64, 0.7);
    let m = surface(SurfaceSpec::Hyperboloid { a, c });
    assert!(m.chart.max_gauge_defect(101) < 1e-8);
    let shift = m.gauge_shift.clone().unwrap();
    assert!(shift.max_shift <= shift.raw_length);
    for (s, v) in grid(&m, 15, -20.0, 20.0, 9) {
        let x = m.chart.point(s, v);
        let resid = (x.x * x.x + x.y * x.y) / (a * a) - x.z * x.z / (c * c) - 1.0;
        assert!(resid.abs() < 1e-9 * (1.0 + x.norm_sq()));
        let k = gauss_curvature(&m.chart, s, v);
        // K = −1 / (a² c² (ρ²/a⁴ + z²/c⁴)²) for this quadric
        let q = (x.x * x.x + x.y * x.y) / a.powi(4) + x.z * x.z / c.powi(4);
        let exact = -1.0 / (a * a * c * c * q * q);
        assert!((k - exact).abs() < 1e-7 * exact.abs(), "{k} vs {exact}");
    }
}

#[test]
fn mean_curvature_routes_agree_on_catalog() {
    for spec in [
        SurfaceSpec::Plane { extent: 50.0 },
        SurfaceSpec::Cylinder { radius: 1.3 },
        SurfaceSpec::CappedCone { alpha: 0.5, cap_radius: 1.0 },
        SurfaceSpec::Hyperboloid { a: 1.0, c: 2.0 },
        SurfaceSpec::Helicoid { c: 0.5, s_halfwidth: 3.0 },
        SurfaceSpec::TangentDevelopable { radius: 2.0, pitch: 0.3, length: 4.0 },
    ] {
        let m = surface(spec.clone());
        let prof = CoefficientProfile::from_chart(&m.chart, 32);
        let (lo, hi) = (m.chart.v_range.0.max(-10.0), m.chart.v_range.1.min(10.0));
        for (s, v) in grid(&m, 32, lo, hi, 16) {
            let a = prof.at(s).mean_curvature(v);
            let b = mean_curvature_from_forms(&m.chart, s, v);
            assert!((a - b).abs() <= 1e-6 * a.abs().max(b.abs()) + 1e-14, "{spec:?} {a} {b}");
            assert!(gauss_curvature(&m.chart, s, v) <= 1e-10);
        }
    }
}

#[test]
fn cylinder_layer_density_matches_determinant_oracle() {
    let m = surface(SurfaceSpec::Cylinder { radius: 1.0 });
    let layer = LayerModel::new(m, 0.4, 0.5).unwrap();
    let g = layer.layer_metric(0.4, 2.0, 0.3).unwrap();
    assert!((g.density - 1.3).abs() < 1e-14);
    // det G = density² det g with det g = 1
    assert!((g.determinant() - 1.69).abs() < 1e-13);
    let zero = layer.layer_metric(0.4, 2.0, 0.0).unwrap();
    assert_eq!(zero.density, 1.0);
    assert!((zero.g[0][0] - 1.0).abs() < 1e-15 && zero.g[2][2] == 1.0);
}

#[test]
fn thick_layer_is_rejected() {
    let m = surface(SurfaceSpec::Cylinder { radius: 1.0 });
    assert!(LayerModel::new(m, 0.6, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ruled_charts_have_nonpositive_curvature(
        s in -3.0f64..3.0, v in -5.0f64..5.0, c in 0.2f64..3.0, alpha in 0.1f64..1.4,
    ) {
        let hel = surface(SurfaceSpec::Helicoid { c, s_halfwidth: 4.0 });
        prop_assert!(gauss_curvature(&hel.chart, s, v) <= 1e-10);
        let cone = surface(SurfaceSpec::CappedCone { alpha, cap_radius: 1.0 });
        let vv = v.abs();
        prop_assert!(gauss_curvature(&cone.chart, s, vv) <= 1e-10);
        let prof = CoefficientProfile::from_chart(&cone.chart, 4);
        let h1 = prof.at(s).mean_curvature(vv);
        let h2 = mean_curvature_from_forms(&cone.chart, s, vv);
        prop_assert!((h1 - h2).abs() <= 1e-6 * h1.abs());
    }

    #[test]
    fn layer_density_respects_thickness_bound(u in -0.19f64..0.19, s in 0.0f64..6.0, v in 0.0f64..30.0) {
        let cone = surface(SurfaceSpec::CappedCone { alpha: std::f64::consts::FRAC_PI_4, cap_radius: 1.0 });
        let layer = LayerModel::new(cone, 0.2, 0.5).unwrap();
        let g = layer.layer_metric(s, v, u).unwrap();
        prop_assert!(g.density >= (1.0 - 0.5f64).powi(2) - 1e-12);
        let p = layer.surface.chart.point(s, v);
        prop_assert!(p.norm() > 0.0);
        let _ = Vec3::<f64>::zero();
    }
}
