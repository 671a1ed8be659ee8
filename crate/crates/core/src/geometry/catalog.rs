//! Named surfaces with closed-form ruled charts.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CentralDifference, Circle, Constant, CubicSpline, CurveRef, Formula, Helix, Jet, Line};
use crate::error::{Error, Result};
use crate::geometry::chart::{orthonormalize_chart, GaugeOptions, RuledChart, SDomain};
use crate::geometry::revolution::RevolutionProfile;
use crate::geometry::surface::SurfaceModel;
use crate::scalar::{lit, Scalar};
use crate::vec3::Vec3;

/// Far end of catalog rulings.
pub const RULING_REACH: f64 = 1.0e7;

/// Surface selection with its parameters, as stored in configs and certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    /// Plane with Cartesian chart over `[-extent, extent]`.
    Plane { extent: f64 },
    Cylinder { radius: f64 },
    CappedCone { alpha: f64, cap_radius: f64 },
    Hyperboloid { a: f64, c: f64 },
    Helicoid { c: f64, s_halfwidth: f64 },
    TangentDevelopable { radius: f64, pitch: f64, length: f64 },
    /// User directrix and ruling field sampled in CSV files `s,x,y,z`.
    Ruled {
        beta_csv: PathBuf,
        delta_csv: PathBuf,
        v_min: f64,
        v_max: f64,
        euler_characteristic: i32,
        /// Centered-difference step for derivatives; exact spline derivatives when absent.
        fd_step: Option<f64>,
    },
}

impl SurfaceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Plane { .. } => "plane",
            Self::Cylinder { .. } => "cylinder",
            Self::CappedCone { .. } => "capped_cone",
            Self::Hyperboloid { .. } => "hyperboloid",
            Self::Helicoid { .. } => "helicoid",
            Self::TangentDevelopable { .. } => "tangent_developable",
            Self::Ruled { .. } => "ruled",
        }
    }

    /// Catalog entry with default parameters.
    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "plane" => Self::Plane { extent: 1.0e4 },
            "cylinder" => Self::Cylinder { radius: 1.0 },
            "capped_cone" => Self::CappedCone { alpha: std::f64::consts::FRAC_PI_4, cap_radius: 1.0 },
            "hyperboloid" => Self::Hyperboloid { a: 1.0, c: 1.0 },
            "helicoid" => Self::Helicoid { c: 1.0, s_halfwidth: 10.0 },
            "tangent_developable" => Self::TangentDevelopable { radius: 1.0, pitch: 0.5, length: 6.0 },
            _ => return None,
        })
    }

    /// Parameter names and values in declaration order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::Plane { extent } => vec![("extent", extent)],
            Self::Cylinder { radius } => vec![("radius", radius)],
            Self::CappedCone { alpha, cap_radius } => vec![("alpha", alpha), ("cap_radius", cap_radius)],
            Self::Hyperboloid { a, c } => vec![("a", a), ("c", c)],
            Self::Helicoid { c, s_halfwidth } => vec![("c", c), ("s_halfwidth", s_halfwidth)],
            Self::TangentDevelopable { radius, pitch, length } => {
                vec![("radius", radius), ("pitch", pitch), ("length", length)]
            }
            Self::Ruled { v_min, v_max, .. } => vec![("v_min", v_min), ("v_max", v_max)],
        }
    }
}

/// Human-readable catalog description.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub degrees: &'static str,
    pub params: Vec<(&'static str, f64, &'static str)>,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "plane",
            summary: "flat plane, Cartesian ruled chart; H = K = 0",
            degrees: "(-inf, 0)",
            params: vec![("extent", 1.0e4, "half-width of the chart square")],
        },
        CatalogEntry {
            name: "cylinder",
            summary: "circular cylinder ruled by vertical lines; two ends",
            degrees: "(0, 0)",
            params: vec![("radius", 1.0, "cylinder radius")],
        },
        CatalogEntry {
            name: "capped_cone",
            summary: "cone with a smooth cap, ruled by meridians outside the cap",
            degrees: "(2, 2)",
            params: vec![
                ("alpha", std::f64::consts::FRAC_PI_4, "half-angle between rulings and the axis"),
                ("cap_radius", 1.0, "geodesic radius of the cap (core radius)"),
            ],
        },
        CatalogEntry {
            name: "hyperboloid",
            summary: "one-sheeted hyperboloid rho^2/a^2 - z^2/c^2 = 1; two ends",
            degrees: "(2, 2)",
            params: vec![("a", 1.0, "waist radius"), ("c", 1.0, "vertical semi-axis")],
        },
        CatalogEntry {
            name: "helicoid",
            summary: "minimal helicoid (0, 0, s) + v (cos s/c, sin s/c, 0) over a bounded s-window",
            degrees: "(-inf, 2)",
            params: vec![("c", 1.0, "pitch length"), ("s_halfwidth", 10.0, "half-length of the s-window")],
        },
        CatalogEntry {
            name: "tangent_developable",
            summary: "tangent developable of a circular helix; K = 0",
            degrees: "(2, 2)",
            params: vec![
                ("radius", 1.0, "helix radius"),
                ("pitch", 0.5, "helix rise per radian"),
                ("length", 6.0, "helix arclength covered"),
            ],
        },
    ]
}

fn arc<T: Scalar>(c: impl crate::curve::Curve<T> + 'static) -> CurveRef<T> {
    Arc::new(c)
}

/// Builds the surface model for `spec`; `orientation` is `±1`.
pub fn build<T: Scalar>(spec: &SurfaceSpec, orientation: f64) -> Result<SurfaceModel<T>> {
    let o: T = lit(if orientation < 0.0 { -1.0 } else { 1.0 });
    let reach: T = lit(RULING_REACH);
    let positive = |name: &str, x: f64| -> Result<T> {
        if x > 0.0 && x.is_finite() {
            Ok(lit(x))
        } else {
            Err(Error::InvalidInput(format!("{} parameter {name} must be positive", spec.name())))
        }
    };
    let mut gauge_shift = None;
    let (chart, profile, euler) = match *spec {
        SurfaceSpec::Plane { extent } => {
            let e: T = positive("extent", extent)?;
            let chart = RuledChart::new(
                arc(Line { origin: Vec3::zero(), direction: Vec3::new(T::one(), T::zero(), T::zero()) }),
                arc(Constant(Vec3::new(T::zero(), T::one(), T::zero()))),
                SDomain::Interval { lo: -e, hi: e },
                (-e, e),
            );
            (chart, Some(RevolutionProfile::Plane), 1)
        }
        SurfaceSpec::Cylinder { radius } => {
            let r: T = positive("radius", radius)?;
            let chart = RuledChart::new(
                arc(Circle::unit_speed(r, T::zero())),
                arc(Constant(Vec3::new(T::zero(), T::zero(), T::one()))),
                SDomain::Periodic { start: T::zero(), period: T::TAU() * r },
                (-reach, reach),
            );
            (chart, Some(RevolutionProfile::Cylinder { radius: r }), 0)
        }
        SurfaceSpec::CappedCone { alpha, cap_radius } => {
            if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
                return Err(Error::InvalidInput("capped_cone alpha must lie in (0, pi/2)".into()));
            }
            let cap: T = positive("cap_radius", cap_radius)?;
            let al: T = lit(alpha);
            let profile = RevolutionProfile::CappedCone { alpha: al, cap };
            let j = profile.jet(cap);
            let rho_c = j.rho;
            let (sa, ca) = al.sin_cos();
            let delta = Formula::new("cone_ruling", move |s: T| {
                let w = rho_c.recip();
                let (sn, cs) = (s * w).sin_cos();
                Jet::new(
                    Vec3::new(sa * cs, sa * sn, ca),
                    Vec3::new(-sa * w * sn, sa * w * cs, T::zero()),
                    Vec3::new(-sa * w * w * cs, -sa * w * w * sn, T::zero()),
                )
            });
            let chart = RuledChart::new(
                arc(Circle::unit_speed(rho_c, j.z)),
                arc(delta),
                SDomain::Periodic { start: T::zero(), period: T::TAU() * rho_c },
                (T::zero(), reach),
            );
            (chart, Some(profile), 1)
        }
        SurfaceSpec::Hyperboloid { a, c } => {
            let a: T = positive("a", a)?;
            let c: T = positive("c", c)?;
            let n = a.hypot(c);
            let delta = Formula::new("hyperboloid_ruling", move |t: T| {
                let (sn, cs) = t.sin_cos();
                Jet::new(
                    Vec3::new(-a * sn / n, a * cs / n, c / n),
                    Vec3::new(-a * cs / n, -a * sn / n, T::zero()),
                    Vec3::new(a * sn / n, -a * cs / n, T::zero()),
                )
            });
            let raw = RuledChart::new(
                arc(Circle { radius: a, height: T::zero(), rate: T::one() }),
                arc(delta),
                SDomain::Interval { lo: -T::PI(), hi: T::PI() },
                (-reach, reach),
            );
            let (chart, shift) = orthonormalize_chart(&raw, GaugeOptions::default())?;
            gauge_shift = Some(shift);
            (chart, Some(RevolutionProfile::Hyperboloid { a, c }), 0)
        }
        SurfaceSpec::Helicoid { c, s_halfwidth } => {
            let c: T = positive("c", c)?;
            let h: T = positive("s_halfwidth", s_halfwidth)?;
            let delta = Formula::new("helicoid_ruling", move |s: T| {
                let w = c.recip();
                let (sn, cs) = (s * w).sin_cos();
                Jet::new(
                    Vec3::new(cs, sn, T::zero()),
                    Vec3::new(-w * sn, w * cs, T::zero()),
                    Vec3::new(-w * w * cs, -w * w * sn, T::zero()),
                )
            });
            let chart = RuledChart::new(
                arc(Line { origin: Vec3::zero(), direction: Vec3::new(T::zero(), T::zero(), T::one()) }),
                arc(delta),
                SDomain::Interval { lo: -h, hi: h },
                (-reach, reach),
            );
            (chart, None, 1)
        }
        SurfaceSpec::TangentDevelopable { radius, pitch, length } => {
            let r: T = positive("radius", radius)?;
            let p: T = positive("pitch", pitch)?;
            let len: T = positive("length", length)?;
            let helix = Helix { radius: r, pitch: p };
            let hc = helix.clone();
            let tangent = Formula::new("helix_tangent", move |s: T| {
                let j = hc.jet(s);
                let w = hc.speed().recip();
                let (sn, cs) = (s * w).sin_cos();
                let d3 = Vec3::new(r * w * w * w * sn, -r * w * w * w * cs, T::zero());
                Jet::new(j.d1, j.d2, d3)
            });
            let raw = RuledChart::new(
                arc(helix),
                arc(tangent),
                SDomain::Interval { lo: T::zero(), hi: len },
                (lit(0.5), reach),
            );
            let opts = GaugeOptions { reference: T::zero(), offset: len + T::one(), cells: 256 };
            let (chart, shift) = orthonormalize_chart(&raw, opts)?;
            gauge_shift = Some(shift);
            (chart, None, 1)
        }
        SurfaceSpec::Ruled { ref beta_csv, ref delta_csv, v_min, v_max, euler_characteristic, fd_step } => {
            let beta = CubicSpline::<T>::from_csv(beta_csv)?;
            let delta = CubicSpline::<T>::from_csv(delta_csv)?;
            let (lo, hi) = beta.domain();
            let (dlo, dhi) = delta.domain();
            if dlo > lo || dhi < hi {
                return Err(Error::InvalidInput("ruling samples must cover the directrix samples".into()));
            }
            if !(v_min < v_max) {
                return Err(Error::InvalidInput("ruled surface needs v_min < v_max".into()));
            }
            let (beta, delta): (CurveRef<T>, CurveRef<T>) = match fd_step {
                Some(h) => {
                    let h: T = positive("fd_step", h)?;
                    (
                        arc(CentralDifference { inner: arc(beta), step: h }),
                        arc(CentralDifference { inner: arc(delta), step: h }),
                    )
                }
                None => (arc(beta), arc(delta)),
            };
            let raw = RuledChart::new(beta, delta, SDomain::Interval { lo, hi }, (lit(v_min), lit(v_max)));
            let opts = GaugeOptions { reference: lo, offset: T::zero(), cells: 256 };
            let (chart, shift) = orthonormalize_chart(&raw, opts)?;
            gauge_shift = Some(shift);
            (chart, None, euler_characteristic)
        }
    };
    let core_radius = profile.map_or(T::zero(), |p| p.core_radius());
    Ok(SurfaceModel {
        spec: spec.clone(),
        chart: chart.with_orientation(o),
        profile,
        core_radius,
        euler_characteristic: euler,
        basepoint: Vec3::zero(),
        gauge_shift,
    })
}
