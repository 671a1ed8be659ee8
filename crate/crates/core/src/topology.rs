//! Total curvature, end isoperimetric constants and the Hartman, Huber and White checks.
//!
//! Rotationally symmetric models integrate over geodesic balls through the
//! profile. Other models integrate over chart boxes `|s| ≤ R, |v| ≤ R`
//! clipped to the chart domain; the helicoid box is not clipped in `s`, so the
//! whole helicoid is seen.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{tail_verdict, TailOptions, TailVerdict};
use crate::error::{Error, Result};
use crate::geometry::{second_form_and_shape, End, RevolutionProfile, SDomain, SurfaceModel, SurfaceSpec};
use crate::quadrature::adaptive;
use crate::scalar::{lit, Scalar};

const REL: f64 = 1e-11;
const BUDGET: usize = 4000;

/// `∫ f dτ` over `[lo, hi]`, split at profile kinks and at dyadic points so
/// that each piece is smooth and of bounded relative length.
pub(crate) fn profile_integral<T: Scalar, F: Fn(T) -> T>(prof: &RevolutionProfile<T>, lo: T, hi: T, f: F) -> Result<(T, T)> {
    if hi <= lo {
        return Ok((T::zero(), T::zero()));
    }
    let mut cuts = vec![lo, hi];
    cuts.extend(prof.kinks().into_iter().filter(|&k| k > lo && k < hi));
    let mut x = T::one();
    while x < hi.abs().max(lo.abs()) {
        for c in [x, -x] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
        x *= lit(2.0);
    }
    if T::zero() > lo && T::zero() < hi {
        cuts.push(T::zero());
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (mut value, mut error) = (T::zero(), T::zero());
    for w in cuts.windows(2) {
        let e = adaptive(&f, w[0], w[1], lit(REL), lit(1e-300), BUDGET)?;
        value += e.value;
        error += e.error;
    }
    Ok((value, error))
}

/// Profile-parameter interval of `B(R) ∩ E` for one end.
fn end_interval<T: Scalar>(prof: &RevolutionProfile<T>, r: T, end: End) -> (T, T) {
    let t = prof.tau_at_radius(r, end);
    if t < T::zero() {
        (t, T::zero())
    } else {
        (T::zero(), t)
    }
}

/// `∫_{B(R)} f dΣ` on a revolution model, per end.
fn ball_integral<T: Scalar>(
    prof: &RevolutionProfile<T>,
    r: T,
    density: impl Fn(T) -> T,
) -> Result<Vec<(End, T, T)>> {
    prof.ends()
        .into_iter()
        .map(|e| {
            let (lo, hi) = end_interval(prof, r, e);
            let (v, err) = profile_integral(prof, lo, hi, |t| density(t) * prof.area_density(t))?;
            Ok((e, v, err))
        })
        .collect()
}

/// `s`-interval of the chart box of size `R`.
fn box_s_range<T: Scalar>(surface: &SurfaceModel<T>, r: T) -> (T, T) {
    match surface.chart.s_domain {
        SDomain::Periodic { start, period } => (start, start + period),
        SDomain::Interval { lo, hi } => {
            if matches!(surface.spec, SurfaceSpec::Helicoid { .. }) {
                (-r, r)
            } else {
                (lo.max(-r), hi.min(r))
            }
        }
    }
}

fn box_integral<T: Scalar>(surface: &SurfaceModel<T>, r: T, f: impl Fn(T, T) -> T) -> Result<(T, T)> {
    let (s0, s1) = box_s_range(surface, r);
    let (v0, v1) = (surface.chart.v_range.0.max(-r), surface.chart.v_range.1.min(r));
    let mut failure = None;
    let mut inner_err = T::zero();
    let outer = adaptive(
        |s| match adaptive(|v| f(s, v), v0, v1, lit(1e-10), lit(1e-300), BUDGET) {
            Ok(e) => {
                inner_err = inner_err.max(e.error);
                e.value
            }
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        s0,
        s1,
        lit(1e-9),
        lit(1e-300),
        BUDGET,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let o = outer?;
    Ok((o.value, o.error + inner_err * (s1 - s0)))
}

/// Truncated `∫ K dΣ` at each radius and its extrapolated limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TotalCurvature<T> {
    pub value: T,
    pub tail_estimate: T,
    /// `(R, ∫_{B(R)} K)`.
    pub ladder: Vec<(T, T)>,
}

/// Extrapolates a geometric-radius sequence to `R → ∞` from its last three
/// entries, assuming geometric decay of the differences.
pub fn extrapolate_tail<T: Scalar>(ladder: &[(T, T)], what: &str) -> Result<(T, T)> {
    let n = ladder.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("{what}: radius ladder needs at least three entries")));
    }
    let (a, b, c) = (ladder[n - 3].1, ladder[n - 2].1, ladder[n - 1].1);
    let scale = ladder.iter().map(|x| x.1.abs()).fold(T::one(), T::max);
    let tiny = lit::<T>(1e-10) * scale;
    let (d1, d2) = (b - a, c - b);
    if d2.abs() <= tiny {
        return Ok((c, d2.abs().max(tiny)));
    }
    let r = d2 / d1;
    if !(r.abs() < lit(0.9)) {
        return Err(Error::NonconvergentTail(format!(
            "{what}: successive truncations {:.4e}, {:.4e}, {:.4e} are not Cauchy",
            a.to_f64_lossy(),
            b.to_f64_lossy(),
            c.to_f64_lossy()
        )));
    }
    let correction = d2 * r / (T::one() - r);
    Ok((c + correction, correction.abs().max(tiny)))
}

/// `∫ K dΣ` over `B(R)` on `r_grid` (ascending, geometric), extrapolated to `R → ∞`.
pub fn total_curvature<T: Scalar>(surface: &SurfaceModel<T>, r_grid: &[T]) -> Result<TotalCurvature<T>> {
    let mut ladder = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let v = match &surface.profile {
            Some(p) => ball_integral(p, r, |t| p.gauss(t))?.iter().map(|x| x.1).sum(),
            None => {
                box_integral(surface, r, |s, v| {
                    let f = second_form_and_shape(&surface.chart, s, v);
                    f.gauss() * f.area_element()
                })?
                .0
            }
        };
        ladder.push((r, v));
    }
    let (value, tail_estimate) = extrapolate_tail(&ladder, "total curvature")?;
    Ok(TotalCurvature { value, tail_estimate, ladder })
}

/// Isoperimetric constant of one end.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EndConstant<T> {
    pub end: End,
    pub lambda: T,
    /// Coefficient `c` of the fit `Area / πr² = λ + c / r`.
    pub slope: T,
    pub fit_residual: T,
    /// `(r, Area(B(r) ∩ E) / πr²)`.
    pub ladder: Vec<(T, T)>,
}

/// `λ_i = lim Area(B(r) ∩ E_i) / πr²` from a fit in `1/r` over `r_grid`.
pub fn isoperimetric_constants<T: Scalar>(surface: &SurfaceModel<T>, r_grid: &[T]) -> Result<Vec<EndConstant<T>>> {
    let prof = surface.profile.as_ref().ok_or_else(|| {
        Error::Unsupported("end isoperimetric constants need a rotationally symmetric model".into())
    })?;
    if r_grid.len() < 3 {
        return Err(Error::InvalidInput("isoperimetric fit needs at least three radii".into()));
    }
    let mut per_end: Vec<Vec<(T, T)>> = vec![Vec::new(); prof.ends().len()];
    for &r in r_grid {
        for (i, (_, area, _)) in ball_integral(prof, r, |_| T::one())?.into_iter().enumerate() {
            per_end[i].push((r, area / (T::PI() * r * r)));
        }
    }
    let mut out = Vec::new();
    for (end, ladder) in prof.ends().into_iter().zip(per_end) {
        let fit = &ladder[ladder.len() / 2..];
        let xs: Vec<T> = fit.iter().map(|(r, _)| r.recip()).collect();
        let ys: Vec<T> = fit.iter().map(|(_, y)| *y).collect();
        let (lambda, slope, fit_residual) = crate::asymptotics::linear_fit(&xs, &ys);
        let d = ladder[ladder.len() - 1].1 - ladder[ladder.len() - 2].1;
        if fit_residual > lit::<T>(0.05) * lambda.abs().max(d.abs()).max(lit(1e-3)) {
            return Err(Error::NonconvergentTail(format!(
                "area ratio does not settle like λ + c/r on the {end:?} end"
            )));
        }
        out.push(EndConstant { end, lambda: lambda.max(T::zero()), slope, fit_residual, ladder });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HartmanCheck<T> {
    pub residual: T,
    /// Combined truncation bound in units of `χ`.
    pub bound: T,
}

/// `∫K / 2π − (χ − Σ λ_i)` with the tail bounds of both sides.
pub fn hartman_check<T: Scalar>(
    surface: &SurfaceModel<T>,
    total: &TotalCurvature<T>,
    ends: &[EndConstant<T>],
) -> HartmanCheck<T> {
    let lam: T = ends.iter().map(|e| e.lambda).sum();
    let lam_err: T = ends
        .iter()
        .map(|e| (e.slope / e.ladder[e.ladder.len() - 1].0).abs() + e.fit_residual)
        .sum();
    let chi: T = lit(surface.euler_characteristic as f64);
    HartmanCheck {
        residual: total.value / T::TAU() - chi + lam,
        bound: total.tail_estimate / T::TAU() + lam_err,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct WhiteCheck<T> {
    /// Tail test on truncations of `∫ ‖Ā‖² dΣ`.
    pub second_form_l2: TailVerdict<T>,
    /// `|∫K / 4π − round(∫K / 4π)|` when `∫ ‖Ā‖²` converges.
    pub residual: Option<T>,
}

/// Truncations of `∫ ‖Ā‖² dΣ` on `r_grid` plus the quantization residual of `total_k` when they converge.
pub fn white_check<T: Scalar>(surface: &SurfaceModel<T>, r_grid: &[T], total_k: T) -> Result<WhiteCheck<T>> {
    let mut truncations = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let v = match &surface.profile {
            Some(p) => ball_integral(p, r, |t| {
                let (m, q) = p.curvatures(t);
                m * m + q * q
            })?
            .iter()
            .map(|x| x.1)
            .sum(),
            None => {
                box_integral(surface, r, |s, v| {
                    let f = second_form_and_shape(&surface.chart, s, v);
                    f.norm_sq() * f.area_element()
                })?
                .0
            }
        };
        truncations.push((r, v));
    }
    let opts = TailOptions { window: 3.min(r_grid.len().saturating_sub(2)).max(1), ..TailOptions::default() };
    let tail = tail_verdict(truncations, opts)?;
    let residual = tail.convergent.then(|| {
        let n = total_k / (lit::<T>(2.0) * T::TAU());
        (n - n.round()).abs()
    });
    Ok(WhiteCheck { second_form_l2: tail, residual })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TopologyReport<T> {
    pub euler_characteristic: i32,
    pub total_k: TotalCurvature<T>,
    pub ends: Vec<EndConstant<T>>,
    pub hartman: Option<HartmanCheck<T>>,
    /// `2πχ − ∫K`; nonnegative up to the tail estimate when Huber's bound holds.
    pub huber_slack: T,
    pub white: WhiteCheck<T>,
}

/// Geometric radius ladder `base · 2^k` for `k = 0..n`, starting beyond the core scale.
pub fn default_radius_grid<T: Scalar>(surface: &SurfaceModel<T>, n: usize) -> Vec<T> {
    let scale = match surface.profile {
        Some(RevolutionProfile::Hyperboloid { a, c }) => a.max(c),
        Some(RevolutionProfile::Cylinder { radius }) => radius,
        _ => surface.core_radius,
    };
    let base = (lit::<T>(4.0) * scale).max(lit(4.0));
    (0..n).map(|k| base * lit::<T>(2.0).powi(k as i32)).collect()
}

/// Runs every topology check on `r_grid`.
pub fn topology_report<T: Scalar>(surface: &SurfaceModel<T>, r_grid: &[T]) -> Result<TopologyReport<T>> {
    if surface.euler_characteristic > 1 {
        return Err(Error::InvalidInput(format!(
            "a noncompact connected surface has χ ≤ 1, got {}",
            surface.euler_characteristic
        )));
    }
    let total_k = total_curvature(surface, r_grid)?;
    let (ends, hartman) = match isoperimetric_constants(surface, r_grid) {
        Ok(ends) => {
            let h = hartman_check(surface, &total_k, &ends);
            (ends, Some(h))
        }
        Err(Error::Unsupported(_)) => (Vec::new(), None),
        Err(e) => return Err(e),
    };
    let huber_slack = T::TAU() * lit(surface.euler_characteristic as f64) - total_k.value;
    let white = white_check(surface, r_grid, total_k.value)?;
    Ok(TopologyReport { euler_characteristic: surface.euler_characteristic, total_k, ends, hartman, huber_slack, white })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_recovers_geometric_limit() {
        let ladder: Vec<(f64, f64)> = (0..6).map(|k| (2f64.powi(k), 3.0 - 0.5f64.powi(k))).collect();
        let (lim, tail) = extrapolate_tail(&ladder, "test").unwrap();
        assert!((lim - 3.0).abs() < 1e-12 && tail < 0.1);
        let growing: Vec<(f64, f64)> = (0..6).map(|k| (2f64.powi(k), 2f64.powi(k))).collect();
        assert!(matches!(extrapolate_tail(&growing, "test"), Err(Error::NonconvergentTail(_))));
    }

    #[test]
    fn profile_integral_splits_at_kinks() {
        let p = RevolutionProfile::CappedCone { alpha: 0.7f64, cap: 1.0 };
        let (v, _) = profile_integral(&p, 0.0, 10.0, |t| p.gauss(t) * p.area_density(t)).unwrap();
        assert!((v - std::f64::consts::TAU * (1.0 - 0.7f64.sin())).abs() < 1e-9);
    }
}
