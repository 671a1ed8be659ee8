//! Variational certificate that the bottom of the layer spectrum lies below `(π/2a)²`.
//!
//! A certificate is one explicit trial function `φ_ε = χψ + εχ₁j` with
//! `Q(φ_ε, φ_ε) < 0`, where `ψ` is a plateau built from two capacity
//! functions and `j` a cut-off on a window of rulings. The form is evaluated
//! by quadrature; no inequality constants are involved.

pub mod capacity;
pub mod cutoff;
pub mod form;

use serde::{Deserialize, Serialize};

pub use capacity::{capacity_function, parabolic_radius, plateau_psi, Capacity, Plateau};
pub use cutoff::{cutoff_j, window_radius_range, Cutoff, Ramp, TestFunctionParams};
pub use form::{direct_value, DirectValue, quadratic_form, FormErrors, FormQuadrature, QuadraticFormDecomposition};

use crate::asymptotics::{classify_degrees, largest_root, t_dominance, DegreePair};
use crate::error::{Error, Result};
use crate::geometry::{CoefficientProfile, LayerModel, SDomain, SurfaceModel, SurfaceSpec};
use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotFound,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Certificate<T> {
    pub surface: SurfaceSpec,
    pub orientation: T,
    pub thickness: T,
    pub c0: T,
    pub params: TestFunctionParams<T>,
    pub quadrature: FormQuadrature,
    pub decomposition: QuadraticFormDecomposition<T>,
    pub degrees: Option<DegreePair>,
    /// `(π/2a)²`.
    pub threshold: T,
    pub rayleigh: T,
    /// `Q(φ_ε*) / ∫ φ_ε*²`, the Rayleigh quotient minus the threshold, kept
    /// separately because it is far below the resolution of `rayleigh`.
    pub rayleigh_excess: T,
    pub margin: T,
    /// Error bound of `rayleigh`.
    pub error_bound: T,
    /// Error bound of `value_at_star`.
    pub value_error: T,
    pub verdict: Verdict,
    pub evaluations: usize,
}

/// Limits of the parameter search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Values of `log(R₂/R₁) = log(R₄/R₃)` tried in order.
    pub log_ratios: Vec<f64>,
    /// Doublings of the ruling length per radius choice.
    pub max_doublings: usize,
    pub max_evaluations: usize,
    pub quadrature: FormQuadrature,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            log_ratios: vec![2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0],
            max_doublings: 14,
            max_evaluations: 120,
            quadrature: FormQuadrature::default(),
        }
    }
}

/// Everything evaluated for one parameter choice.
#[derive(Clone, Debug)]
pub struct Candidate<T> {
    pub params: TestFunctionParams<T>,
    pub plateau: Plateau<T>,
    pub cutoff: Cutoff<T>,
    pub decomposition: QuadraticFormDecomposition<T>,
}

impl<T: Scalar> Candidate<T> {
    pub fn certified(&self) -> bool {
        let d = &self.decomposition;
        d.value_at_star + d.value_error(d.eps_star) < T::zero()
    }

    /// `φ_ε` at a point of geodesic radius `r` with chart coordinates `(s, v)`
    /// and normal offset `u`, for the layer half-thickness `a`.
    pub fn trial_function(&self, a: T, r: T, s: T, v: T, u: T) -> T {
        let k = T::PI() / (a + a);
        let chi = (k * u).cos();
        self.plateau.at_radius(r) * chi + self.params.epsilon * self.cutoff.value(s, v) * u * chi
    }
}

/// Builds `ψ` and `j` for `params` and evaluates the form.
pub fn evaluate<T: Scalar>(layer: &LayerModel<T>, params: &TestFunctionParams<T>, q: &FormQuadrature) -> Result<Candidate<T>> {
    let cutoff = cutoff_j(&layer.surface, params)?;
    let plateau = plateau_psi(&layer.surface, params.r1, params.r2, params.r3, params.r4)?;
    let mut decomposition = quadratic_form(layer, &plateau, &cutoff, q)?;
    if decomposition.q2 <= T::zero() {
        return Err(Error::QuadratureFailure("q2 must be positive for a nonzero cut-off".into()));
    }
    decomposition.eps_star = -decomposition.q1 / decomposition.q2;
    let mut params = *params;
    params.epsilon = decomposition.eps_star;
    Ok(Candidate { params, plateau, cutoff, decomposition })
}

fn window_s_samples<T: Scalar>(surface: &SurfaceModel<T>, s_window: Option<(T, T)>, n: usize) -> Vec<T> {
    match s_window {
        Some((c, w)) => (0..n).map(|i| c - w + (w + w) * lit::<T>(i as f64 / (n - 1) as f64)).collect(),
        None => surface.chart.s_domain.samples(n),
    }
}

/// Smallest ruling start past the dominance point and the roots of `P`
/// whose ruling segment starts at radius at least `r2` for every sampled `s`.
fn ruling_start<T: Scalar>(
    surface: &SurfaceModel<T>,
    coeffs: &CoefficientProfile<T>,
    s_window: Option<(T, T)>,
    r2: T,
) -> Result<T> {
    let (s_lo, s_hi) = match s_window {
        Some((c, w)) => (c - w, c + w),
        None => surface.chart.s_domain.bounds(),
    };
    let mut v = t_dominance(coeffs, (s_lo, s_hi));
    for (_, c) in coeffs.window(s_lo, s_hi) {
        if let Some(r) = largest_root(c.j, c.e, c.d) {
            v = v.max(r + lit::<T>(1e-9) * (T::one() + r.abs()));
        }
    }
    let ss = window_s_samples(surface, s_window, 17);
    let min_radius = |v: T| ss.iter().map(|&s| surface.radius(s, v)).fold(T::infinity(), T::min);
    if min_radius(v) >= r2 {
        return Ok(v);
    }
    let v_hi_limit = surface.chart.v_range.1;
    let mut lo = v;
    let mut hi = v.max(T::zero()) + r2;
    while min_radius(hi) < r2 {
        lo = hi;
        hi = hi + hi;
        if hi > v_hi_limit {
            return Err(Error::SupportViolation("no ruling segment reaches the plateau radius".into()));
        }
    }
    for _ in 0..100 {
        let mid = (lo + hi) * lit(0.5);
        if min_radius(mid) >= r2 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= lit::<T>(1e-12) * hi.abs().max(T::one()) {
            break;
        }
    }
    Ok(hi)
}

fn default_s_window<T: Scalar>(surface: &SurfaceModel<T>) -> Option<(T, T)> {
    match surface.chart.s_domain {
        SDomain::Periodic { .. } => None,
        SDomain::Interval { lo, hi } => Some(((lo + hi) * lit(0.5), (hi - lo) * lit(0.45))),
    }
}

fn certificate<T: Scalar>(layer: &LayerModel<T>, c: Candidate<T>, q: FormQuadrature, degrees: Option<DegreePair>, evaluations: usize) -> Certificate<T> {
    let d = c.decomposition;
    let eps = d.eps_star;
    let threshold = layer.threshold();
    let excess = d.rayleigh_excess(eps);
    let verdict = if c.certified() { Verdict::Certified } else { Verdict::NotFound };
    Certificate {
        surface: layer.surface.spec.clone(),
        orientation: layer.surface.orientation(),
        thickness: layer.thickness,
        c0: layer.c0,
        params: c.params,
        quadrature: q,
        decomposition: d,
        degrees,
        threshold,
        rayleigh: threshold + excess,
        rayleigh_excess: excess,
        margin: -excess,
        error_bound: d.rayleigh_error(eps),
        value_error: d.value_error(eps),
        verdict,
        evaluations,
    }
}

/// Searches the test-function family for a negative form value.
///
/// Radii grow through `budget.log_ratios`; for each choice the ruling length
/// doubles until the ratio `q1²/q2` stops growing. A flat tail yields a
/// `NotFound` certificate, since then `q1 = 0` and no member can be negative.
pub fn certify<T: Scalar>(layer: &LayerModel<T>, budget: &SearchBudget) -> Result<Certificate<T>> {
    let surface = &layer.surface;
    capacity::symmetric_profile(surface)?;
    let q = budget.quadrature;
    let coeffs = CoefficientProfile::from_chart(&surface.chart, 64);
    let s_window = default_s_window(surface);
    let (s_lo, s_hi) = s_window.map_or(surface.chart.s_domain.bounds(), |(c, w)| (c - w, c + w));
    let degrees = classify_degrees(&coeffs, (s_lo, s_hi), lit(1e-9), T::zero()).ok().map(|d| d.degrees);
    let scale = coeffs.samples.iter().map(|(_, c)| c.max_abs()).fold(T::one(), T::max);
    let flat = coeffs
        .samples
        .iter()
        .all(|(_, c)| c.d.abs().max(c.e.abs()).max(c.j.abs()) <= lit::<T>(1e-12) * scale);
    let r1 = if surface.core_radius > T::zero() { surface.core_radius * lit(1.5) } else { T::one() };
    let mut evaluations = 0;
    let mut best: Option<Candidate<T>> = None;
    for &l in &budget.log_ratios {
        let growth: T = lit::<T>(l).exp();
        let r2 = r1 * growth;
        let v0 = match ruling_start(surface, &coeffs, s_window, r2) {
            Ok(v) => v,
            Err(Error::SupportViolation(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut t0 = r2.max(T::one());
        let mut last_ratio = T::zero();
        for _ in 0..budget.max_doublings {
            if evaluations >= budget.max_evaluations || v0 + t0 > surface.chart.v_range.1 {
                break;
            }
            let mut alpha = t0 / lit(8.0);
            if let Some((_, w)) = s_window {
                alpha = alpha.min(w * lit(0.5));
            }
            let mut params = TestFunctionParams {
                r1,
                r2,
                r3: T::zero(),
                r4: T::zero(),
                s_window,
                v0,
                t0,
                alpha,
                epsilon: T::zero(),
            };
            let (_, r_max) = window_radius_range(surface, &params, 9, 33);
            params.r3 = r_max * (T::one() + lit(1e-9)) + lit(1e-9);
            params.r4 = params.r3 * growth;
            let cand = evaluate(layer, &params, &q)?;
            evaluations += 1;
            let d = &cand.decomposition;
            let ratio = d.q1 * d.q1 / d.q2;
            let done = cand.certified();
            if best.as_ref().is_none_or(|b| d.value_at_star < b.decomposition.value_at_star) {
                best = Some(cand.clone());
            }
            if done {
                return Ok(certificate(layer, cand, q, degrees, evaluations));
            }
            if ratio <= last_ratio * lit(1.005) {
                break;
            }
            last_ratio = ratio;
            t0 = t0 + t0;
        }
    }
    match best {
        Some(b) if flat => Ok(certificate(layer, b, q, degrees, evaluations)),
        _ => Err(Error::SearchExhausted(format!(
            "no negative form value within {evaluations} evaluations"
        ))),
    }
}

/// Result of re-evaluating a stored certificate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Verification<T> {
    /// `Q(φ_ε*, φ_ε*)` recomputed pointwise.
    pub value: T,
    pub stored: T,
    /// Stored quadrature bound plus the round-off bound of the recomputation.
    pub bound: T,
    pub reproduced: bool,
    pub certified: bool,
}

/// Recomputes `Q(φ_ε*, φ_ε*)` from the stored parameters in one quadrature pass.
pub fn verify<T: Scalar>(layer: &LayerModel<T>, cert: &Certificate<T>) -> Result<Verification<T>> {
    let p = &cert.params;
    let cutoff = cutoff_j(&layer.surface, p)?;
    let plateau = plateau_psi(&layer.surface, p.r1, p.r2, p.r3, p.r4)?;
    let direct = direct_value(layer, &plateau, &cutoff, &cert.quadrature, p.epsilon)?;
    let value = direct.value;
    let stored = cert.decomposition.value_at_star;
    let bound = cert.value_error + direct.roundoff;
    Ok(Verification {
        value,
        stored,
        bound,
        reproduced: (value - stored).abs() <= bound,
        certified: value + bound < T::zero(),
    })
}
