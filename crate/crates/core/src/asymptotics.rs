//! Degrees of `P` and `Q` along rulings and the growth of sector integrals of `H` and `H²`.

use std::cell::RefCell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CoefficientProfile, Coefficients};
use crate::quadrature::{adaptive, Estimate};
use crate::scalar::{count, lit, Scalar};

/// Polynomial degree in `v`; `NegInf` marks the zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Degree {
    #[serde(rename = "-inf")]
    NegInf,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Degree {
    pub fn as_i32(self) -> Option<i32> {
        match self {
            Degree::NegInf => None,
            Degree::Zero => Some(0),
            Degree::One => Some(1),
            Degree::Two => Some(2),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_i32() {
            Some(d) => write!(f, "{d}"),
            None => write!(f, "-inf"),
        }
    }
}

/// `(deg P, deg Q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreePair {
    pub p: Degree,
    pub q: Degree,
}

impl DegreePair {
    pub fn p_below_q(&self) -> bool {
        self.p < self.q
    }

    /// Growth of `∬ P/Q` in the ruling length predicted from the degrees:
    /// `None` for sublinear growth, otherwise the polynomial degree.
    pub fn predicted_growth(&self) -> Option<u32> {
        match (self.p.as_i32(), self.q.as_i32()) {
            (Some(p), Some(q)) if p >= q => Some((1 + p - q) as u32),
            _ => None,
        }
    }
}

impl fmt::Display for DegreePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// Degree pair per sample plus stability over the window.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DegreeProfile<T> {
    pub samples: Vec<(T, DegreePair)>,
    pub stable: bool,
    /// Common degree pair on the stable (sub-)window.
    pub degrees: DegreePair,
    /// Window on which `degrees` holds.
    pub window: (T, T),
    pub tau_deg: T,
    pub scale: T,
}

fn degrees_of<T: Scalar>(c: &Coefficients<T>, zero: T) -> DegreePair {
    let nz = |x: T| x.abs() > zero;
    let p = if nz(c.j) {
        Degree::Two
    } else if nz(c.e) {
        Degree::One
    } else if nz(c.d) {
        Degree::Zero
    } else {
        Degree::NegInf
    };
    // under gauge |A| ≤ 2√B, so Q is either constant or quadratic
    let q = if nz(c.b) { Degree::Two } else { Degree::Zero };
    DegreePair { p, q }
}

/// Classifies the degrees of `P` and `Q` on the samples of `s_window`.
///
/// A coefficient counts as zero when `|c| ≤ τ_deg · max(1, max |A..J|)`. When
/// the degrees vary, the longest run of constant degrees of width at least
/// `w_min` is returned with `stable = false`.
pub fn classify_degrees<T: Scalar>(
    profile: &CoefficientProfile<T>,
    s_window: (T, T),
    tau_deg: T,
    w_min: T,
) -> Result<DegreeProfile<T>> {
    let samples: Vec<_> = profile.window(s_window.0, s_window.1).copied().collect();
    if samples.is_empty() {
        return Err(Error::InvalidInput("no coefficient samples inside the s-window".into()));
    }
    let scale = samples.iter().map(|(_, c)| c.max_abs()).fold(T::one(), T::max);
    let zero = tau_deg * scale;
    let degs: Vec<(T, DegreePair)> = samples.iter().map(|(s, c)| (*s, degrees_of(c, zero))).collect();
    let first = degs[0].1;
    if degs.iter().all(|(_, d)| *d == first) {
        return Ok(DegreeProfile {
            samples: degs,
            stable: true,
            degrees: first,
            window: s_window,
            tau_deg,
            scale,
        });
    }
    let mut best: Option<(usize, usize)> = None;
    let mut start = 0;
    for i in 1..=degs.len() {
        if i == degs.len() || degs[i].1 != degs[start].1 {
            let width = degs[i - 1].0 - degs[start].0;
            let better = best.is_none_or(|(a, b)| width > degs[b].0 - degs[a].0);
            if better {
                best = Some((start, i - 1));
            }
            start = i;
        }
    }
    match best {
        Some((a, b)) if degs[b].0 - degs[a].0 >= w_min => Ok(DegreeProfile {
            degrees: degs[a].1,
            window: (degs[a].0, degs[b].0),
            samples: degs,
            stable: false,
            tau_deg,
            scale,
        }),
        _ => Err(Error::UnstableWindow(format!(
            "degrees vary across [{:.4}, {:.4}] and no stable sub-window of width {:.4} exists",
            s_window.0.to_f64_lossy(),
            s_window.1.to_f64_lossy(),
            w_min.to_f64_lossy()
        ))),
    }
}

/// Smallest `t ≥ v_min` with `Q(s, v) ≥ ½ max(1, B v²)` for all `v ≥ t` and all window samples.
pub fn t_dominance<T: Scalar>(profile: &CoefficientProfile<T>, s_window: (T, T)) -> T {
    let half: T = lit(0.5);
    let mut t = profile.v_range.0.max(T::zero());
    for (_, c) in profile.window(s_window.0, s_window.1) {
        // Q − ½ ≥ 0 and Q − ½Bv² ≥ 0 as quadratics in v; take their largest roots
        for (a2, a1, a0) in [(c.b, c.a, half), (c.b * half, c.a, T::one())] {
            if let Some(r) = largest_root(a2, a1, a0) {
                t = t.max(r);
            }
        }
    }
    t
}

pub(crate) fn largest_root<T: Scalar>(a2: T, a1: T, a0: T) -> Option<T> {
    let eps = lit::<T>(1e-14);
    if a2.abs() <= eps {
        if a1.abs() <= eps {
            return None;
        }
        return Some(-a0 / a1);
    }
    let disc = a1 * a1 - lit::<T>(4.0) * a2 * a0;
    if disc < T::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let two: T = lit(2.0);
    Some(((-a1 + sq) / (two * a2)).max((-a1 - sq) / (two * a2)))
}

/// Quadrature settings for sector integrals.
#[derive(Clone, Copy, Debug)]
pub struct SectorQuadrature<T> {
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for SectorQuadrature<T> {
    fn default() -> Self {
        Self { rel_tol: lit(1e-10), max_intervals: 2000 }
    }
}

/// `∬ f(c(s), v) dv ds` over `s_window × [v0, v1]` with nested adaptive rules.
pub fn sector_integral<T: Scalar, F>(
    profile: &CoefficientProfile<T>,
    s_window: (T, T),
    v0: T,
    v1: T,
    q: SectorQuadrature<T>,
    f: F,
) -> Result<Estimate<T>>
where
    F: Fn(&Coefficients<T>, T) -> T,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_err = RefCell::new(T::zero());
    let inner_rel = q.rel_tol * lit(0.1);
    let outer = adaptive(
        |s| {
            let c = profile.at(s);
            match adaptive(|v| f(&c, v), v0, v1, inner_rel, T::zero(), q.max_intervals) {
                Ok(e) => {
                    let mut acc = inner_err.borrow_mut();
                    *acc = acc.max(e.error);
                    e.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    T::zero()
                }
            }
        },
        s_window.0,
        s_window.1,
        q.rel_tol,
        T::zero(),
        q.max_intervals,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut est = outer?;
    est.error += inner_err.into_inner() * (s_window.1 - s_window.0);
    Ok(est)
}

/// `∬ H √Q dv ds = ∬ P/Q dv ds` over `s_window × [t, t + t0]`.
pub fn sector_integral_h<T: Scalar>(
    profile: &CoefficientProfile<T>,
    s_window: (T, T),
    t: T,
    t0: T,
    q: SectorQuadrature<T>,
) -> Result<Estimate<T>> {
    sector_integral(profile, s_window, t, t + t0, q, |c, v| c.p(v) / c.q(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "degree", rename_all = "snake_case")]
pub enum Growth {
    Sublinear,
    Polynomial(u32),
}

impl fmt::Display for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Growth::Sublinear => write!(f, "sublinear"),
            Growth::Polynomial(n) => write!(f, "polynomial degree {n}"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GrowthVerdict<T> {
    pub classification: Growth,
    pub exponent: T,
    pub residual: T,
    pub predicted: Growth,
    pub consistent: bool,
    pub t: T,
    /// `(t0, ∬ P/Q)` over the whole grid.
    pub samples: Vec<(T, T)>,
}

/// Fit settings for [`growth_classification`].
#[derive(Clone, Copy, Debug)]
pub struct GrowthOptions<T> {
    pub fit_tol: T,
    pub band: T,
    pub sublinear_max: T,
    /// Number of doublings in the `t0` grid `{1, 2, …, 2^k} · t`.
    pub doublings: usize,
    /// Grid points (from the top) entering the log-log fit.
    pub fit_points: usize,
}

impl<T: Scalar> Default for GrowthOptions<T> {
    fn default() -> Self {
        Self { fit_tol: lit(0.05), band: lit(0.25), sublinear_max: lit(0.5), doublings: 7, fit_points: 4 }
    }
}

/// Least-squares line `y = a + b x`; returns `(a, b, rms residual)`.
pub fn linear_fit<T: Scalar>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n: T = count(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let b = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let a = my - b * mx;
    let rss: T = xs.iter().zip(ys).map(|(&x, &y)| (y - a - b * x).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

/// Classifies the growth of `t0 ↦ ∬ P/Q` over `s_window × [t, t + t0]`.
///
/// Values are computed on the whole geometric grid; the log-log fit uses the
/// top `fit_points` entries, where the leading asymptotics dominate.
pub fn growth_classification<T: Scalar>(
    profile: &CoefficientProfile<T>,
    degrees: &DegreeProfile<T>,
    t: T,
    opts: GrowthOptions<T>,
    quad: SectorQuadrature<T>,
) -> Result<GrowthVerdict<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidInput("growth fit needs t > 0".into()));
    }
    let window = degrees.window;
    let mut samples = Vec::with_capacity(opts.doublings + 1);
    for k in 0..=opts.doublings {
        let t0 = t * lit::<T>(2.0).powi(k as i32);
        samples.push((t0, sector_integral_h(profile, window, t, t0, quad)?.value));
    }
    let predicted = match degrees.degrees.predicted_growth() {
        None => Growth::Sublinear,
        Some(n) => Growth::Polynomial(n),
    };
    let top = &samples[samples.len().saturating_sub(opts.fit_points.max(2))..];
    let area = (window.1 - window.0) * samples[samples.len() - 1].0;
    let max_abs = top.iter().map(|(_, f)| f.abs()).fold(T::zero(), T::max);
    let finish = |classification: Growth, exponent: T, residual: T| GrowthVerdict {
        classification,
        exponent,
        residual,
        predicted,
        consistent: classification == predicted,
        t,
        samples: samples.clone(),
    };
    if max_abs <= lit::<T>(1e-12) * area * degrees.scale {
        return Ok(finish(Growth::Sublinear, T::zero(), T::zero()));
    }
    if top.iter().any(|(_, f)| f.abs() <= T::zero()) {
        return Err(Error::InconclusiveFit("sector integral vanishes on part of the fit range".into()));
    }
    let xs: Vec<T> = top.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<T> = top.iter().map(|(_, f)| f.abs().ln()).collect();
    let (_, exponent, residual) = linear_fit(&xs, &ys);
    if residual > opts.fit_tol {
        return Err(Error::InconclusiveFit(format!(
            "log-log residual {:.3e} exceeds {:.3e}",
            residual.to_f64_lossy(),
            opts.fit_tol.to_f64_lossy()
        )));
    }
    let classification = if exponent <= opts.sublinear_max {
        Growth::Sublinear
    } else if (exponent - T::one()).abs() <= opts.band {
        Growth::Polynomial(1)
    } else if (exponent - lit(2.0)).abs() <= opts.band {
        Growth::Polynomial(2)
    } else {
        return Err(Error::InconclusiveFit(format!(
            "fitted exponent {:.3} is outside every classification band",
            exponent.to_f64_lossy()
        )));
    };
    Ok(finish(classification, exponent, residual))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum DivergenceRate<T> {
    /// Truncations grow like `slope · log V`.
    Log { slope: T },
    /// Truncations grow like `V^exponent`.
    Power { exponent: T },
}

/// Convergence verdict for truncated integrals over a geometric `V` grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TailVerdict<T> {
    pub convergent: bool,
    /// `(V, ∫ up to V)`.
    pub truncations: Vec<(T, T)>,
    /// Remaining tail bound when convergent.
    pub tail_estimate: T,
    pub rate: Option<DivergenceRate<T>>,
}

/// Tail test settings.
#[derive(Clone, Copy, Debug)]
pub struct TailOptions<T> {
    /// Largest increment ratio accepted as geometric decay.
    pub decay_ratio: T,
    /// Smallest increment ratio read as divergence.
    pub divergence_ratio: T,
    /// Relative size of the extrapolated tail required for convergence.
    pub tau_tail: T,
    /// Increments inspected at the top of the grid.
    pub window: usize,
}

impl<T: Scalar> Default for TailOptions<T> {
    fn default() -> Self {
        Self { decay_ratio: lit(0.75), divergence_ratio: lit(0.9), tau_tail: lit(1e-3), window: 4 }
    }
}

/// Cauchy test on truncations `(V_k, I_k)` taken on a geometric grid.
pub fn tail_verdict<T: Scalar>(truncations: Vec<(T, T)>, opts: TailOptions<T>) -> Result<TailVerdict<T>> {
    let n = truncations.len();
    if n < opts.window + 2 {
        return Err(Error::InvalidInput("tail test needs more truncation radii".into()));
    }
    let incr: Vec<T> = truncations.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let total = truncations[n - 1].1;
    let scale = truncations.iter().map(|(_, x)| x.abs()).fold(T::zero(), T::max);
    let tiny = lit::<T>(1e-14) * scale.max(T::min_positive_value());
    let last = &incr[incr.len() - opts.window..];
    if last.iter().all(|d| d.abs() <= tiny) {
        return Ok(TailVerdict { convergent: true, truncations, tail_estimate: tiny, rate: None });
    }
    let ratios: Vec<T> = last
        .windows(2)
        .map(|w| if w[0].abs() > tiny { (w[1] / w[0]).abs() } else { T::infinity() })
        .collect();
    if ratios.iter().all(|&r| r <= opts.decay_ratio) {
        let r = ratios[ratios.len() - 1];
        let tail = last[last.len() - 1].abs() * r / (T::one() - r);
        if tail <= opts.tau_tail * total.abs().max(tiny) {
            return Ok(TailVerdict { convergent: true, truncations, tail_estimate: tail, rate: None });
        }
    }
    let same_sign = last.iter().all(|&d| d > T::zero()) || last.iter().all(|&d| d < T::zero());
    if same_sign && ratios.iter().all(|&r| r >= opts.divergence_ratio) {
        let q = (truncations[n - 1].0 / truncations[n - 2].0).ln();
        let xs: Vec<T> = truncations[n - opts.window - 1..].iter().map(|(v, _)| v.ln()).collect();
        let r_mean = ratios.iter().copied().sum::<T>() / count(ratios.len());
        let rate = if (r_mean - T::one()).abs() <= lit(0.1) {
            let ys: Vec<T> = truncations[n - opts.window - 1..].iter().map(|(_, x)| *x).collect();
            let (_, slope, _) = linear_fit(&xs, &ys);
            DivergenceRate::Log { slope }
        } else {
            DivergenceRate::Power { exponent: r_mean.ln() / q }
        };
        return Ok(TailVerdict { convergent: false, truncations, tail_estimate: T::infinity(), rate: Some(rate) });
    }
    Err(Error::InconclusiveFit(format!(
        "increment ratios {:?} neither decay nor stay bounded away from zero",
        ratios.iter().map(|r| r.to_f64_lossy()).collect::<Vec<_>>()
    )))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct H2Verdict<T> {
    pub tail: TailVerdict<T>,
    pub predicted_convergent: bool,
    pub consistent: bool,
}

/// Truncations of `∬ P²/Q^{5/2} dv ds` at each `V` of an ascending grid, from `V_grid[0]`.
pub fn h2_integrability<T: Scalar>(
    profile: &CoefficientProfile<T>,
    degrees: &DegreeProfile<T>,
    v_grid: &[T],
    opts: TailOptions<T>,
    quad: SectorQuadrature<T>,
) -> Result<H2Verdict<T>> {
    let mut truncations = vec![(v_grid[0], T::zero())];
    let mut acc = T::zero();
    for w in v_grid.windows(2) {
        acc += sector_integral(profile, degrees.window, w[0], w[1], quad, |c, v| {
            let p = c.p(v);
            let q = c.q(v);
            p * p / (q * q * q.sqrt())
        })?
        .value;
        truncations.push((w[1], acc));
    }
    let tail = tail_verdict(truncations, opts)?;
    let predicted_convergent = degrees.degrees.p_below_q();
    Ok(H2Verdict { consistent: tail.convergent == predicted_convergent, predicted_convergent, tail })
}

/// Geometric grid `{t, 2t, …, 2^k t}`.
pub fn geometric_grid<T: Scalar>(t: T, doublings: usize) -> Vec<T> {
    (0..=doublings).map(|k| t * lit::<T>(2.0).powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SDomain;

    fn synthetic(a: f64, b: f64, d: f64, e: f64, j: f64) -> CoefficientProfile<f64> {
        CoefficientProfile::constant(
            Coefficients::constant(a, b, d, e, j),
            SDomain::Interval { lo: -0.5, hi: 0.5 },
            (0.0, 1e9),
            5,
        )
    }

    #[test]
    fn degrees_from_leading_coefficients() {
        let p = synthetic(0.0, 1.0, 0.0, 1.0, 0.0);
        let d = classify_degrees(&p, (-0.5, 0.5), 1e-9, 0.1).unwrap();
        assert!(d.stable);
        assert_eq!(d.degrees, DegreePair { p: Degree::One, q: Degree::Two });
        assert_eq!(d.degrees.predicted_growth(), None);
    }

    #[test]
    fn unstable_window_without_long_run_is_rejected() {
        let prof = CoefficientProfile::from_fn(SDomain::Interval { lo: 0.0, hi: 1.0 }, (0.0, 10.0), 11, |s: f64| {
            Coefficients::constant(0.0, 0.0, if (s * 10.0).round() as i64 % 2 == 0 { 1.0 } else { 0.0 }, 0.0, 0.0)
        });
        assert!(matches!(classify_degrees(&prof, (0.0, 1.0), 1e-9, 0.5), Err(Error::UnstableWindow(_))));
        assert!(classify_degrees(&prof, (0.0, 1.0), 1e-9, 0.0).is_ok());
    }

    #[test]
    fn sector_integral_matches_log_closed_form() {
        let p = synthetic(0.0, 1.0, 0.0, 1.0, 0.0);
        let v = sector_integral_h(&p, (-0.5, 0.5), 3.0, 40.0, SectorQuadrature::default()).unwrap();
        let exact = 0.5 * ((1.0 + 43.0f64 * 43.0) / (1.0 + 9.0)).ln();
        assert!((v.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn dominance_point_respects_definition() {
        let p = synthetic(-3.0, 2.5, 0.0, 0.0, 0.0);
        let t = t_dominance(&p, (-0.5, 0.5));
        let c = p.at(0.0);
        for k in 0..100 {
            let v = t + 0.1 * k as f64;
            assert!(c.q(v) >= 0.5 * (2.5 * v * v).max(1.0) - 1e-12);
        }
        assert!(c.q(t - 0.05) < 0.5 * (2.5 * (t - 0.05f64).powi(2)).max(1.0));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (a, b, r) = linear_fit(&xs, &ys);
        assert!((a - 1.0f64).abs() < 1e-14 && (b - 2.0).abs() < 1e-14 && r < 1e-14);
    }
}
