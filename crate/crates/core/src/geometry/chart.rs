use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CurveRef, Jet};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{count, lit, Scalar};
use crate::vec3::Vec3;

/// Parameter domain of the directrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum SDomain<T> {
    Interval { lo: T, hi: T },
    Periodic { start: T, period: T },
}

impl<T: Scalar> SDomain<T> {
    pub fn is_periodic(&self) -> bool {
        matches!(self, SDomain::Periodic { .. })
    }

    pub fn bounds(&self) -> (T, T) {
        match *self {
            SDomain::Interval { lo, hi } => (lo, hi),
            SDomain::Periodic { start, period } => (start, start + period),
        }
    }

    pub fn length(&self) -> T {
        let (a, b) = self.bounds();
        b - a
    }

    /// `n` sample parameters: endpoints included for intervals, one period without
    /// the duplicated endpoint for periodic domains.
    pub fn samples(&self, n: usize) -> Vec<T> {
        let (a, b) = self.bounds();
        let n = n.max(2);
        match self {
            SDomain::Interval { .. } => (0..n).map(|i| a + (b - a) * count(i) / count(n - 1)).collect(),
            SDomain::Periodic { .. } => (0..n).map(|i| a + (b - a) * count(i) / count(n)).collect(),
        }
    }
}

/// Pointwise violation of the gauge conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugeDefect<T> {
    pub speed: T,
    pub delta_norm: T,
    pub orthogonality: T,
}

impl<T: Scalar> GaugeDefect<T> {
    pub fn max(&self) -> T {
        self.speed.max(self.delta_norm).max(self.orthogonality)
    }
}

/// Ruled parametrization `x(s, v) = β(s) + v δ(s)`.
#[derive(Clone)]
pub struct RuledChart<T: Scalar> {
    pub beta: CurveRef<T>,
    pub delta: CurveRef<T>,
    pub s_domain: SDomain<T>,
    pub v_range: (T, T),
    /// `+1` keeps `N = x_s × x_v / |x_s × x_v|`, `-1` flips it.
    pub orientation: T,
}

impl<T: Scalar> fmt::Debug for RuledChart<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuledChart")
            .field("beta", &self.beta)
            .field("delta", &self.delta)
            .field("s_domain", &self.s_domain)
            .field("v_range", &self.v_range)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl<T: Scalar> RuledChart<T> {
    pub fn new(beta: CurveRef<T>, delta: CurveRef<T>, s_domain: SDomain<T>, v_range: (T, T)) -> Self {
        Self { beta, delta, s_domain, v_range, orientation: T::one() }
    }

    pub fn with_orientation(mut self, sign: T) -> Self {
        self.orientation = if sign < T::zero() { -T::one() } else { T::one() };
        self
    }

    pub fn frames(&self, s: T) -> (Jet<T>, Jet<T>) {
        (self.beta.jet(s), self.delta.jet(s))
    }

    pub fn point(&self, s: T, v: T) -> Vec3<T> {
        self.beta.value(s) + self.delta.value(s) * v
    }

    pub fn gauge_defect(&self, s: T) -> GaugeDefect<T> {
        let (b, d) = self.frames(s);
        GaugeDefect {
            speed: (b.d1.norm() - T::one()).abs(),
            delta_norm: (d.value.norm() - T::one()).abs(),
            orthogonality: b.d1.dot(d.value).abs(),
        }
    }

    /// Largest gauge defect over `n` samples of the s-domain.
    pub fn max_gauge_defect(&self, n: usize) -> T {
        self.s_domain
            .samples(n)
            .into_iter()
            .map(|s| self.gauge_defect(s).max())
            .fold(T::zero(), T::max)
    }

    pub fn check_gauge(&self, n: usize, tol: T) -> Result<()> {
        let worst = self.max_gauge_defect(n);
        if worst <= tol {
            Ok(())
        } else {
            Err(Error::DegenerateChart(format!(
                "gauge defect {:.3e} exceeds tolerance {:.1e}",
                worst.to_f64_lossy(),
                tol.to_f64_lossy()
            )))
        }
    }

    /// `Q(s, v) = |x_s|²` in gauge.
    pub fn q(&self, s: T, v: T) -> T {
        let (b, d) = self.frames(s);
        (b.d1 + d.d1 * v).norm_sq()
    }

    /// Smallest `Q` over an `ns × nv` sample grid of the domain.
    pub fn min_q(&self, ns: usize, nv: usize) -> T {
        let (v0, v1) = self.v_range;
        let vs: Vec<T> = (0..nv.max(2)).map(|i| v0 + (v1 - v0) * count(i) / count(nv.max(2) - 1)).collect();
        let mut m = T::infinity();
        for s in self.s_domain.samples(ns) {
            for &v in &vs {
                m = m.min(self.q(s, v));
            }
        }
        m
    }
}

/// Directrix shift produced by [`orthonormalize_chart`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GaugeShift<T> {
    /// Largest `|t(σ) - t₀|` over the domain.
    pub max_shift: T,
    /// Raw arclength of the directrix over the domain.
    pub raw_length: T,
    /// Arclength of the shifted directrix (the new s-domain length).
    pub new_length: T,
    pub offset: T,
}

/// Options for [`orthonormalize_chart`].
#[derive(Clone, Copy, Debug)]
pub struct GaugeOptions<T> {
    /// Raw parameter at which the shift equals `offset`.
    pub reference: T,
    pub offset: T,
    pub cells: usize,
}

impl<T: Scalar> Default for GaugeOptions<T> {
    fn default() -> Self {
        Self { reference: T::zero(), offset: T::zero(), cells: 256 }
    }
}

#[derive(Debug)]
struct GaugeMap<T: Scalar> {
    beta: CurveRef<T>,
    delta: CurveRef<T>,
    rule: GaussLegendre<T>,
    /// raw parameters of the table cells
    sigma: Vec<T>,
    /// shift t at the cell breaks
    shift: Vec<T>,
    /// new arclength at the cell breaks
    arc: Vec<T>,
}

struct RawFrame<T> {
    beta: Jet<T>,
    unit: Jet<T>,
}

impl<T: Scalar> GaugeMap<T> {
    fn raw(&self, sigma: T) -> RawFrame<T> {
        let b = self.beta.jet(sigma);
        let d = self.delta.jet(sigma);
        let n = d.value.norm();
        let inv = n.recip();
        let u = d.value * inv;
        let n1 = d.value.dot(d.d1) * inv;
        let u1 = (d.d1 - u * n1) * inv;
        let n2 = (d.d1.norm_sq() + d.value.dot(d.d2) - n1 * n1) * inv;
        let u2 = (d.d2 - u1 * (lit::<T>(2.0) * n1) - u * n2) * inv;
        RawFrame { beta: b, unit: Jet::new(u, u1, u2) }
    }

    fn drift(&self, sigma: T) -> T {
        let f = self.raw(sigma);
        f.beta.d1.dot(f.unit.value)
    }

    fn cell(&self, sigma: T) -> usize {
        let k = self.sigma.partition_point(|&x| x <= sigma);
        k.clamp(1, self.sigma.len() - 1) - 1
    }

    fn shift_at(&self, sigma: T) -> T {
        let i = self.cell(sigma);
        self.shift[i] - self.rule.integrate(self.sigma[i], sigma, |x| self.drift(x))
    }

    /// Shifted directrix `γ = β + t δ̂` and its derivatives in σ.
    fn gamma(&self, sigma: T, t: T) -> (Jet<T>, Jet<T>) {
        let f = self.raw(sigma);
        let (b, u) = (f.beta, f.unit);
        let t1 = -b.d1.dot(u.value);
        let t2 = -(b.d2.dot(u.value) + b.d1.dot(u.d1));
        let two: T = lit(2.0);
        let g = Jet::new(
            b.value + u.value * t,
            b.d1 + u.value * t1 + u.d1 * t,
            b.d2 + u.value * t2 + u.d1 * (two * t1) + u.d2 * t,
        );
        (g, u)
    }

    fn speed(&self, sigma: T, t: T) -> T {
        self.gamma(sigma, t).0.d1.norm()
    }

    fn arc_at(&self, sigma: T) -> T {
        let i = self.cell(sigma);
        self.arc[i] + self.rule.integrate(self.sigma[i], sigma, |x| self.speed(x, self.shift_at(x)))
    }

    fn sigma_of(&self, s: T) -> T {
        let k = self.arc.partition_point(|&x| x <= s).clamp(1, self.arc.len() - 1) - 1;
        let (a0, a1) = (self.arc[k], self.arc[k + 1]);
        let (s0, s1) = (self.sigma[k], self.sigma[k + 1]);
        let mut sigma = s0 + (s1 - s0) * (s - a0) / (a1 - a0);
        let tol = lit::<T>(4.0) * T::epsilon() * (T::one() + s.abs());
        for _ in 0..30 {
            let step = (self.arc_at(sigma) - s) / self.speed(sigma, self.shift_at(sigma));
            sigma -= step;
            if step.abs() <= tol * (T::one() + sigma.abs()) {
                break;
            }
        }
        sigma
    }

    /// New directrix and unit ruling jets at new arclength `s`.
    fn frames(&self, s: T) -> (Jet<T>, Jet<T>) {
        let sigma = self.sigma_of(s);
        let t = self.shift_at(sigma);
        let (g, u) = self.gamma(sigma, t);
        let w = g.d1.norm();
        let w1 = g.d1.dot(g.d2) / w;
        let w3 = w * w * w;
        let beta = Jet::new(g.value, g.d1 * w.recip(), (g.d2 * w - g.d1 * w1) * w3.recip());
        let delta = Jet::new(u.value, u.d1 * w.recip(), (u.d2 * w - u.d1 * w1) * w3.recip());
        (beta, delta)
    }
}

#[derive(Debug)]
struct GaugedCurve<T: Scalar> {
    map: Arc<GaugeMap<T>>,
    ruling: bool,
}

impl<T: Scalar> Curve<T> for GaugedCurve<T> {
    fn jet(&self, s: T) -> Jet<T> {
        let (b, d) = self.map.frames(s);
        if self.ruling {
            d
        } else {
            b
        }
    }
}

/// Brings a raw ruled parametrization into gauge.
///
/// The ruling field is normalized, the directrix is moved along the rulings by
/// `t(σ) = t₀ − ∫_{σ_ref}^{σ} ⟨β′, δ̂⟩`, and the result is reparametrized by
/// arclength (new `s = 0` at `σ_ref`). A periodic domain stays periodic only
/// when the shift closes up over one period; otherwise the period is returned
/// as an interval. The new `v`-range is the raw range shifted by the extreme
/// values of `t`, so every new chart point lies on the raw surface.
pub fn orthonormalize_chart<T: Scalar>(
    raw: &RuledChart<T>,
    opts: GaugeOptions<T>,
) -> Result<(RuledChart<T>, GaugeShift<T>)> {
    let (lo, hi) = raw.s_domain.bounds();
    if !(lo < hi) {
        return Err(Error::DegenerateChart("empty s-domain".into()));
    }
    let cells = opts.cells.max(4);
    let probe = cells * 4;
    for i in 0..=probe {
        let s = lo + (hi - lo) * count(i) / count(probe);
        let n = raw.delta.value(s).norm();
        if !(n > lit::<T>(1e3) * T::epsilon()) || !n.is_finite() {
            return Err(Error::DegenerateChart(format!(
                "ruling field vanishes near s = {:.6}",
                s.to_f64_lossy()
            )));
        }
    }
    let reference = opts.reference.max(lo).min(hi);
    let mut map = GaugeMap {
        beta: raw.beta.clone(),
        delta: raw.delta.clone(),
        rule: GaussLegendre::new(12),
        sigma: (0..=cells).map(|i| lo + (hi - lo) * count(i) / count(cells)).collect(),
        shift: vec![T::zero(); cells + 1],
        arc: vec![T::zero(); cells + 1],
    };
    // cumulative drift integral from lo, then re-anchor at the reference parameter
    let mut drift = vec![T::zero(); cells + 1];
    for i in 0..cells {
        let (a, b) = (map.sigma[i], map.sigma[i + 1]);
        drift[i + 1] = drift[i] + map.rule.integrate(a, b, |x| map.drift(x));
    }
    let k = map.cell(reference);
    let drift_ref = drift[k] + map.rule.integrate(map.sigma[k], reference, |x| map.drift(x));
    for i in 0..=cells {
        map.shift[i] = opts.offset - (drift[i] - drift_ref);
    }
    let mut raw_length = T::zero();
    let mut min_speed = T::infinity();
    for i in 0..cells {
        let (a, b) = (map.sigma[i], map.sigma[i + 1]);
        let mut seg = T::zero();
        for (x, w) in map.rule.mapped(a, b) {
            let t = map.shift_at(x);
            let sp = map.speed(x, t);
            min_speed = min_speed.min(sp);
            seg += w * sp;
        }
        map.arc[i + 1] = map.arc[i] + seg;
        raw_length += map.rule.integrate(a, b, |x| raw.beta.jet(x).d1.norm());
    }
    if !(min_speed > lit::<T>(1e3) * T::epsilon()) {
        return Err(Error::DegenerateChart("shifted directrix is singular (zero speed)".into()));
    }
    let arc_ref = {
        let k = map.cell(reference);
        map.arc[k] + map.rule.integrate(map.sigma[k], reference, |x| map.speed(x, map.shift_at(x)))
    };
    for a in map.arc.iter_mut() {
        *a -= arc_ref;
    }
    let t_min = map.shift.iter().copied().fold(T::infinity(), T::min);
    let t_max = map.shift.iter().copied().fold(T::neg_infinity(), T::max);
    let (v_lo, v_hi) = raw.v_range;
    if t_min < v_lo || t_max > v_hi {
        return Err(Error::DegenerateChart(format!(
            "shifted directrix leaves the surface: shift range [{:.4}, {:.4}] outside v-range [{:.4}, {:.4}]",
            t_min.to_f64_lossy(),
            t_max.to_f64_lossy(),
            v_lo.to_f64_lossy(),
            v_hi.to_f64_lossy()
        )));
    }
    let new_length = map.arc[cells] - map.arc[0];
    let closes = (map.shift[cells] - map.shift[0]).abs() <= lit::<T>(1e-10) * (T::one() + new_length);
    let s_domain = match raw.s_domain {
        SDomain::Periodic { .. } if closes => SDomain::Periodic { start: map.arc[0], period: new_length },
        _ => SDomain::Interval { lo: map.arc[0], hi: map.arc[cells] },
    };
    let max_shift = map.shift.iter().map(|&t| (t - opts.offset).abs()).fold(T::zero(), T::max);
    let map = Arc::new(map);
    let chart = RuledChart {
        beta: Arc::new(GaugedCurve { map: map.clone(), ruling: false }),
        delta: Arc::new(GaugedCurve { map, ruling: true }),
        s_domain,
        v_range: (v_lo - t_min, v_hi - t_max),
        orientation: raw.orientation,
    };
    Ok((chart, GaugeShift { max_shift, raw_length, new_length, offset: opts.offset }))
}
