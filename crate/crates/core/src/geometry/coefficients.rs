use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::chart::{RuledChart, SDomain};
use crate::scalar::{lit, Scalar};

/// The five ruled-chart coefficients at one directrix parameter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Coefficients<T> {
    pub a: T,
    pub b: T,
    pub d: T,
    pub e: T,
    pub j: T,
}

impl<T: Scalar> Coefficients<T> {
    pub fn constant(a: T, b: T, d: T, e: T, j: T) -> Self {
        Self { a, b, d, e, j }
    }

    /// `P = D + E v + J v²`, oriented.
    pub fn p(&self, v: T) -> T {
        self.d + v * (self.e + v * self.j)
    }

    /// `Q = 1 + A v + B v²`.
    pub fn q(&self, v: T) -> T {
        T::one() + v * (self.a + v * self.b)
    }

    pub fn mean_curvature(&self, v: T) -> T {
        let q = self.q(v);
        self.p(v) / (q * q.sqrt())
    }

    pub fn max_abs(&self) -> T {
        self.a.abs().max(self.b.abs()).max(self.d.abs()).max(self.e.abs()).max(self.j.abs())
    }

    fn scaled(self, k: T) -> Self {
        Self { d: self.d * k, e: self.e * k, j: self.j * k, ..self }
    }
}

/// Coefficients computed from the chart jets; `D, E, J` carry the orientation sign.
pub fn chart_coefficients<T: Scalar>(chart: &RuledChart<T>, s: T) -> Coefficients<T> {
    let (b, d) = chart.frames(s);
    let bd = b.d1.cross(d.value);
    let dd = d.d1.cross(d.value);
    Coefficients {
        a: lit::<T>(2.0) * b.d1.dot(d.d1),
        b: d.d1.norm_sq(),
        d: bd.dot(b.d2),
        e: dd.dot(b.d2) + bd.dot(d.d2),
        j: dd.dot(d.d2),
    }
    .scaled(chart.orientation)
}

type Evaluator<T> = Arc<dyn Fn(T) -> Coefficients<T> + Send + Sync>;

/// Coefficient samples over the s-domain plus an evaluator for arbitrary `s`.
#[derive(Clone)]
pub struct CoefficientProfile<T: Scalar> {
    pub s_domain: SDomain<T>,
    pub v_range: (T, T),
    pub samples: Vec<(T, Coefficients<T>)>,
    eval: Evaluator<T>,
}

impl<T: Scalar> fmt::Debug for CoefficientProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientProfile")
            .field("s_domain", &self.s_domain)
            .field("v_range", &self.v_range)
            .field("samples", &self.samples.len())
            .finish()
    }
}

impl<T: Scalar> CoefficientProfile<T> {
    /// Samples the chart coefficients at `n` points of its s-domain.
    pub fn from_chart(chart: &RuledChart<T>, n: usize) -> Self {
        let c = chart.clone();
        Self::from_fn(chart.s_domain, chart.v_range, n, move |s| chart_coefficients(&c, s))
    }

    pub fn from_fn(
        s_domain: SDomain<T>,
        v_range: (T, T),
        n: usize,
        f: impl Fn(T) -> Coefficients<T> + Send + Sync + 'static,
    ) -> Self {
        let samples = s_domain.samples(n).into_iter().map(|s| (s, f(s))).collect();
        Self { s_domain, v_range, samples, eval: Arc::new(f) }
    }

    /// Profile with s-independent coefficients.
    pub fn constant(c: Coefficients<T>, s_domain: SDomain<T>, v_range: (T, T), n: usize) -> Self {
        Self::from_fn(s_domain, v_range, n, move |_| c)
    }

    pub fn at(&self, s: T) -> Coefficients<T> {
        (self.eval)(s)
    }

    pub fn p(&self, s: T, v: T) -> T {
        self.at(s).p(v)
    }

    pub fn q(&self, s: T, v: T) -> T {
        self.at(s).q(v)
    }

    /// Samples restricted to `[lo, hi]`.
    pub fn window(&self, lo: T, hi: T) -> impl Iterator<Item = &(T, Coefficients<T>)> {
        self.samples.iter().filter(move |(s, _)| *s >= lo && *s <= hi)
    }
}

/// `H = P / Q^{3/2}` at `(s, v)`; the sign follows the chart orientation.
pub fn mean_curvature<T: Scalar>(profile: &CoefficientProfile<T>, s: T, v: T) -> T {
    profile.at(s).mean_curvature(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_is_one_on_the_directrix() {
        let c = Coefficients::constant(0.3f64, 2.0, 1.0, -0.4, 0.2);
        assert_eq!(c.q(0.0), 1.0);
        assert_eq!(c.p(0.0), 1.0);
        assert!((c.mean_curvature(1.0) - (1.0 - 0.4 + 0.2) / (3.3f64).powf(1.5)).abs() < 1e-15);
    }
}
