//! Quadrature rules.
//!
//! Fixed Gauss–Legendre rules are applied on composite panels whose
//! breakpoints are placed at every kink of the integrand (cut-off ramps,
//! annulus radii, the cap boundary), so each panel sees an analytic
//! integrand. Step-halving a [`Panels`] set gives the error estimates used
//! by the certifier. An adaptive Gauss–Kronrod (7/15) driver covers the
//! sector and tail integrals of the asymptotics module.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Scalar};

/// Legendre polynomial `P_n(x)` and its derivative, by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        // endpoint limit P_n'(±1) = ±^(n+1) n(n+1)/2
        let s = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, p0, dp)
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, _, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, _, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(lit).collect(),
            weights: weights.into_iter().map(lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Lobatto–Legendre points on `[-1, 1]` (endpoints included), ascending.
pub fn gauss_lobatto_points<T: Scalar>(n: usize) -> Vec<T> {
    assert!(n >= 2, "Gauss-Lobatto needs at least two points");
    let order = n - 1;
    let mut pts = vec![0.0f64; n];
    pts[0] = -1.0;
    pts[n - 1] = 1.0;
    for (i, slot) in pts.iter_mut().enumerate().take(n - 1).skip(1) {
        let mut x = -(std::f64::consts::PI * i as f64 / order as f64).cos();
        for _ in 0..100 {
            let (p, _, dp) = legendre_with_derivative(order, x);
            let of = order as f64;
            let d2p = (2.0 * x * dp - of * (of + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        *slot = x;
    }
    pts.into_iter().map(lit).collect()
}

/// Ordered breakpoints of a composite rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Panels<T> {
    pub breaks: Vec<T>,
}

impl<T: Scalar> Panels<T> {
    pub fn uniform(a: T, b: T, n: usize) -> Self {
        let n = n.max(1);
        let h = (b - a) / count(n);
        let mut breaks: Vec<T> = (0..n).map(|i| a + h * count(i)).collect();
        breaks.push(b);
        Self { breaks }
    }

    /// `n` panels uniform in `log(x + offset)`; `offset` must make `a + offset > 0`.
    pub fn graded(a: T, b: T, n: usize, offset: T) -> Self {
        let n = n.max(1);
        let la = (a + offset).ln();
        let lb = (b + offset).ln();
        let mut breaks = Vec::with_capacity(n + 1);
        breaks.push(a);
        for i in 1..n {
            let t = la + (lb - la) * count(i) / count(n);
            breaks.push(t.exp() - offset);
        }
        breaks.push(b);
        Self { breaks }
    }

    /// Concatenates segment panel sets that share endpoints.
    pub fn join(parts: impl IntoIterator<Item = Panels<T>>) -> Self {
        let mut breaks: Vec<T> = Vec::new();
        for p in parts {
            for x in p.breaks {
                if breaks.last().is_none_or(|&l| x > l) {
                    breaks.push(x);
                }
            }
        }
        Self { breaks }
    }

    /// Splits every panel into `factor` equal pieces.
    pub fn refined(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let mut breaks = Vec::with_capacity((self.breaks.len() - 1) * factor + 1);
        for w in self.breaks.windows(2) {
            let h = (w[1] - w[0]) / count(factor);
            for k in 0..factor {
                breaks.push(w[0] + h * count(k));
            }
        }
        if let Some(&last) = self.breaks.last() {
            breaks.push(last);
        }
        Self { breaks }
    }

    pub fn len(&self) -> usize {
        self.breaks.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All composite nodes and weights.
    pub fn nodes(&self, rule: &GaussLegendre<T>) -> Vec<(T, T)> {
        let mut out = Vec::with_capacity(self.len() * rule.len());
        for w in self.breaks.windows(2) {
            out.extend(rule.mapped(w[0], w[1]));
        }
        out
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, rule: &GaussLegendre<T>, mut f: F) -> T {
        self.breaks
            .windows(2)
            .map(|w| rule.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

/// Trapezoid nodes for a periodic integrand over one period starting at `s0`.
pub fn periodic_nodes<T: Scalar>(s0: T, period: T, n: usize) -> Vec<(T, T)> {
    let h = period / count(n);
    (0..n).map(|i| (s0 + h * count(i), h)).collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let fc = f(mid);
    let mut kron = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        kron += s * lit(WGK[j]);
        if j % 2 == 1 {
            gauss += s * lit(WG[j / 2]);
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

/// Adaptive Gauss–Kronrod integration of `f` over finite `[a, b]`.
///
/// Bisects the interval with the largest local error until the summed error
/// is below `max(abs_tol, rel_tol * |value|)`. Fails once `max_intervals`
/// subintervals are in use.
pub fn adaptive<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
    max_intervals: usize,
) -> Result<Estimate<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure("adaptive rule needs a finite interval".into()));
    }
    if a == b {
        return Ok(Estimate { value: T::zero(), error: T::zero(), intervals: 0 });
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let value: T = pieces.iter().map(|p| p.2).sum();
        let error: T = pieces.iter().map(|p| p.3).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureFailure("integrand produced a non-finite value".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate { value, error, intervals: pieces.len() });
        }
        if pieces.len() >= max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "refinement budget of {max_intervals} intervals exhausted (error {:.3e})",
                error.to_f64_lossy()
            )));
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = (lo + hi) * lit(0.5);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
        // keep summation order independent of the swap above
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::<f64>::new(6);
        // exact up to degree 11
        let v = rule.integrate(-1.0, 2.0, |x| x.powi(11) - 3.0 * x.powi(4));
        let exact = (2f64.powi(12) - 1.0) / 12.0 - 3.0 * (2f64.powi(5) + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs());
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lobatto_points_are_symmetric() {
        let p: Vec<f64> = gauss_lobatto_points(5);
        assert_eq!(p.len(), 5);
        assert!((p[1] + (3.0f64 / 7.0).sqrt()).abs() < 1e-14);
        assert!(p[2].abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let est = adaptive(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10, 0.0, 500).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((est.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let err = adaptive(|x: f64| (1.0 / x.abs().max(1e-300)).sqrt().sin() * 1e3, -1.0, 1.0, 1e-14, 0.0, 4);
        assert!(matches!(err, Err(Error::QuadratureFailure(_))));
    }

    #[test]
    fn graded_panels_cover_interval() {
        let p = Panels::<f64>::graded(1.0, 1000.0, 12, 0.0);
        assert_eq!(p.len(), 12);
        assert_eq!(p.breaks[0], 1.0);
        assert_eq!(*p.breaks.last().unwrap(), 1000.0);
        let ratios: Vec<f64> = p.breaks.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.windows(2).all(|r| (r[0] - r[1]).abs() < 1e-9));
        let v = p.refined(2).integrate(&GaussLegendre::new(8), |x| 1.0 / x);
        assert!((v - 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn periodic_trapezoid_is_spectral() {
        let nodes = periodic_nodes(0.3f64, 2.0 * std::f64::consts::PI, 16);
        let v: f64 = nodes.iter().map(|&(s, w)| w * (s.cos()).exp()).sum();
        // 2π I0(1)
        assert!((v - 7.954_926_521_012_846).abs() < 1e-12);
    }
}
