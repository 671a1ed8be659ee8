//! Parametrized space curves with their first two derivatives.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::vec3::Vec3;

/// Value and first two derivatives of a curve at one parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub value: Vec3<T>,
    pub d1: Vec3<T>,
    pub d2: Vec3<T>,
}

impl<T: Scalar> Jet<T> {
    pub fn new(value: Vec3<T>, d1: Vec3<T>, d2: Vec3<T>) -> Self {
        Self { value, d1, d2 }
    }

    pub fn constant(value: Vec3<T>) -> Self {
        Self::new(value, Vec3::zero(), Vec3::zero())
    }
}

/// A C² map from a parameter interval into R³.
pub trait Curve<T: Scalar>: Send + Sync + fmt::Debug {
    fn jet(&self, s: T) -> Jet<T>;

    fn value(&self, s: T) -> Vec3<T> {
        self.jet(s).value
    }
}

pub type CurveRef<T> = Arc<dyn Curve<T>>;

/// `origin + s * direction`.
#[derive(Clone, Debug)]
pub struct Line<T> {
    pub origin: Vec3<T>,
    pub direction: Vec3<T>,
}

impl<T: Scalar> Curve<T> for Line<T> {
    fn jet(&self, s: T) -> Jet<T> {
        Jet::new(self.origin + self.direction * s, self.direction, Vec3::zero())
    }
}

/// Constant vector field.
#[derive(Clone, Debug)]
pub struct Constant<T>(pub Vec3<T>);

impl<T: Scalar> Curve<T> for Constant<T> {
    fn jet(&self, _s: T) -> Jet<T> {
        Jet::constant(self.0)
    }
}

/// Horizontal circle `(r cos ωs, r sin ωs, height)`.
#[derive(Clone, Debug)]
pub struct Circle<T> {
    pub radius: T,
    pub height: T,
    pub rate: T,
}

impl<T: Scalar> Circle<T> {
    /// Arclength-parametrized circle.
    pub fn unit_speed(radius: T, height: T) -> Self {
        Self { radius, height, rate: radius.recip() }
    }
}

impl<T: Scalar> Curve<T> for Circle<T> {
    fn jet(&self, s: T) -> Jet<T> {
        let (sn, cs) = (self.rate * s).sin_cos();
        let r = self.radius;
        let w = self.rate;
        Jet::new(
            Vec3::new(r * cs, r * sn, self.height),
            Vec3::new(-r * w * sn, r * w * cs, T::zero()),
            Vec3::new(-r * w * w * cs, -r * w * w * sn, T::zero()),
        )
    }
}

/// Arclength-parametrized circular helix `(R cos θ, R sin θ, p θ)`, `θ = s / √(R² + p²)`.
#[derive(Clone, Debug)]
pub struct Helix<T> {
    pub radius: T,
    pub pitch: T,
}

impl<T: Scalar> Helix<T> {
    pub fn speed(&self) -> T {
        self.radius.hypot(self.pitch)
    }

    pub fn curvature(&self) -> T {
        self.radius / (self.speed() * self.speed())
    }

    pub fn torsion(&self) -> T {
        self.pitch / (self.speed() * self.speed())
    }
}

impl<T: Scalar> Curve<T> for Helix<T> {
    fn jet(&self, s: T) -> Jet<T> {
        let c = self.speed();
        let w = c.recip();
        let (sn, cs) = (s * w).sin_cos();
        let r = self.radius;
        Jet::new(
            Vec3::new(r * cs, r * sn, self.pitch * s * w),
            Vec3::new(-r * w * sn, r * w * cs, self.pitch * w),
            Vec3::new(-r * w * w * cs, -r * w * w * sn, T::zero()),
        )
    }
}

/// Curve given by a closed-form jet.
#[derive(Clone)]
pub struct Formula<T> {
    name: &'static str,
    f: Arc<dyn Fn(T) -> Jet<T> + Send + Sync>,
}

impl<T: Scalar> Formula<T> {
    pub fn new(name: &'static str, f: impl Fn(T) -> Jet<T> + Send + Sync + 'static) -> Self {
        Self { name, f: Arc::new(f) }
    }
}

impl<T> fmt::Debug for Formula<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({})", self.name)
    }
}

impl<T: Scalar> Curve<T> for Formula<T> {
    fn jet(&self, s: T) -> Jet<T> {
        (self.f)(s)
    }
}

/// Replaces the derivatives of `inner` by centered differences of its values.
#[derive(Clone, Debug)]
pub struct CentralDifference<T: Scalar> {
    pub inner: CurveRef<T>,
    pub step: T,
}

impl<T: Scalar> Curve<T> for CentralDifference<T> {
    fn jet(&self, s: T) -> Jet<T> {
        central_difference_jet(self.inner.as_ref(), s, self.step)
    }
}

/// Second-order centered-difference jet from values only.
pub fn central_difference_jet<T: Scalar>(c: &dyn Curve<T>, s: T, h: T) -> Jet<T> {
    let p0 = c.value(s);
    let pp = c.value(s + h);
    let pm = c.value(s - h);
    let two: T = lit(2.0);
    Jet::new(p0, (pp - pm) * (two * h).recip(), (pp - p0 * two + pm) * (h * h).recip())
}

/// Natural cubic spline through sampled points, with exact spline derivatives.
#[derive(Clone, Debug)]
pub struct CubicSpline<T> {
    knots: Vec<T>,
    points: Vec<Vec3<T>>,
    second: Vec<Vec3<T>>,
}

impl<T: Scalar> CubicSpline<T> {
    pub fn new(knots: Vec<T>, points: Vec<Vec3<T>>) -> Result<Self> {
        let n = knots.len();
        if n < 3 || points.len() != n {
            return Err(Error::InvalidInput(
                "a spline needs at least three samples with matching coordinates".into(),
            ));
        }
        if knots.windows(2).any(|w| w[1] <= w[0] || !w[1].is_finite()) {
            return Err(Error::InvalidInput("spline parameters must be strictly increasing".into()));
        }
        // tridiagonal system for the natural spline second derivatives
        let two: T = lit(2.0);
        let six: T = lit(6.0);
        let mut diag = vec![T::one(); n];
        let mut upper = vec![T::zero(); n];
        let mut rhs = vec![Vec3::zero(); n];
        for i in 1..n - 1 {
            let h0 = knots[i] - knots[i - 1];
            let h1 = knots[i + 1] - knots[i];
            diag[i] = two * (h0 + h1);
            upper[i] = h1;
            rhs[i] = ((points[i + 1] - points[i]) * h1.recip() - (points[i] - points[i - 1]) * h0.recip()) * six;
        }
        // forward sweep; lower[i] = h_{i-1} for interior rows, zero on the boundary row
        for i in 1..n {
            let lower = if i < n - 1 { knots[i] - knots[i - 1] } else { T::zero() };
            let m = lower / diag[i - 1];
            diag[i] -= m * upper[i - 1];
            let prev = rhs[i - 1];
            rhs[i] = rhs[i] - prev * m;
        }
        let mut second = vec![Vec3::zero(); n];
        second[n - 1] = rhs[n - 1] * diag[n - 1].recip();
        for i in (0..n - 1).rev() {
            second[i] = (rhs[i] - second[i + 1] * upper[i]) * diag[i].recip();
        }
        Ok(Self { knots, points, second })
    }

    /// Reads `s,x,y,z` rows; a header row is accepted.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut knots = Vec::new();
        let mut points = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(v) if v.len() == 4 => {
                    knots.push(lit(v[0]));
                    points.push(Vec3::from_f64([v[1], v[2], v[3]]));
                }
                Err(_) if line == 0 => continue,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "{}: row {} must hold four numbers s,x,y,z",
                        path.display(),
                        line + 1
                    )))
                }
            }
        }
        Self::new(knots, points)
    }

    pub fn domain(&self) -> (T, T) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }
}

impl<T: Scalar> Curve<T> for CubicSpline<T> {
    fn jet(&self, s: T) -> Jet<T> {
        let n = self.knots.len();
        let i = match self.knots.partition_point(|&k| k <= s) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - s) / h;
        let b = (s - self.knots[i]) / h;
        let (p0, p1) = (self.points[i], self.points[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let six: T = lit(6.0);
        let three: T = lit(3.0);
        let value = p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / six);
        let d1 = (p1 - p0) * h.recip() + (m1 * (three * b * b - T::one()) - m0 * (three * a * a - T::one())) * (h / six);
        let d2 = m0 * a + m1 * b;
        Jet::new(value, d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helix_is_unit_speed() {
        let h = Helix { radius: 2.0f64, pitch: 0.5 };
        for k in 0..20 {
            let j = h.jet(0.37 * k as f64);
            assert!((j.d1.norm() - 1.0).abs() < 1e-14);
            assert!((j.d2.norm() - h.curvature()).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_derivatives_match_central_differences() {
        let c = Circle { radius: 1.5f64, height: 0.2, rate: 0.7 };
        let h = 1e-4;
        for k in 0..10 {
            let s = 0.3 * k as f64;
            let exact = c.jet(s);
            let fd = central_difference_jet(&c, s, h);
            assert!((exact.d1 - fd.d1).norm() < 1e-7);
            assert!((exact.d2 - fd.d2).norm() < 1e-6);
        }
    }

    #[test]
    fn spline_reproduces_cubic_interior_and_interpolates() {
        let knots: Vec<f64> = (0..41).map(|i| i as f64 * 0.05).collect();
        let pts: Vec<Vec3<f64>> = knots.iter().map(|&s| Vec3::new(s.sin(), s * s, 1.0 - s)).collect();
        let sp = CubicSpline::new(knots.clone(), pts.clone()).unwrap();
        for (k, p) in knots.iter().zip(&pts) {
            assert!((sp.value(*k) - *p).norm() < 1e-12);
        }
        let j = sp.jet(1.0);
        assert!((j.d1.x - 1.0f64.cos()).abs() < 1e-5);
        assert!((j.d1.y - 2.0).abs() < 1e-5);
        assert!((j.d2.y - 2.0).abs() < 1e-3);
    }
}
