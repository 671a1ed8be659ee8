//! Product cut-off `j(s, v) = j₁(s) j₂(v)` supported on a ruled window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SurfaceModel;
use crate::scalar::{lit, Scalar};

/// Radii and window of one member of the test-function family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TestFunctionParams<T> {
    pub r1: T,
    pub r2: T,
    pub r3: T,
    pub r4: T,
    /// Centre and half-width of the s-window; `None` spans a whole period with `j₁ ≡ 1`.
    pub s_window: Option<(T, T)>,
    pub v0: T,
    pub t0: T,
    pub alpha: T,
    pub epsilon: T,
}

/// Piecewise linear ramp: 0 outside `[lo, hi]`, 1 on `[lo + α, hi − α]`, slope `±1/α` between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Ramp<T> {
    pub lo: T,
    pub hi: T,
    pub alpha: T,
}

impl<T: Scalar> Ramp<T> {
    pub fn value(&self, x: T) -> T {
        if x <= self.lo || x >= self.hi {
            T::zero()
        } else {
            ((x - self.lo) / self.alpha).min((self.hi - x) / self.alpha).min(T::one())
        }
    }

    pub fn derivative(&self, x: T) -> T {
        if x <= self.lo || x >= self.hi {
            T::zero()
        } else if x < self.lo + self.alpha {
            self.alpha.recip()
        } else if x > self.hi - self.alpha {
            -self.alpha.recip()
        } else {
            T::zero()
        }
    }

    /// Points where the ramp is not smooth.
    pub fn kinks(&self) -> [T; 4] {
        [self.lo, self.lo + self.alpha, self.hi - self.alpha, self.hi]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Cutoff<T> {
    pub s: Option<Ramp<T>>,
    pub v: Ramp<T>,
}

impl<T: Scalar> Cutoff<T> {
    pub fn value(&self, s: T, v: T) -> T {
        self.s.map_or(T::one(), |r| r.value(s)) * self.v.value(v)
    }

    /// `(∂_s j, ∂_v j)`.
    pub fn gradient(&self, s: T, v: T) -> (T, T) {
        let (j1, dj1) = self.s.map_or((T::one(), T::zero()), |r| (r.value(s), r.derivative(s)));
        (dj1 * self.v.value(v), j1 * self.v.derivative(v))
    }
}

/// Radius range `(min, max)` of the window image, sampled on an `ns × nv` grid.
pub fn window_radius_range<T: Scalar>(surface: &SurfaceModel<T>, p: &TestFunctionParams<T>, ns: usize, nv: usize) -> (T, T) {
    let ss: Vec<T> = match p.s_window {
        Some((c, w)) => (0..ns).map(|i| c - w + (w + w) * lit::<T>(i as f64 / (ns - 1) as f64)).collect(),
        None => surface.chart.s_domain.samples(ns),
    };
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for s in ss {
        for k in 0..nv {
            let v = p.v0 + p.t0 * lit::<T>(k as f64 / (nv - 1) as f64);
            let r = surface.radius(s, v);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

/// Builds `j` after checking the parameter invariants and that the window lies where `ψ ≡ 1`.
pub fn cutoff_j<T: Scalar>(surface: &SurfaceModel<T>, p: &TestFunctionParams<T>) -> Result<Cutoff<T>> {
    let ordered = surface.core_radius < p.r1 && p.r1 < p.r2 && p.r2 < p.r3 && p.r3 < p.r4;
    if !ordered {
        return Err(Error::InvalidInput("radii must satisfy R0 < R1 < R2 < R3 < R4".into()));
    }
    let s_width = p.s_window.map_or(T::infinity(), |(_, w)| w + w);
    if !(p.alpha > T::zero() && p.alpha + p.alpha < s_width.min(p.t0)) {
        return Err(Error::InvalidInput("cut-off margin must satisfy 0 < 2α < min(2ε_w, t0)".into()));
    }
    let (v_lo, v_hi) = surface.chart.v_range;
    if p.v0 < v_lo || p.v0 + p.t0 > v_hi {
        return Err(Error::SupportViolation("ruling window leaves the chart v-range".into()));
    }
    if let (Some((c, w)), crate::geometry::SDomain::Interval { lo, hi }) = (p.s_window, surface.chart.s_domain) {
        if c - w < lo || c + w > hi {
            return Err(Error::SupportViolation("ruling window leaves the chart s-range".into()));
        }
    }
    let (r_min, r_max) = window_radius_range(surface, p, 9, 33);
    if r_min < p.r2 || r_max > p.r3 {
        return Err(Error::SupportViolation(format!(
            "window radii [{:.4e}, {:.4e}] leave the plateau [{:.4e}, {:.4e}]",
            r_min.to_f64_lossy(),
            r_max.to_f64_lossy(),
            p.r2.to_f64_lossy(),
            p.r3.to_f64_lossy()
        )));
    }
    Ok(Cutoff {
        s: p.s_window.map(|(c, w)| Ramp { lo: c - w, hi: c + w, alpha: p.alpha }),
        v: Ramp { lo: p.v0, hi: p.v0 + p.t0, alpha: p.alpha },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_midpoint_and_slope() {
        let r = Ramp { lo: 1.0f64, hi: 9.0, alpha: 2.0 };
        assert_eq!(r.value(2.0), 0.5);
        assert_eq!(r.value(5.0), 1.0);
        assert_eq!(r.value(0.5), 0.0);
        assert_eq!(r.derivative(1.5), 0.5);
        assert_eq!(r.derivative(8.0), -0.5);
        assert!(r.value(8.5) > 0.0 && r.value(8.5) < 1.0);
    }
}
