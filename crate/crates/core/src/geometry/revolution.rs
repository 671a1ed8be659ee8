//! Rotationally symmetric profiles `(ρ(τ), z(τ))` swept around the z-axis.
//!
//! The plane and the capped cone are parametrized by geodesic distance from
//! the pole, the cylinder and the hyperboloid by height. Principal curvatures
//! use the normal `(−z_τ, ρ_τ)/w` in the meridian plane, so the parallel
//! curvature of the cylinder and the cone is positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Scalar};
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum RevolutionProfile<T> {
    Plane,
    Cylinder { radius: T },
    /// Cone of half-angle `alpha` whose tip is replaced by a smooth cap of geodesic radius `cap`.
    CappedCone { alpha: T, cap: T },
    /// `ρ² / a² − z² / c² = 1`.
    Hyperboloid { a: T, c: T },
}

/// Profile position and derivatives in the profile parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJet<T> {
    pub rho: T,
    pub z: T,
    pub rho1: T,
    pub z1: T,
    pub rho2: T,
    pub z2: T,
}

impl<T: Scalar> ProfileJet<T> {
    pub fn speed(&self) -> T {
        self.rho1.hypot(self.z1)
    }
}

/// Which end of the profile a radius refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Upper,
    Lower,
}

fn cone_cap_parts<T: Scalar>(alpha: T, cap: T, l: T) -> (T, T, T, T, T) {
    // x = ℓ/ℓ_c, ρ′ = sα + (1 − sα)(1 − 3x² + 2x³); returns (x, ρ, ρ′, ρ″, S)
    let sa = alpha.sin();
    let one = T::one();
    let x = l / cap;
    let g = one - lit::<T>(3.0) * x * x + lit::<T>(2.0) * x * x * x;
    let rho1 = sa + (one - sa) * g;
    let rho = cap * x * (one - (one - sa) * x * x * (one - x * lit(0.5)));
    let rho2 = -lit::<T>(6.0) * (one - sa) * x * (one - x) / cap;
    let s = ((one - sa) * (lit::<T>(3.0) - lit::<T>(2.0) * x) * (one + rho1)).sqrt();
    (x, rho, rho1, rho2, s)
}

impl<T: Scalar> RevolutionProfile<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Plane => true,
            Self::Cylinder { radius } => radius > T::zero(),
            Self::CappedCone { alpha, cap } => {
                alpha > T::zero() && alpha < T::FRAC_PI_2() && cap > T::zero()
            }
            Self::Hyperboloid { a, c } => a > T::zero() && c > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid revolution profile {self:?}")))
        }
    }

    /// Profile parameter range.
    pub fn tau_domain(&self) -> (T, T) {
        match self {
            Self::Plane | Self::CappedCone { .. } => (T::zero(), T::infinity()),
            _ => (T::neg_infinity(), T::infinity()),
        }
    }

    /// Whether `τ = 0` is a pole on the axis.
    pub fn has_pole(&self) -> bool {
        matches!(self, Self::Plane | Self::CappedCone { .. })
    }

    pub fn ends(&self) -> Vec<End> {
        if self.has_pole() {
            vec![End::Upper]
        } else {
            vec![End::Upper, End::Lower]
        }
    }

    pub fn euler_characteristic(&self) -> i32 {
        if self.has_pole() {
            1
        } else {
            0
        }
    }

    /// Radius of the compact non-ruled core.
    pub fn core_radius(&self) -> T {
        match *self {
            Self::CappedCone { cap, .. } => cap,
            _ => T::zero(),
        }
    }

    /// Height of the cap boundary circle.
    fn cap_height(alpha: T, cap: T) -> T {
        let rule = GaussLegendre::<T>::new(24);
        rule.integrate(T::zero(), cap, |l| {
            let (x, _, _, _, s) = cone_cap_parts(alpha, cap, l);
            x * s
        })
    }

    pub fn jet(&self, tau: T) -> ProfileJet<T> {
        let z0 = T::zero();
        let one = T::one();
        match *self {
            Self::Plane => ProfileJet { rho: tau, z: z0, rho1: one, z1: z0, rho2: z0, z2: z0 },
            Self::Cylinder { radius } => ProfileJet { rho: radius, z: tau, rho1: z0, z1: one, rho2: z0, z2: z0 },
            Self::CappedCone { alpha, cap } => {
                let (sa, ca) = alpha.sin_cos();
                if tau >= cap {
                    let rho_c = cap * (one + sa) * lit(0.5);
                    let zc = Self::cap_height(alpha, cap);
                    ProfileJet {
                        rho: rho_c + sa * (tau - cap),
                        z: zc + ca * (tau - cap),
                        rho1: sa,
                        z1: ca,
                        rho2: z0,
                        z2: z0,
                    }
                } else {
                    let (x, rho, rho1, rho2, s) = cone_cap_parts(alpha, cap, tau);
                    let rule = GaussLegendre::<T>::new(24);
                    let z = rule.integrate(z0, tau, |l| {
                        let (x, _, _, _, s) = cone_cap_parts(alpha, cap, l);
                        x * s
                    });
                    // z″ = −ρ′ρ″/z′ with z′ = x S
                    let z2 = if x > z0 { -rho1 * rho2 / (x * s) } else { lit::<T>(6.0) * (one - sa) / (cap * s) };
                    ProfileJet { rho, z, rho1, z1: x * s, rho2, z2 }
                }
            }
            Self::Hyperboloid { a, c } => {
                let q = (one + tau * tau / (c * c)).sqrt();
                ProfileJet {
                    rho: a * q,
                    z: tau,
                    rho1: a * tau / (c * c * q),
                    z1: one,
                    rho2: a / (c * c * q * q * q),
                    z2: z0,
                }
            }
        }
    }

    /// Meridian and parallel principal curvatures `(κ_m, κ_p)`.
    pub fn curvatures(&self, tau: T) -> (T, T) {
        match *self {
            Self::CappedCone { alpha, cap } if tau < cap => {
                let one = T::one();
                let sa = alpha.sin();
                let (x, _, _, _, s) = cone_cap_parts(alpha, cap, tau);
                let km = lit::<T>(6.0) * (one - sa) * (one - x) / (cap * s);
                let kp = s / (cap * (one - (one - sa) * x * x * (one - x * lit(0.5))));
                (km, kp)
            }
            Self::Plane => (T::zero(), T::zero()),
            _ => {
                let j = self.jet(tau);
                let w = j.speed();
                ((j.rho1 * j.z2 - j.rho2 * j.z1) / (w * w * w), j.z1 / (j.rho * w))
            }
        }
    }

    pub fn gauss(&self, tau: T) -> T {
        let (m, p) = self.curvatures(tau);
        m * p
    }

    /// Area element per unit τ, `2πρ w`.
    pub fn area_density(&self, tau: T) -> T {
        let j = self.jet(tau);
        T::TAU() * j.rho * j.speed()
    }

    /// Signed profile arclength from `τ = 0`.
    pub fn arclength(&self, tau: T) -> T {
        match *self {
            Self::Hyperboloid { c, .. } => {
                let rule = GaussLegendre::<T>::new(16);
                let sign = tau.signum();
                let end = tau.abs();
                let mut total = T::zero();
                let mut lo = T::zero();
                let mut width = c;
                while lo < end {
                    let hi = (lo + width).min(end);
                    total += rule.integrate(lo, hi, |z| self.jet(z).speed());
                    lo = hi;
                    if lo >= lit::<T>(4.0) * c {
                        width *= lit(2.0);
                    }
                }
                sign * total
            }
            Self::Cylinder { .. } | Self::Plane | Self::CappedCone { .. } => tau,
        }
    }

    /// Geodesic radius from the pole (or the waist) of the point at `τ`.
    pub fn radius(&self, tau: T) -> T {
        self.arclength(tau).abs()
    }

    /// Profile parameter on the given end at geodesic radius `r`.
    pub fn tau_at_radius(&self, r: T, end: End) -> T {
        let sign = if end == End::Upper { T::one() } else { -T::one() };
        match *self {
            Self::Hyperboloid { a, c } => {
                let sa = a / a.hypot(c);
                let mut z = r * (T::one() - sa * sa).sqrt();
                for _ in 0..60 {
                    let step = (self.arclength(z) - r) / self.jet(z).speed();
                    z -= step;
                    if step.abs() <= lit::<T>(8.0) * T::epsilon() * (T::one() + r) {
                        break;
                    }
                }
                sign * z
            }
            _ => sign * r,
        }
    }

    /// Profile parameter of a point on the surface.
    pub fn tau_of_point(&self, p: Vec3<T>) -> T {
        let rho = p.x.hypot(p.y);
        match *self {
            Self::Plane => rho,
            Self::Cylinder { .. } | Self::Hyperboloid { .. } => p.z,
            Self::CappedCone { alpha, cap } => {
                let sa = alpha.sin();
                let rho_c = cap * (T::one() + sa) * lit(0.5);
                if rho >= rho_c {
                    cap + (rho - rho_c) / sa
                } else {
                    let mut l = rho;
                    for _ in 0..60 {
                        let (_, r, r1, _, _) = cone_cap_parts(alpha, cap, l);
                        let step = (r - rho) / r1;
                        l = (l - step).max(T::zero()).min(cap);
                        if step.abs() <= lit::<T>(8.0) * T::epsilon() * (T::one() + cap) {
                            break;
                        }
                    }
                    l
                }
            }
        }
    }

    /// Geodesic radius of a surface point.
    pub fn radius_of_point(&self, p: Vec3<T>) -> T {
        self.radius(self.tau_of_point(p))
    }

    /// Total length of the geodesic circles at radius `r`, summed over ends.
    pub fn level_length(&self, r: T) -> T {
        self.ends()
            .into_iter()
            .map(|e| T::TAU() * self.jet(self.tau_at_radius(r, e)).rho)
            .sum()
    }

    /// Profile points `τ` at which the profile stops being analytic.
    pub fn kinks(&self) -> Vec<T> {
        match *self {
            Self::CappedCone { cap, .. } => vec![cap],
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_joins_cone_with_continuous_curvature() {
        let p = RevolutionProfile::CappedCone { alpha: 0.6f64, cap: 1.3 };
        let below = p.jet(1.3 - 1e-9);
        let above = p.jet(1.3 + 1e-9);
        assert!((below.rho - above.rho).abs() < 1e-8);
        assert!((below.z - above.z).abs() < 1e-8);
        assert!((below.rho1 - above.rho1).abs() < 1e-8);
        let (km_b, kp_b) = p.curvatures(1.3 - 1e-9);
        let (km_a, kp_a) = p.curvatures(1.3 + 1e-9);
        assert!(km_b.abs() < 1e-7 && km_a == 0.0);
        assert!((kp_b - kp_a).abs() < 1e-7);
    }

    #[test]
    fn cap_is_unit_speed_and_umbilic_at_pole() {
        let p = RevolutionProfile::CappedCone { alpha: 0.8f64, cap: 1.0 };
        for k in 0..20 {
            let j = p.jet(0.05 * k as f64);
            assert!((j.speed() - 1.0).abs() < 1e-12);
        }
        let (km, kp) = p.curvatures(0.0);
        assert!((km - kp).abs() < 1e-12);
        // curvature formula agrees with the generic one away from the pole
        let j = p.jet(0.4);
        let generic = j.rho1 * j.z2 - j.rho2 * j.z1;
        assert!((generic - p.curvatures(0.4).0).abs() < 1e-10);
        assert!((j.z1 / j.rho - p.curvatures(0.4).1).abs() < 1e-12);
    }

    #[test]
    fn hyperboloid_radius_inverts() {
        let p = RevolutionProfile::Hyperboloid { a: 1.0f64, c: 0.7 };
        for r in [0.3, 4.0, 250.0] {
            let z = p.tau_at_radius(r, End::Lower);
            assert!(z < 0.0);
            assert!((p.radius(z) - r).abs() < 1e-9 * r.max(1.0));
        }
    }

    #[test]
    fn cone_point_map_inverts_profile() {
        let p = RevolutionProfile::CappedCone { alpha: 0.5f64, cap: 2.0 };
        for l in [0.1, 1.0, 1.99, 2.0, 7.5] {
            let j = p.jet(l);
            let q = Vec3::new(j.rho, 0.0, j.z);
            assert!((p.tau_of_point(q) - l).abs() < 1e-10);
        }
    }
}
