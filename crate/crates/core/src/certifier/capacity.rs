//! Radial capacity functions on rotationally symmetric models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{End, RevolutionProfile, SurfaceModel};
use crate::quadrature::GaussLegendre;
use crate::scalar::{count, lit, Scalar};
use crate::topology::profile_integral;

/// `ψ_{R_a,R_b}`: equal to 1 on `B(R_a)`, 0 outside `B(R_b)`, harmonic in between.
///
/// Every end is treated alike, so the profile parameter on the upper end describes the function.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Capacity<T> {
    pub r_a: T,
    pub r_b: T,
    pub tau_a: T,
    pub tau_b: T,
    /// `∫_{R_a}^{R_b} dr / σ(r)` with `σ` the total length of the geodesic circle.
    pub resistance: T,
    pub ends: usize,
    #[serde(skip)]
    profile: Option<RevolutionProfile<T>>,
}

pub(crate) fn symmetric_profile<T: Scalar>(surface: &SurfaceModel<T>) -> Result<RevolutionProfile<T>> {
    surface.profile.ok_or_else(|| {
        Error::Unsupported("capacity functions need a rotationally symmetric model outside the core".into())
    })
}

impl<T: Scalar> Capacity<T> {
    fn prof(&self) -> &RevolutionProfile<T> {
        self.profile.as_ref().expect("capacity built from a profile")
    }

    /// Dirichlet energy `∫ |∇ψ|² dΣ = 1 / resistance`.
    pub fn energy(&self) -> T {
        self.resistance.recip()
    }

    /// `1 / σ` per unit profile parameter.
    pub fn resistance_density(&self, tau: T) -> T {
        let j = self.prof().jet(tau);
        j.speed() / (count::<T>(self.ends) * T::TAU() * j.rho)
    }

    /// `dψ/dℓ` along the meridian at `τ` inside the annulus.
    pub fn slope(&self, tau: T) -> T {
        if tau <= self.tau_a || tau >= self.tau_b {
            return T::zero();
        }
        let rho = self.prof().jet(tau).rho;
        -(count::<T>(self.ends) * T::TAU() * rho * self.resistance).recip()
    }

    /// `ψ` at ascending profile parameters, by cumulative adaptive sums from `τ_b` downwards.
    pub fn values(&self, taus: &[T]) -> Vec<T> {
        let rule = GaussLegendre::<T>::new(8);
        let density = |x| self.resistance_density(x);
        let mut out = vec![T::zero(); taus.len()];
        let mut acc = T::zero();
        let mut upper = self.tau_b;
        for (i, &t) in taus.iter().enumerate().rev() {
            if t >= self.tau_b {
                out[i] = T::zero();
                continue;
            }
            if t <= self.tau_a {
                out[i] = T::one();
                continue;
            }
            acc += match profile_integral(self.prof(), t, upper, density) {
                Ok((v, _)) => v,
                Err(_) => rule.integrate(t, upper, density),
            };
            upper = t;
            out[i] = (acc / self.resistance).min(T::one());
        }
        out
    }

    /// `ψ` at one geodesic radius.
    pub fn at_radius(&self, r: T) -> T {
        if r <= self.r_a {
            return T::one();
        }
        if r >= self.r_b {
            return T::zero();
        }
        let t = self.prof().tau_at_radius(r, End::Upper);
        self.values(&[t])[0]
    }
}

/// Builds `ψ_{R_a,R_b}` with its energy.
pub fn capacity_function<T: Scalar>(surface: &SurfaceModel<T>, r_a: T, r_b: T) -> Result<Capacity<T>> {
    let prof = symmetric_profile(surface)?;
    if !(r_a > surface.core_radius && r_b > r_a) {
        return Err(Error::InvalidInput(format!(
            "capacity radii must satisfy R0 < Ra < Rb, got R0 = {:.4}, Ra = {:.4}, Rb = {:.4}",
            surface.core_radius.to_f64_lossy(),
            r_a.to_f64_lossy(),
            r_b.to_f64_lossy()
        )));
    }
    let tau_a = prof.tau_at_radius(r_a, End::Upper);
    let tau_b = prof.tau_at_radius(r_b, End::Upper);
    let ends = prof.ends().len();
    let mut cap = Capacity { r_a, r_b, tau_a, tau_b, resistance: T::one(), ends, profile: Some(prof) };
    let (res, _) = profile_integral(&prof, tau_a, tau_b, |t| cap.resistance_density(t))?;
    cap.resistance = res;
    Ok(cap)
}

/// Smallest `R_b = R_a e^L` on a doubling ladder of `L` whose energy falls below `eps0 / 2`.
pub fn parabolic_radius<T: Scalar>(surface: &SurfaceModel<T>, r_a: T, eps0: T, max_log_ratio: T) -> Result<Capacity<T>> {
    let mut l = T::one();
    let mut last = T::infinity();
    while l <= max_log_ratio {
        let cap = capacity_function(surface, r_a, r_a * l.exp())?;
        if cap.energy() >= last {
            return Err(Error::NotParabolicNumerically("capacity energy stopped decreasing".into()));
        }
        if cap.energy() < eps0 * lit(0.5) {
            return Ok(cap);
        }
        last = cap.energy();
        l *= lit(2.0);
    }
    Err(Error::NotParabolicNumerically(format!(
        "energy stays above {:.3e} up to log(Rb/Ra) = {:.1}",
        (eps0 * lit(0.5)).to_f64_lossy(),
        max_log_ratio.to_f64_lossy()
    )))
}

/// `ψ = ψ_{R₃,R₄} − ψ_{R₁,R₂}`: zero on `B(R₁)` and outside `B(R₄)`, one on `B(R₃) ∖ B(R₂)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Plateau<T> {
    pub inner: Capacity<T>,
    pub outer: Capacity<T>,
}

impl<T: Scalar> Plateau<T> {
    pub fn energy(&self) -> T {
        self.inner.energy() + self.outer.energy()
    }

    pub fn at_radius(&self, r: T) -> T {
        self.outer.at_radius(r) - self.inner.at_radius(r)
    }
}

pub fn plateau_psi<T: Scalar>(surface: &SurfaceModel<T>, r1: T, r2: T, r3: T, r4: T) -> Result<Plateau<T>> {
    if !(r2 < r3) {
        return Err(Error::InvalidInput("plateau radii must satisfy R2 < R3".into()));
    }
    Ok(Plateau { inner: capacity_function(surface, r1, r2)?, outer: capacity_function(surface, r3, r4)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build, SurfaceSpec};

    #[test]
    fn plane_capacity_is_logarithmic() {
        let m = build::<f64>(&SurfaceSpec::Plane { extent: 1e4 }, 1.0).unwrap();
        let c = capacity_function(&m, 2.0, 2.0 * 5f64.exp()).unwrap();
        assert!((c.energy() - std::f64::consts::TAU / 5.0).abs() < 1e-10);
        let r = 2.0 * 2.5f64.exp();
        assert!((c.at_radius(r) - 0.5).abs() < 1e-10, "{}", c.at_radius(r) - 0.5);
        assert_eq!(c.at_radius(1.0), 1.0);
    }
}
