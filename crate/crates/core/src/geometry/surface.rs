use crate::error::{Error, Result};
use crate::geometry::catalog::SurfaceSpec;
use crate::geometry::chart::{GaugeShift, RuledChart};
use crate::geometry::forms::{layer_metric_from_forms, second_form_and_shape, LayerMetric};
use crate::geometry::revolution::RevolutionProfile;
use crate::scalar::{count, lit, Scalar};
use crate::vec3::Vec3;

/// A complete surface: ruled outer chart, optional rotationally symmetric
/// structure, and the topological data declared with it.
#[derive(Clone, Debug)]
pub struct SurfaceModel<T: Scalar> {
    pub spec: SurfaceSpec,
    pub chart: RuledChart<T>,
    pub profile: Option<RevolutionProfile<T>>,
    pub core_radius: T,
    pub euler_characteristic: i32,
    pub basepoint: Vec3<T>,
    /// Present when the chart was brought into gauge numerically.
    pub gauge_shift: Option<GaugeShift<T>>,
}

impl<T: Scalar> SurfaceModel<T> {
    pub fn orientation(&self) -> T {
        self.chart.orientation
    }

    pub fn ends(&self) -> usize {
        self.profile.map_or(1, |p| p.ends().len())
    }

    /// Geodesic radius of a chart point. Revolution models use profile
    /// arclength; other models fall back to Euclidean distance from the basepoint.
    pub fn radius(&self, s: T, v: T) -> T {
        let p = self.chart.point(s, v);
        match &self.profile {
            Some(prof) => prof.radius_of_point(p),
            None => (p - self.basepoint).norm(),
        }
    }

    /// Largest violation of monotonicity of the radius along rulings, measured
    /// away from the closest point of each ruling to the core (ascending `v_samples`).
    pub fn radius_monotonicity_defect(&self, ns: usize, v_samples: &[T]) -> T {
        let mut worst = T::zero();
        for s in self.chart.s_domain.samples(ns) {
            let r: Vec<T> = v_samples.iter().map(|&v| self.radius(s, v)).collect();
            let k = (0..r.len()).fold(0, |m, i| if r[i] < r[m] { i } else { m });
            for i in 0..r.len().saturating_sub(1) {
                let rise = if i >= k { r[i + 1] - r[i] } else { r[i] - r[i + 1] };
                worst = worst.max(-rise);
            }
        }
        worst
    }

    /// Position and tangent mismatch between the chart's `v = 0` circle and
    /// the profile at the core boundary.
    pub fn gluing_defect(&self, ns: usize) -> Option<T> {
        let prof = self.profile?;
        if self.core_radius <= T::zero() {
            return None;
        }
        let j = prof.jet(self.core_radius);
        let w = j.speed();
        let mut worst = T::zero();
        for s in self.chart.s_domain.samples(ns) {
            let p = self.chart.point(s, T::zero());
            let (_, d) = self.chart.frames(s);
            let rho = p.x.hypot(p.y);
            let (cth, sth) = (p.x / rho, p.y / rho);
            let tangent = Vec3::new(cth * j.rho1 / w, sth * j.rho1 / w, j.z1 / w);
            let pos = ((rho - j.rho).abs()).max((p.z - j.z).abs());
            worst = worst.max(pos).max((d.value - tangent).norm());
        }
        Some(worst)
    }

    /// Sampled `sup ‖Ā‖` over the chart (first `v_span` of each ruling) and the profile core.
    pub fn sup_second_form(&self, ns: usize, v_samples: &[T]) -> T {
        let mut sup = T::zero();
        for s in self.chart.s_domain.samples(ns) {
            for &v in v_samples {
                sup = sup.max(second_form_and_shape(&self.chart, s, v).norm_sq().sqrt());
            }
        }
        if let Some(p) = &self.profile {
            let reach = (self.core_radius * lit(2.0)).max(T::one());
            let n = 400;
            for e in p.ends() {
                for i in 0..=n {
                    let tau = p.tau_at_radius(reach * count(i) / count(n), e);
                    let (km, kp) = p.curvatures(tau);
                    sup = sup.max((km * km + kp * kp).sqrt());
                }
            }
        }
        sup
    }

    /// Default v-samples: the first 64 length units of the chart.
    pub fn default_v_samples(&self, n: usize) -> Vec<T> {
        let (lo, hi) = self.chart.v_range;
        let lo = lo.max(-lit::<T>(64.0));
        let hi = hi.min(lit(64.0));
        (0..n).map(|i| lo + (hi - lo) * count(i) / count(n - 1)).collect()
    }
}

/// Surface with a layer thickness obeying `a · sup‖Ā‖ ≤ C₀ < 1`.
#[derive(Clone, Debug)]
pub struct LayerModel<T: Scalar> {
    pub surface: SurfaceModel<T>,
    pub thickness: T,
    pub c0: T,
    /// Sampled `sup ‖Ā‖` used to admit the layer.
    pub sup_second_form: T,
}

impl<T: Scalar> LayerModel<T> {
    pub fn new(surface: SurfaceModel<T>, thickness: T, c0: T) -> Result<Self> {
        if !(thickness > T::zero()) {
            return Err(Error::InvalidInput("layer thickness must be positive".into()));
        }
        if !(c0 > T::zero() && c0 < T::one()) {
            return Err(Error::InvalidInput("C0 must lie in (0, 1)".into()));
        }
        let vs = surface.default_v_samples(129);
        let sup = surface.sup_second_form(64, &vs);
        if thickness * sup > c0 {
            return Err(Error::ThicknessViolation(format!(
                "a * sup|A| = {:.4} exceeds C0 = {:.4}",
                (thickness * sup).to_f64_lossy(),
                c0.to_f64_lossy()
            )));
        }
        Ok(Self { surface, thickness, c0, sup_second_form: sup })
    }

    /// Transverse Dirichlet ground energy `(π / 2a)²`.
    pub fn threshold(&self) -> T {
        let k = T::PI() / (lit::<T>(2.0) * self.thickness);
        k * k
    }

    pub fn layer_metric(&self, s: T, v: T, u: T) -> Result<LayerMetric<T>> {
        if u.abs() >= self.thickness {
            return Err(Error::InvalidInput(format!(
                "normal offset {:.4} outside the layer",
                u.to_f64_lossy()
            )));
        }
        let f = second_form_and_shape(&self.surface.chart, s, v);
        layer_metric_from_forms(&f, u)
    }
}
