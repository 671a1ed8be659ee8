use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::curve::Jet;
use crate::geometry::chart::RuledChart;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

pub type Mat2<T> = [[T; 2]; 2];

fn mat2_mul<T: Scalar>(a: Mat2<T>, b: Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn mat2_inv<T: Scalar>(a: Mat2<T>) -> Mat2<T> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let r = det.recip();
    [[a[1][1] * r, -a[0][1] * r], [-a[1][0] * r, a[0][0] * r]]
}

/// First and second fundamental forms and the shape operator at a chart point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondForm<T> {
    pub l: T,
    pub m: T,
    pub n_coef: T,
    /// first fundamental form in `(s, v)`
    pub metric: Mat2<T>,
    /// `W = I⁻¹ II`
    pub shape: Mat2<T>,
    /// oriented unit normal
    pub normal: Vec3<T>,
}

impl<T: Scalar> SecondForm<T> {
    pub fn mean(&self) -> T {
        self.shape[0][0] + self.shape[1][1]
    }

    pub fn gauss(&self) -> T {
        self.shape[0][0] * self.shape[1][1] - self.shape[0][1] * self.shape[1][0]
    }

    /// `‖Ā‖² = κ₁² + κ₂² = H² − 2K`.
    pub fn norm_sq(&self) -> T {
        let h = self.mean();
        h * h - (T::one() + T::one()) * self.gauss()
    }

    pub fn area_element(&self) -> T {
        (self.metric[0][0] * self.metric[1][1] - self.metric[0][1] * self.metric[1][0]).sqrt()
    }
}

/// Fundamental forms from the chart jets: `L = ⟨x_ss, N⟩`, `M = ⟨x_sv, N⟩`, `N = ⟨x_vv, N⟩`.
pub fn second_form_and_shape<T: Scalar>(chart: &RuledChart<T>, s: T, v: T) -> SecondForm<T> {
    let (b, d) = chart.frames(s);
    second_form_from_frames(&b, &d, chart.orientation, v)
}

/// [`second_form_and_shape`] from directrix and ruling jets already evaluated at `s`.
pub fn second_form_from_frames<T: Scalar>(b: &Jet<T>, d: &Jet<T>, orientation: T, v: T) -> SecondForm<T> {
    let xs = b.d1 + d.d1 * v;
    let xv = d.value;
    let xss = b.d2 + d.d2 * v;
    let xsv = d.d1;
    let normal = xs.cross(xv).normalized().unwrap_or_else(Vec3::zero) * orientation;
    let l = xss.dot(normal);
    let m = xsv.dot(normal);
    // rulings are straight lines, so x_vv vanishes identically
    let n_coef = T::zero();
    let metric = [[xs.norm_sq(), xs.dot(xv)], [xs.dot(xv), xv.norm_sq()]];
    let shape = mat2_mul(mat2_inv(metric), [[l, m], [m, n_coef]]);
    SecondForm { l, m, n_coef, metric, shape, normal }
}

/// `K = −⟨δ′, N⟩² / Q`.
pub fn gauss_curvature<T: Scalar>(chart: &RuledChart<T>, s: T, v: T) -> T {
    let (b, d) = chart.frames(s);
    let xs = b.d1 + d.d1 * v;
    let n = xs.cross(d.value);
    let q = n.norm_sq();
    let m = d.d1.dot(n);
    // ⟨δ′, N⟩² = m² / |x_s × x_v|², and det g = |x_s × x_v|²
    -(m * m) / (q * q)
}

/// `H = L / Q` from the fundamental forms (gauge chart).
pub fn mean_curvature_from_forms<T: Scalar>(chart: &RuledChart<T>, s: T, v: T) -> T {
    second_form_and_shape(chart, s, v).mean()
}

/// Developability verdict with the measured curvature scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Developability<T> {
    pub developable: bool,
    pub max_abs_k: T,
    pub max_abs_m: T,
    pub curvature_scale: T,
}

/// Samples `|K|` and `|⟨δ′, N⟩|` on an `ns × nv` grid of the chart.
pub fn is_developable<T: Scalar>(chart: &RuledChart<T>, ns: usize, v_samples: &[T], tol_rel: T) -> Developability<T> {
    let mut max_k = T::zero();
    let mut max_m = T::zero();
    let mut scale = T::zero();
    for s in chart.s_domain.samples(ns) {
        for &v in v_samples {
            let f = second_form_and_shape(chart, s, v);
            max_k = max_k.max(f.gauss().abs());
            max_m = max_m.max((f.m / f.metric[0][0].sqrt()).abs());
            scale = scale.max(f.norm_sq());
        }
    }
    let scale = scale.max(T::one());
    Developability {
        developable: max_k <= tol_rel * scale && max_m <= tol_rel.sqrt() * scale.sqrt(),
        max_abs_k: max_k,
        max_abs_m: max_m,
        curvature_scale: scale,
    }
}

/// Pull-back metric of the layer map `(s, v, u) ↦ x + u N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerMetric<T> {
    /// `(I − uW)ᵀ g (I − uW) ⊕ du²` in `(s, v, u)`
    pub g: [[T; 3]; 3],
    /// `det(I − uW) = 1 − uH + u²K`
    pub density: T,
    /// `√det g` of the surface metric
    pub surface_element: T,
}

impl<T: Scalar> LayerMetric<T> {
    /// Volume element `det(I − uW) √det g`.
    pub fn volume(&self) -> T {
        self.density * self.surface_element
    }

    /// Inverse of the tangential block; the normal entry is 1.
    pub fn inverse_tangential(&self) -> Mat2<T> {
        mat2_inv([[self.g[0][0], self.g[0][1]], [self.g[1][0], self.g[1][1]]])
    }

    pub fn determinant(&self) -> T {
        let g = &self.g;
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }
}

/// Layer metric from precomputed forms at normal offset `u`.
pub fn layer_metric_from_forms<T: Scalar>(f: &SecondForm<T>, u: T) -> Result<LayerMetric<T>> {
    let w = f.shape;
    let a = [[T::one() - u * w[0][0], -u * w[0][1]], [-u * w[1][0], T::one() - u * w[1][1]]];
    let density = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(density > T::zero()) {
        return Err(Error::ThicknessViolation(format!(
            "volume density {:.3e} at u = {:.4}",
            density.to_f64_lossy(),
            u.to_f64_lossy()
        )));
    }
    let at = [[a[0][0], a[1][0]], [a[0][1], a[1][1]]];
    let g2 = mat2_mul(at, mat2_mul(f.metric, a));
    let z = T::zero();
    Ok(LayerMetric {
        g: [[g2[0][0], g2[0][1], z], [g2[1][0], g2[1][1], z], [z, z, T::one()]],
        density,
        surface_element: f.area_element(),
    })
}
