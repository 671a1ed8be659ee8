use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LayerModel;
use crate::scalar::{lit, Scalar};

/// Boundary condition along the directrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SBoundary {
    Periodic,
    Dirichlet,
}

/// How the truncated layer is discretized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum MeshLayout<T> {
    /// Fourier mode `m` in the rotation angle, elements in (meridian parameter, u).
    /// `v_max` is a geodesic radius; `grading` is the offset of the logarithmic
    /// meridian grading (larger is closer to uniform).
    Axisymmetric { mode: u32, grading: T },
    /// Tensor elements on the chart box `s_range × [v_min, v_max] × [−a, a]`;
    /// `s_range = None` uses the full s-domain.
    ChartBox { s_range: Option<(T, T)>, v_min: T, s_boundary: SBoundary },
}

/// Element counts per direction, polynomial order and truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MeshSpec<T> {
    pub n_s: usize,
    pub n_v: usize,
    pub n_u: usize,
    pub order: usize,
    pub v_max: T,
    pub layout: MeshLayout<T>,
}

impl<T: Scalar> MeshSpec<T> {
    /// Axisymmetric ground-mode mesh.
    pub fn axisymmetric(n_v: usize, n_u: usize, order: usize, v_max: T, grading: T) -> Self {
        Self { n_s: 1, n_v, n_u, order, v_max, layout: MeshLayout::Axisymmetric { mode: 0, grading } }
    }

    pub fn chart_box(n_s: usize, n_v: usize, n_u: usize, order: usize, s_range: Option<(T, T)>, v: (T, T), s_boundary: SBoundary) -> Self {
        Self { n_s, n_v, n_u, order, v_max: v.1, layout: MeshLayout::ChartBox { s_range, v_min: v.0, s_boundary } }
    }

    /// Nodes per direction, counting Dirichlet nodes.
    pub fn nodes(&self, n: usize) -> usize {
        n * self.order + 1
    }

    /// Same spacing with the truncation scaled by `factor` and the meridian
    /// element count adjusted to keep the element size.
    pub fn extended(&self, factor: usize) -> Self {
        let mut m = *self;
        m.n_v *= factor;
        m.v_max = self.v_max * lit::<T>(factor as f64);
        if let MeshLayout::ChartBox { v_min, .. } = self.layout {
            m.v_max = v_min + (self.v_max - v_min) * lit::<T>(factor as f64);
        }
        m
    }

    pub fn validate(&self, layer: &LayerModel<T>) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(1..=8).contains(&self.order) {
            return bad(format!("element order {} outside 1..=8", self.order));
        }
        let used: Vec<(&str, usize)> = match self.layout {
            MeshLayout::Axisymmetric { .. } => vec![("n_v", self.n_v), ("n_u", self.n_u)],
            MeshLayout::ChartBox { .. } => vec![("n_s", self.n_s), ("n_v", self.n_v), ("n_u", self.n_u)],
        };
        for (name, n) in used {
            if n == 0 || self.nodes(n) < 4 {
                return bad(format!("{name} = {n} gives fewer than 4 nodes at order {}", self.order));
            }
        }
        if !(self.v_max > T::zero()) || !self.v_max.is_finite() {
            return bad("v_max must be positive and finite".into());
        }
        match self.layout {
            MeshLayout::Axisymmetric { grading, .. } => {
                let prof = layer.surface.profile.as_ref().ok_or_else(|| {
                    Error::Unsupported("axisymmetric meshes need a rotationally symmetric surface".into())
                })?;
                if !(grading > T::zero()) {
                    return bad("grading offset must be positive".into());
                }
                if self.v_max <= prof.core_radius() {
                    return bad("v_max must exceed the core radius".into());
                }
            }
            MeshLayout::ChartBox { s_range, v_min, s_boundary } => {
                let chart = &layer.surface.chart;
                let (lo, hi) = chart.v_range;
                if v_min < lo || self.v_max > hi || v_min >= self.v_max {
                    return bad(format!(
                        "v interval [{:.4}, {:.4}] outside chart range [{:.4}, {:.4}]",
                        v_min.to_f64_lossy(),
                        self.v_max.to_f64_lossy(),
                        lo.to_f64_lossy(),
                        hi.to_f64_lossy()
                    ));
                }
                if let Some((a, b)) = s_range {
                    if !(b > a) {
                        return bad("s range must have positive length".into());
                    }
                    if s_boundary == SBoundary::Periodic {
                        return bad("periodic s boundary requires the full s-domain".into());
                    }
                    if !chart.s_domain.is_periodic() {
                        let (sl, sh) = chart.s_domain.bounds();
                        if a < sl || b > sh {
                            return bad("s range outside the chart s-domain".into());
                        }
                    }
                } else if s_boundary == SBoundary::Periodic && !chart.s_domain.is_periodic() {
                    return bad("periodic s boundary on a non-periodic chart".into());
                }
                if s_boundary == SBoundary::Periodic && self.n_s * self.order < 4 {
                    return bad("periodic s direction needs at least 4 nodes".into());
                }
            }
        }
        Ok(())
    }
}
