//! Ruled charts, gauge normalization, curvature and the layer metric.

pub mod catalog;
pub mod chart;
pub mod coefficients;
pub mod forms;
pub mod revolution;
pub mod surface;

pub use catalog::{build, catalog, CatalogEntry, SurfaceSpec};
pub use chart::{orthonormalize_chart, GaugeOptions, GaugeShift, RuledChart, SDomain};
pub use coefficients::{chart_coefficients, mean_curvature, CoefficientProfile, Coefficients};
pub use forms::{
    gauss_curvature, is_developable, layer_metric_from_forms, mean_curvature_from_forms, second_form_and_shape,
    second_form_from_frames, Developability, LayerMetric, Mat2, SecondForm,
};
pub use revolution::{End, RevolutionProfile};
pub use surface::{LayerModel, SurfaceModel};

/// Default tolerances of the geometry layer.
pub mod tol {
    pub const GAUGE: f64 = 1e-8;
    pub const K_REL: f64 = 1e-10;
    pub const H_REL: f64 = 1e-6;
    pub const Q_MIN: f64 = 1e-6;
}
