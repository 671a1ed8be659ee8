//! Numerical toolkit for quantum layers over surfaces ruled outside a compact set.
//!
//! The crate covers ruled-chart geometry, curvature asymptotics along rulings,
//! total-curvature identities, a variational certificate that the layer
//! Laplacian has spectrum below the transverse threshold `(π/2a)²`, and a
//! finite-element eigensolver that cross-checks the certificate.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the command line front end uses.

// `!(x > 0)` guards also reject NaN; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod certifier;
pub mod curve;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod scalar;
pub mod spectrum;
pub mod topology;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use vec3::Vec3;

pub type Chart = geometry::RuledChart<f64>;
pub type Profile = geometry::CoefficientProfile<f64>;
pub type Surface = geometry::SurfaceModel<f64>;
pub type Layer = geometry::LayerModel<f64>;
pub type Certificate = certifier::Certificate<f64>;
pub type SpectralReport = spectrum::SpectralReport<f64>;
pub type TopologyReport = topology::TopologyReport<f64>;
