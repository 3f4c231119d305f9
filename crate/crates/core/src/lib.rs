//! Numerical verification engine for hypersurfaces of the unit sphere.

pub mod catalog;
pub mod error;
pub mod geometry;
pub mod height;
pub mod integrate;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` instantiations of the generic geometry types.
pub type SurfacePoint = geometry::SurfacePoint<f64>;
pub type CurvatureSummary = geometry::CurvatureSummary<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type Estimate = integrate::Estimate<f64>;
pub type AnySurface = catalog::Surface<f64>;
pub type Equator = catalog::Equator<f64>;
pub type CliffordTorus = catalog::CliffordTorus<f64>;
pub type CartanLevel = catalog::CartanLevel<f64>;
pub type IsoparametricProfile = catalog::IsoparametricProfile<f64>;
