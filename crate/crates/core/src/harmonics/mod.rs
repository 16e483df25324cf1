//! Zonal spherical harmonics, angular quadrature, and polar-graph surface geometry.

pub mod basis;
pub mod geometry;
pub mod quadrature;

pub use basis::{eigenvalue, sphere_area, ZonalBasis, ZonalValues};
pub use geometry::{direction, tangential_split, SurfaceGraph, SurfacePoint, Vec2};
pub use quadrature::{gauss_legendre, gauss_legendre_interval, AngularQuadrature, QuadratureKind};
