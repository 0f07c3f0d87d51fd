//! Curvature, quadrature and pinching certificates for closed surfaces in the
//! unit 3-sphere.
//!
//! The toolkit evaluates principal curvatures of parametric surfaces in S^3,
//! integrates the pinching function f(|Å|) to bound the genus, checks the
//! Heintze-Karcher tube-volume chain behind that bound, and solves the scalar
//! equations (beta, f^-1) that turn it into pointwise and eigenvalue
//! statements. Geodesic spheres and the Clifford torus, where the bounds are
//! sharp, ship in [`catalog`] as exact oracles.

pub mod catalog;
pub mod certify;
pub mod error;
pub mod geometry;
pub mod gridfile;
pub mod pinch;
pub mod quadrature;
pub mod roots;
pub mod surface;
pub mod tube;

pub use catalog::{CatalogSurface, Side, SurfaceKind, VolumeEstimate, VolumeSource};
pub use certify::{eigen_certificate, gap_certificate, EigenCertificate};
pub use error::{Error, Result};
pub use geometry::{curvature_at, tangent_normal_frame, CurvatureData, SurfacePoint, Vec4};
pub use gridfile::{export_grid, parse_grid, read_grid, ImportedSurface};
pub use quadrature::{convergence_probe, genus_report, GapCertificate, GenusReport, QuadratureGrid};
pub use roots::RootResult;
pub use surface::{Domain, FiniteDifferenceSurface, Interval, Surface};
pub use tube::{monte_carlo_volume, sum_chain, verify_sum_inequality, SumChain, TubeReport};
