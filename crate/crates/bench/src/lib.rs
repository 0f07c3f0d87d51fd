//! Shared fixtures for the criterion benches in `benches/`.

use s3pinch::CatalogSurface;

/// Surfaces timed by the quadrature benches, one per family.
pub fn fixtures() -> Vec<(&'static str, CatalogSurface)> {
    vec![
        ("sphere", CatalogSurface::geodesic_sphere(1.0).unwrap()),
        ("clifford", CatalogSurface::clifford()),
        ("psphere", CatalogSurface::perturbed_sphere(1.0, 0.1, 3, 1).unwrap()),
    ]
}
