//! Parametric surfaces in S^3 and their parameter domains.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{SurfacePoint, Vec4};
use crate::quadrature::QuadratureGrid;

/// One parameter direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Interval {
    pub fn periodic(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, periodic: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, periodic: false }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub u: Interval,
    pub v: Interval,
}

/// A closed surface immersed in the unit 3-sphere.
///
/// Implementations must be reentrant: quadrature evaluates nodes from
/// several threads at once.
pub trait Surface: Sync {
    /// Short identifier, e.g. `torus:a=0.6`.
    fn label(&self) -> String;

    fn domain(&self) -> Domain;

    /// Position and partials at (u, v).
    fn point(&self, u: f64, v: f64) -> Result<SurfacePoint>;

    /// Quadrature grid with `resolution` nodes per direction.
    fn grid(&self, resolution: (usize, usize)) -> Result<QuadratureGrid> {
        QuadratureGrid::for_domain(&self.domain(), resolution)
    }

    /// Whether `grid` honours the requested resolution. Sampled surfaces only
    /// exist on their native lattice.
    fn refinable(&self) -> bool {
        true
    }
}

/// Wraps a plain embedding map and supplies partials by central differences.
///
/// First partials use the step `max(|x|, 1) * eps^(1/3)`; second partials use
/// nested central differences with `max(|x|, 1) * eps^(1/4)`.
pub struct FiniteDifferenceSurface<F> {
    label: String,
    domain: Domain,
    embed: F,
}

impl<F> FiniteDifferenceSurface<F>
where
    F: Fn(f64, f64) -> Vec4 + Sync,
{
    pub fn new(label: impl Into<String>, domain: Domain, embed: F) -> Self {
        FiniteDifferenceSurface { label: label.into(), domain, embed }
    }
}

fn step(x: f64, power: f64) -> f64 {
    x.abs().max(1.0) * f64::EPSILON.powf(power)
}

impl<F> Surface for FiniteDifferenceSurface<F>
where
    F: Fn(f64, f64) -> Vec4 + Sync,
{
    fn label(&self) -> String {
        self.label.clone()
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn point(&self, u: f64, v: f64) -> Result<SurfacePoint> {
        let x = &self.embed;
        let (hu, hv) = (step(u, 1.0 / 3.0), step(v, 1.0 / 3.0));
        let du = (x(u + hu, v) - x(u - hu, v)) / (2.0 * hu);
        let dv = (x(u, v + hv) - x(u, v - hv)) / (2.0 * hv);

        let (ku, kv) = (step(u, 0.25), step(v, 0.25));
        let centre = x(u, v);
        let duu = (x(u + ku, v) - centre * 2.0 + x(u - ku, v)) / (ku * ku);
        let dvv = (x(u, v + kv) - centre * 2.0 + x(u, v - kv)) / (kv * kv);
        let duv = (x(u + ku, v + kv) - x(u + ku, v - kv) - x(u - ku, v + kv) + x(u - ku, v - kv))
            / (4.0 * ku * kv);

        Ok(SurfacePoint { u, v, position: centre, du, dv, duu, duv, dvv })
    }
}
