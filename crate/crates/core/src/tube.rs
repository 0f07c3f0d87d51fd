//! Heintze-Karcher tube volumes in S^3.
//!
//! Normal geodesics are great circles t -> cos t p + sin t nu. Along them the
//! volume Jacobian is (cos t - k1 sin t)(cos t - k2 sin t), which first
//! vanishes at the focal time acot(k2). Integrating the Jacobian up to the focal
//! time over the surface bounds the volume of the region the normal points
//! into; flipping the normal bounds the other region. Summing both and using
//! K = 1 + k1 k2 with Gauss-Bonnet yields the genus inequality whose links are
//! recorded in [`SumChain`].

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{CatalogSurface, Side, VolumeEstimate, VolumeSource};
use crate::error::{Error, Result};
use crate::geometry::{CurvatureData, Vec4};
use crate::pinch::{acot, hk_time_integral, genus_integrand, S3_VOLUME};
use crate::quadrature::{detect_genus, NodeSet, QuadratureGrid, CHI_TOLERANCE};
use crate::surface::Surface;

pub const DEFAULT_SAMPLES: usize = 1_000_000;
/// Samples drawn from one counter-addressed random stream.
const CHUNK: usize = 1 << 16;
/// Default relative tolerance on each link of the inequality chain.
pub const CHAIN_TOLERANCE: f64 = 1e-8;

/// Point at distance t along the great circle leaving p in direction nu.
pub fn normal_geodesic(p: &Vec4, nu: &Vec4, t: f64) -> Result<Vec4> {
    let tol = 1e-10;
    if (p.norm() - 1.0).abs() > tol || (nu.norm() - 1.0).abs() > tol || p.dot(nu).abs() > tol {
        return Err(Error::domain("normal geodesic needs orthonormal (p, nu)"));
    }
    if !t.is_finite() {
        return Err(Error::domain("geodesic time must be finite"));
    }
    let (s, c) = t.sin_cos();
    Ok(p * c + nu * s)
}

/// acot(k2) in (0, pi).
pub fn focal_time(k2: f64) -> Result<f64> {
    if !k2.is_finite() {
        return Err(Error::domain(format!("curvature must be finite, got {k2}")));
    }
    Ok(acot(k2))
}

/// Principal curvatures seen from `side`: (k1, k2) for side one and
/// (-k2, -k1) for side two.
pub fn side_curvatures(c: &CurvatureData, side: Side) -> (f64, f64) {
    match side {
        Side::One => (c.k1, c.k2),
        Side::Two => (-c.k2, -c.k1),
    }
}

/// Volume bound for one side and the range of focal times over the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeReport {
    pub side: Side,
    /// Integral over the surface of the Jacobian up to the focal time.
    pub hk_upper: f64,
    pub exact_volume: Option<VolumeEstimate>,
    pub focal_min: f64,
    pub focal_max: f64,
}

fn tube_report(nodes: &NodeSet, side: Side, exact: Option<VolumeEstimate>) -> Result<TubeReport> {
    let hk_upper = nodes.integrate(|n| {
        let (k1, k2) = side_curvatures(&n.curvature, side);
        hk_time_integral(k1, k2)
    })?;
    let focal = |n: &crate::quadrature::Node| acot(side_curvatures(&n.curvature, side).1);
    Ok(TubeReport {
        side,
        hk_upper,
        exact_volume: exact,
        focal_min: nodes.min_of(focal),
        focal_max: nodes.max_of(focal),
    })
}

/// Integral of the side's Jacobian up to the focal time.
pub fn side_upper_bound(surface: &dyn Surface, side: Side, grid: &QuadratureGrid) -> Result<f64> {
    let nodes = NodeSet::evaluate(surface, grid)?;
    Ok(tube_report(&nodes, side, None)?.hk_upper)
}

/// All quantities of the volume-sum inequality chain
///
/// ```text
/// 2|M| <= line1 = line2 <= line3,
/// line1 = int k2 - k1 + (1 + k1 k2)(acot k2 + acot(-k1)),
/// line2 = int k2 - k1 + (1 + k1 k2)(pi - (atan k2 - atan k1)),
/// line3 = int k2 - k1 + pi K - (1 + k1 k2)(atan k2 - atan k1),
/// ```
///
/// followed by 4 pi^2 g <= 2(2 pi^2 - |M|) + int genus_integrand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumChain {
    pub resolution: (usize, usize),
    pub sides: [TubeReport; 2],
    /// 2|M| = 4 pi^2.
    pub sum_lhs: f64,
    pub line1: f64,
    pub line2: f64,
    pub line3: f64,
    pub total_k: f64,
    pub genus: u32,
    /// 4 pi^2 g.
    pub genus_lhs: f64,
    /// Integral of k2 - k1 - (1 + k1 k2)(atan k2 - atan k1); the ambient term is 0.
    pub genus_rhs: f64,
}

/// One inequality of the chain, `lhs <= rhs` (or `lhs == rhs` for identities).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub equality: bool,
    pub holds: bool,
    /// rhs - lhs
    pub slack: f64,
}

impl SumChain {
    pub fn links(&self, tolerance: f64) -> Vec<ChainLink> {
        let link = |name: &str, lhs: f64, rhs: f64, equality: bool, extra: f64| {
            let tol = tolerance * (1.0 + lhs.abs().max(rhs.abs())) + extra;
            let holds = if equality { (rhs - lhs).abs() <= tol } else { lhs <= rhs + tol };
            ChainLink { name: name.to_string(), lhs, rhs, equality, holds, slack: rhs - lhs }
        };
        let mut out = Vec::new();
        for s in &self.sides {
            if let Some(exact) = s.exact_volume {
                let name = format!("hk_side_{}", s.side.index() + 1);
                out.push(link(&name, exact.value, s.hk_upper, false, 3.0 * exact.stderr));
            }
        }
        out.push(link("volume_sum", self.sum_lhs, self.line1, false, 0.0));
        out.push(link("atan_rewrite", self.line1, self.line2, true, 0.0));
        out.push(link("gauss_curvature", self.line2, self.line3, false, 0.0));
        out.push(link("genus_integrand", self.genus_lhs, self.genus_rhs, false, 0.0));
        out
    }

    pub fn violations(&self, tolerance: f64) -> Vec<ChainLink> {
        self.links(tolerance).into_iter().filter(|l| !l.holds).collect()
    }
}

/// Evaluates the chain on `grid`, using `exact` side volumes when given.
pub fn sum_chain(
    surface: &dyn Surface,
    grid: &QuadratureGrid,
    exact: Option<[VolumeEstimate; 2]>,
) -> Result<SumChain> {
    let nodes = NodeSet::evaluate(surface, grid)?;
    sum_chain_from_nodes(&nodes, exact)
}

/// [`sum_chain`] on already evaluated nodes.
pub fn sum_chain_from_nodes(nodes: &NodeSet, exact: Option<[VolumeEstimate; 2]>) -> Result<SumChain> {
    let side_one = tube_report(nodes, Side::One, exact.map(|e| e[0]))?;
    let side_two = tube_report(nodes, Side::Two, exact.map(|e| e[1]))?;

    let line1 = nodes.integrate(|n| {
        let (k1, k2) = (n.curvature.k1, n.curvature.k2);
        Ok(k2 - k1 + (1.0 + k1 * k2) * (acot(k2) + acot(-k1)))
    })?;
    let line2 = nodes.integrate(|n| {
        let (k1, k2) = (n.curvature.k1, n.curvature.k2);
        Ok(k2 - k1 + (1.0 + k1 * k2) * (PI - (k2.atan() - k1.atan())))
    })?;
    let line3 = nodes.integrate(|n| {
        let c = &n.curvature;
        Ok(c.k2 - c.k1 + PI * c.gauss_k - (1.0 + c.k1 * c.k2) * (c.k2.atan() - c.k1.atan()))
    })?;
    let total_k = nodes.integrate(|n| Ok(n.curvature.gauss_k))?;
    let (_, genus) = detect_genus(total_k, CHI_TOLERANCE)?;
    let genus_rhs = nodes.integrate(|n| genus_integrand(n.curvature.k1, n.curvature.k2))?;

    Ok(SumChain {
        resolution: nodes.resolution,
        sides: [side_one, side_two],
        sum_lhs: 2.0 * S3_VOLUME,
        line1,
        line2,
        line3,
        total_k,
        genus,
        genus_lhs: 4.0 * PI * PI * genus as f64,
        genus_rhs,
    })
}

/// Chain for a catalog surface against its known side volumes; fails with
/// [`Error::ChainViolation`] naming the first broken link.
pub fn verify_sum_inequality(surface: &CatalogSurface, grid: &QuadratureGrid) -> Result<SumChain> {
    let chain = sum_chain(surface, grid, Some(surface.exact().side_volumes))?;
    if let Some(bad) = chain.violations(CHAIN_TOLERANCE).into_iter().next() {
        return Err(Error::ChainViolation { link: bad.name, lhs: bad.lhs, rhs: bad.rhs });
    }
    Ok(chain)
}

/// Uniform point of S^3: a normalized standard Gaussian in R^4.
pub fn uniform_s3<R: rand::Rng + ?Sized>(rng: &mut R) -> Vec4 {
    loop {
        let g = Vec4::from_fn(|_, _| StandardNormal.sample(rng));
        let n = g.norm();
        if n > 0.0 {
            return g / n;
        }
    }
}

/// Monte-Carlo estimate of the volume of one side.
///
/// Samples are split into fixed chunks, each drawn from its own ChaCha stream
/// keyed by (seed, chunk index), so the estimate does not depend on how
/// chunks are scheduled across threads.
pub fn monte_carlo_volume(surface: &CatalogSurface, side: Side, n_samples: usize, seed: u64) -> VolumeEstimate {
    let chunks = n_samples.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(n_samples - c * CHUNK);
            (0..count).filter(|_| surface.side_of(&uniform_s3(&mut rng)) == side).count()
        })
        .sum();
    let n = n_samples.max(1) as f64;
    let p = hits as f64 / n;
    VolumeEstimate {
        value: S3_VOLUME * p,
        stderr: S3_VOLUME * (p * (1.0 - p) / n).sqrt(),
        source: VolumeSource::MonteCarlo,
    }
}
