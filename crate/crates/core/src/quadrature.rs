//! Surface integrals over parameter domains and Gauss-Bonnet genus detection.
//!
//! Periodic directions use the trapezoidal rule, which converges spectrally for
//! smooth periodic integrands. Non-periodic directions (the polar angle of a
//! sphere chart) use composite Gauss-Legendre panels, whose nodes never touch
//! the poles. Node evaluations run in parallel; every reduction is a fixed
//! pairwise tree so results do not depend on thread count.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{curvature_at, tangent_normal_frame, CurvatureData, SurfacePoint};
use crate::pinch::{f_pinch, gap_threshold};
use crate::surface::{Domain, Interval, Surface};

pub const DEFAULT_RESOLUTION: usize = 64;
/// Nodes per Gauss-Legendre panel.
pub const PANEL_ORDER: usize = 8;
/// Default tolerance on |total_K / 2 pi - chi|.
pub const CHI_TOLERANCE: f64 = 0.01;
/// Surfaces with max |H| below this are treated as minimal.
pub const MINIMALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Trapezoid,
    GaussLegendre,
    Midpoint,
}

/// One-dimensional rule on an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule1d {
    pub kind: RuleKind,
    pub interval: Interval,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// Equispaced nodes excluding the duplicate endpoint, equal weights.
    pub fn trapezoid(interval: Interval, n: usize) -> Self {
        let h = interval.length() / n as f64;
        Rule1d {
            kind: RuleKind::Trapezoid,
            interval,
            nodes: (0..n).map(|i| interval.lo + i as f64 * h).collect(),
            weights: vec![h; n],
        }
    }

    /// Cell-centred nodes with equal weights.
    pub fn midpoint(interval: Interval, n: usize) -> Self {
        let h = interval.length() / n as f64;
        Rule1d {
            kind: RuleKind::Midpoint,
            interval,
            nodes: (0..n).map(|i| interval.lo + (i as f64 + 0.5) * h).collect(),
            weights: vec![h; n],
        }
    }

    /// Composite Gauss-Legendre: `n / PANEL_ORDER` panels of `PANEL_ORDER`
    /// nodes, or a single n-point panel when n < PANEL_ORDER.
    pub fn gauss_legendre(interval: Interval, n: usize) -> Self {
        let order = n.min(PANEL_ORDER);
        let panels = n / order;
        let (x, w) = gauss_legendre_nodes(order);
        let width = interval.length() / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let centre = interval.lo + (p as f64 + 0.5) * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(centre + 0.5 * width * xi);
                weights.push(0.5 * width * wi);
            }
        }
        Rule1d { kind: RuleKind::GaussLegendre, interval, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn rebuilt(&self, n: usize) -> Self {
        match self.kind {
            RuleKind::Trapezoid => Rule1d::trapezoid(self.interval, n),
            RuleKind::GaussLegendre => Rule1d::gauss_legendre(self.interval, n),
            RuleKind::Midpoint => Rule1d::midpoint(self.interval, n),
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(z) and P_{n-1}(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

/// Tensor-product grid over a parameter domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureGrid {
    pub u: Rule1d,
    pub v: Rule1d,
}

impl QuadratureGrid {
    pub fn new(u: Rule1d, v: Rule1d) -> Self {
        QuadratureGrid { u, v }
    }

    /// Trapezoid along periodic directions, Gauss-Legendre panels otherwise.
    pub fn for_domain(domain: &Domain, (nu, nv): (usize, usize)) -> Result<Self> {
        if nu == 0 || nv == 0 {
            return Err(Error::domain("grid resolution must be positive"));
        }
        let rule = |iv: Interval, n| {
            if iv.periodic {
                Rule1d::trapezoid(iv, n)
            } else {
                Rule1d::gauss_legendre(iv, n)
            }
        };
        Ok(QuadratureGrid { u: rule(domain.u, nu), v: rule(domain.v, nv) })
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.u.len(), self.v.len())
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.u.weights[i] * self.v.weights[j]
    }

    /// Sum of all weights; equals the parameter-domain area.
    pub fn measure(&self) -> f64 {
        pairwise_sum(&self.u.weights) * pairwise_sum(&self.v.weights)
    }

    /// Same rules with twice the nodes in each direction.
    pub fn refined(&self) -> Self {
        QuadratureGrid { u: self.u.rebuilt(2 * self.u.len()), v: self.v.rebuilt(2 * self.v.len()) }
    }
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Everything known at one quadrature node.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub point: SurfacePoint,
    pub curvature: CurvatureData,
    /// Quadrature weight times the area element sqrt(EG - F^2).
    pub area_weight: f64,
}

/// Evaluated nodes of a surface on a grid, in u-major order.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub resolution: (usize, usize),
    pub nodes: Vec<Node>,
}

impl NodeSet {
    pub fn evaluate(surface: &dyn Surface, grid: &QuadratureGrid) -> Result<Self> {
        let (nu, nv) = grid.resolution();
        let results: Vec<Result<Node>> = (0..nu * nv)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / nv, idx % nv);
                let point = surface.point(grid.u.nodes[i], grid.v.nodes[j])?;
                let frame = tangent_normal_frame(&point)?;
                let curvature = curvature_at(&point)?;
                Ok(Node { point, curvature, area_weight: grid.weight(i, j) * frame.metric.area_element() })
            })
            .collect();
        let nodes = results.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(NodeSet { resolution: (nu, nv), nodes })
    }

    /// Sum of area_weight * phi over all nodes.
    pub fn integrate<F>(&self, phi: F) -> Result<f64>
    where
        F: Fn(&Node) -> Result<f64>,
    {
        let terms = self
            .nodes
            .iter()
            .map(|n| Ok(n.area_weight * phi(n)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&terms))
    }

    pub fn max_of<F: Fn(&Node) -> f64>(&self, phi: F) -> f64 {
        self.nodes.iter().map(phi).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_of<F: Fn(&Node) -> f64>(&self, phi: F) -> f64 {
        self.nodes.iter().map(phi).fold(f64::INFINITY, f64::min)
    }
}

/// Integral of a scalar field over the surface.
pub fn integrate<F>(surface: &dyn Surface, grid: &QuadratureGrid, phi: F) -> Result<f64>
where
    F: Fn(&CurvatureData, &SurfacePoint) -> f64,
{
    NodeSet::evaluate(surface, grid)?.integrate(|n| Ok(phi(&n.curvature, &n.point)))
}

/// |a - b| / max(|a|, |b|), zero when both vanish.
pub fn relative_change(previous: f64, current: f64) -> f64 {
    relative_change_above(previous, current, 0.0)
}

/// |a - b| / max(|a|, |b|, floor), for quantities that may legitimately vanish.
pub fn relative_change_above(previous: f64, current: f64, floor: f64) -> f64 {
    let scale = previous.abs().max(current.abs()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (current - previous).abs() / scale
    }
}

/// L^3 gap certificate for a minimal surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapCertificate {
    /// Integral of |A|^3.
    pub integral_a3: f64,
    /// 3 sqrt(2) pi^2.
    pub threshold: f64,
    pub below_threshold: bool,
    pub max_abs_mean: f64,
}

/// Scale floors for convergence measures: one genus step in the integral of f
/// (4 pi^2) and one step of the Euler characteristic in total curvature (2 pi).
const F_SCALE: f64 = 4.0 * PI * PI;
const K_SCALE: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Convergence {
    pub refined_resolution: (usize, usize),
    pub rel_change_integral_f: f64,
    pub rel_change_total_k: f64,
}

/// Integrals over one surface and the genus bounds they certify.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenusReport {
    pub resolution: (usize, usize),
    pub area: f64,
    pub total_k: f64,
    pub euler_char: i64,
    pub genus: u32,
    /// Integral of f(|Å|).
    pub integral_f: f64,
    /// Integral of |Å|^3.
    pub integral_a3: f64,
    /// 4 pi^2 g.
    pub bound_lhs: f64,
    /// Integral of f(|Å|) (the ambient-volume term vanishes in S^3).
    pub bound_rhs: f64,
    pub slack: f64,
    /// 2 pi^2 g.
    pub cubic_lhs: f64,
    /// (sqrt(2) / 3) * integral of |Å|^3.
    pub cubic_rhs: f64,
    pub cubic_slack: f64,
    pub max_traceless_norm: f64,
    pub max_abs_mean: f64,
    pub gap: Option<GapCertificate>,
    pub convergence: Option<Convergence>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenusOptions {
    pub chi_tolerance: f64,
    /// Also evaluate on the doubled grid and record the relative change.
    pub refine: bool,
}

impl Default for GenusOptions {
    fn default() -> Self {
        GenusOptions { chi_tolerance: CHI_TOLERANCE, refine: true }
    }
}

/// Euler characteristic and genus from the total Gauss curvature.
pub fn detect_genus(total_k: f64, chi_tolerance: f64) -> Result<(i64, u32)> {
    let raw_chi = total_k / (2.0 * PI);
    let chi = raw_chi.round();
    let fail = Error::GenusDetectionFailure { raw_chi, tolerance: chi_tolerance };
    if !raw_chi.is_finite() || (raw_chi - chi).abs() >= chi_tolerance {
        return Err(fail);
    }
    let chi = chi as i64;
    if chi > 2 || chi % 2 != 0 {
        return Err(fail);
    }
    Ok((chi, ((2 - chi) / 2) as u32))
}

struct Integrals {
    area: f64,
    total_k: f64,
    integral_f: f64,
    integral_a3: f64,
    integral_full_a3: f64,
    max_traceless: f64,
    max_abs_mean: f64,
}

fn integrals(nodes: &NodeSet) -> Result<Integrals> {
    Ok(Integrals {
        area: nodes.integrate(|_| Ok(1.0))?,
        total_k: nodes.integrate(|n| Ok(n.curvature.gauss_k))?,
        integral_f: nodes.integrate(|n| f_pinch(n.curvature.traceless_norm))?,
        integral_a3: nodes.integrate(|n| Ok(n.curvature.traceless_norm.powi(3)))?,
        integral_full_a3: nodes.integrate(|n| Ok(n.curvature.norm_a().powi(3)))?,
        max_traceless: nodes.max_of(|n| n.curvature.traceless_norm),
        max_abs_mean: nodes.max_of(|n| n.curvature.mean.abs()),
    })
}

pub fn genus_report(surface: &dyn Surface, grid: &QuadratureGrid) -> Result<GenusReport> {
    genus_report_with(surface, grid, GenusOptions::default())
}

pub fn genus_report_with(
    surface: &dyn Surface,
    grid: &QuadratureGrid,
    options: GenusOptions,
) -> Result<GenusReport> {
    let nodes = NodeSet::evaluate(surface, grid)?;
    genus_report_from_nodes(surface, grid, &nodes, options)
}

/// Like [`genus_report_with`] but reuses already evaluated nodes on `grid`.
pub fn genus_report_from_nodes(
    surface: &dyn Surface,
    grid: &QuadratureGrid,
    nodes: &NodeSet,
    options: GenusOptions,
) -> Result<GenusReport> {
    let it = integrals(nodes)?;
    let (euler_char, genus) = detect_genus(it.total_k, options.chi_tolerance)?;

    let convergence = if options.refine && surface.refinable() {
        let fine_grid = grid.refined();
        let fine = integrals(&NodeSet::evaluate(surface, &fine_grid)?)?;
        Some(Convergence {
            refined_resolution: fine_grid.resolution(),
            rel_change_integral_f: relative_change_above(it.integral_f, fine.integral_f, F_SCALE),
            rel_change_total_k: relative_change_above(it.total_k, fine.total_k, K_SCALE),
        })
    } else {
        None
    };

    let gap = (it.max_abs_mean <= MINIMALITY_TOLERANCE).then(|| GapCertificate {
        integral_a3: it.integral_full_a3,
        threshold: gap_threshold(),
        below_threshold: it.integral_full_a3 < gap_threshold(),
        max_abs_mean: it.max_abs_mean,
    });

    let bound_lhs = 4.0 * PI * PI * genus as f64;
    let cubic_lhs = 2.0 * PI * PI * genus as f64;
    let cubic_rhs = SQRT_2 / 3.0 * it.integral_a3;
    Ok(GenusReport {
        resolution: nodes.resolution,
        area: it.area,
        total_k: it.total_k,
        euler_char,
        genus,
        integral_f: it.integral_f,
        integral_a3: it.integral_a3,
        bound_lhs,
        bound_rhs: it.integral_f,
        slack: it.integral_f - bound_lhs,
        cubic_lhs,
        cubic_rhs,
        cubic_slack: cubic_rhs - cubic_lhs,
        max_traceless_norm: it.max_traceless,
        max_abs_mean: it.max_abs_mean,
        gap,
        convergence,
    })
}

/// One row of a convergence probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeStep {
    pub resolution: (usize, usize),
    pub integral_f: f64,
    pub total_k: f64,
    pub area: f64,
    /// Relative change of the integral of f against the previous row.
    pub rel_change: Option<f64>,
}

pub const PROBE_TOLERANCE: f64 = 1e-9;
pub const PROBE_MAX_DOUBLINGS: usize = 4;

/// Integrals at successively doubled resolutions, until the integral of f
/// changes by less than [`PROBE_TOLERANCE`] or after [`PROBE_MAX_DOUBLINGS`].
pub fn convergence_probe(surface: &dyn Surface, base: &QuadratureGrid) -> Result<Vec<ProbeStep>> {
    let mut grid = base.clone();
    let mut steps: Vec<ProbeStep> = Vec::new();
    loop {
        let it = integrals(&NodeSet::evaluate(surface, &grid)?)?;
        let rel_change = steps.last().map(|prev| relative_change_above(prev.integral_f, it.integral_f, F_SCALE));
        steps.push(ProbeStep {
            resolution: grid.resolution(),
            integral_f: it.integral_f,
            total_k: it.total_k,
            area: it.area,
            rel_change,
        });
        let converged = rel_change.is_some_and(|r| r < PROBE_TOLERANCE);
        if converged || steps.len() > PROBE_MAX_DOUBLINGS || !surface.refinable() {
            return Ok(steps);
        }
        grid = grid.refined();
    }
}
