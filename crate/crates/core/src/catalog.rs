//! Exact surfaces in S^3 used as ground truth.
//!
//! * geodesic spheres of radius r about the pole e4 (umbilic, curvature cot r),
//! * flat tori {x1^2 + x2^2 = a^2, x3^2 + x4^2 = b^2}, the Clifford torus at
//!   a = b = 1/sqrt(2),
//! * perturbed spheres, graphs rho = r + eps * Y_lm over the unit 2-sphere in
//!   geodesic polar coordinates about e4.
//!
//! Every surface has analytic partials and a classifier for the two regions it
//! bounds. Side one is always the region the frame normal points into.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{tangent_normal_frame, SurfacePoint, Vec4};
use crate::pinch::S3_VOLUME;
use crate::quadrature::{pairwise_sum, QuadratureGrid};
use crate::surface::{Domain, Interval, Surface};

pub const MIN_RADIUS: f64 = 1e-3;
pub const MAX_PERTURBATION: f64 = 0.3;
pub const MAX_DEGREE: u32 = 16;
/// Resolution used for the probe and volume quadratures of perturbed spheres.
const PERTURBED_QUADRATURE: usize = 128;
/// Parameters this close to 1/sqrt(2) or pi/2 count as the minimal members.
const MINIMAL_PARAMETER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// The region the frame normal points into.
    One,
    Two,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeSource {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    /// Zero for closed forms; quadrature error is below 1e-12 for catalog surfaces.
    pub stderr: f64,
    pub source: VolumeSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SurfaceKind {
    GeodesicSphere { r: f64 },
    FlatTorus { a: f64 },
    PerturbedSphere { r: f64, eps: f64, l: u32, m: i32 },
}

/// Closed-form data, where known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactData {
    pub genus: u32,
    pub area: Option<f64>,
    /// Volumes of side one and side two.
    pub side_volumes: [VolumeEstimate; 2],
    /// Constant principal curvatures (k1, k2) against the frame normal.
    pub principal: Option<(f64, f64)>,
    pub traceless_norm: Option<f64>,
    /// Constant intrinsic curvature.
    pub gauss_k: Option<f64>,
    /// First nonzero Laplace eigenvalue of the induced metric.
    pub lambda1: Option<f64>,
}

/// Real spherical harmonic with unit L^2 norm on the round 2-sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealHarmonic {
    l: u32,
    m: i32,
    norm: f64,
}

/// Value and partials up to second order in (theta, phi).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub d_theta: f64,
    pub d_phi: f64,
    pub d_theta2: f64,
    pub d_theta_phi: f64,
    pub d_phi2: f64,
}

impl RealHarmonic {
    pub fn new(l: u32, m: i32) -> Result<Self> {
        if l > MAX_DEGREE {
            return Err(Error::domain(format!("harmonic degree {l} exceeds {MAX_DEGREE}")));
        }
        if m.unsigned_abs() > l {
            return Err(Error::domain(format!("need |m| <= l, got l={l}, m={m}")));
        }
        let am = m.unsigned_abs();
        // (l - m)! / (l + m)!
        let ratio: f64 = ((l - am + 1)..=(l + am)).map(|k| 1.0 / k as f64).product();
        let mut norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
        if m != 0 {
            norm *= SQRT_2;
        }
        Ok(RealHarmonic { l, m, norm })
    }

    /// (P_l^m(x), P_{l-1}^m(x)) without the Condon-Shortley phase.
    fn legendre(&self, x: f64) -> (f64, f64) {
        let m = self.m.unsigned_abs();
        let s = (1.0 - x * x).max(0.0).sqrt();
        let mut pmm = 1.0;
        for k in 1..=m {
            pmm *= (2 * k - 1) as f64 * s;
        }
        if self.l == m {
            return (pmm, 0.0);
        }
        let mut prev = pmm;
        let mut cur = x * (2 * m + 1) as f64 * pmm;
        for l in (m + 2)..=self.l {
            let next = ((2 * l - 1) as f64 * x * cur - (l + m - 1) as f64 * prev) / (l - m) as f64;
            prev = cur;
            cur = next;
        }
        (cur, prev)
    }

    pub fn jet(&self, theta: f64, phi: f64) -> Jet {
        let (l, m) = (self.l as f64, self.m.unsigned_abs() as f64);
        let (sin_t, cos_t) = theta.sin_cos();
        let (p, p_prev) = self.legendre(cos_t);
        // (1 - x^2) P'(x) = (l + m) P_{l-1} - l x P_l, and d/dtheta = -sin(theta) d/dx
        let p_t = -((l + m) * p_prev - l * cos_t * p) / sin_t;
        let p_tt = -cos_t / sin_t * p_t - (l * (l + 1.0) - m * m / (sin_t * sin_t)) * p;

        let (ang, ang_p, ang_pp) = match self.m {
            0 => (1.0, 0.0, 0.0),
            k if k > 0 => {
                let (s, c) = (m * phi).sin_cos();
                (c, -m * s, -m * m * c)
            }
            _ => {
                let (s, c) = (m * phi).sin_cos();
                (s, m * c, -m * m * s)
            }
        };
        let n = self.norm;
        Jet {
            value: n * p * ang,
            d_theta: n * p_t * ang,
            d_phi: n * p * ang_p,
            d_theta2: n * p_tt * ang,
            d_theta_phi: n * p_t * ang_p,
            d_phi2: n * p * ang_pp,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogSurface {
    kind: SurfaceKind,
    harmonic: Option<RealHarmonic>,
    exact: ExactData,
}

fn closed(value: f64) -> VolumeEstimate {
    VolumeEstimate { value, stderr: 0.0, source: VolumeSource::ClosedForm }
}

fn check_radius(r: f64) -> Result<()> {
    if !r.is_finite() || !(MIN_RADIUS..=PI - MIN_RADIUS).contains(&r) {
        return Err(Error::domain(format!("sphere radius must lie in [{MIN_RADIUS}, pi - {MIN_RADIUS}], got {r}")));
    }
    Ok(())
}

fn sphere_domain() -> Domain {
    Domain { u: Interval::open(0.0, PI), v: Interval::periodic(0.0, TAU) }
}

/// Unit vector of the round 2-sphere in the first three coordinates.
fn omega(theta: f64, phi: f64) -> [Vec4; 6] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        Vec4::new(st * cp, st * sp, ct, 0.0),
        Vec4::new(ct * cp, ct * sp, -st, 0.0),
        Vec4::new(-st * sp, st * cp, 0.0, 0.0),
        Vec4::new(-st * cp, -st * sp, -ct, 0.0),
        Vec4::new(-ct * sp, ct * cp, 0.0, 0.0),
        Vec4::new(-st * cp, -st * sp, 0.0, 0.0),
    ]
}

/// Surface at geodesic distance rho(theta, phi) from the pole e4.
fn polar_graph(theta: f64, phi: f64, rho: Jet) -> SurfacePoint {
    let [w, w_t, w_p, w_tt, w_tp, w_pp] = omega(theta, phi);
    let e4 = Vec4::w();
    let (s, c) = rho.value.sin_cos();
    let x = e4 * c + w * s;
    // derivative of x along increasing rho
    let radial = e4 * (-s) + w * c;
    let du = radial * rho.d_theta + w_t * s;
    let dv = radial * rho.d_phi + w_p * s;
    let second = |r_ab: f64, r_a: f64, r_b: f64, w_a: &Vec4, w_b: &Vec4, w_ab: &Vec4| {
        radial * r_ab - x * (r_a * r_b) + (w_b * r_a + w_a * r_b) * c + w_ab * s
    };
    SurfacePoint {
        u: theta,
        v: phi,
        position: x,
        du,
        dv,
        duu: second(rho.d_theta2, rho.d_theta, rho.d_theta, &w_t, &w_t, &w_tt),
        duv: second(rho.d_theta_phi, rho.d_theta, rho.d_phi, &w_t, &w_p, &w_tp),
        dvv: second(rho.d_phi2, rho.d_phi, rho.d_phi, &w_p, &w_p, &w_pp),
    }
}

impl CatalogSurface {
    /// Distance sphere of radius r about e4.
    pub fn geodesic_sphere(r: f64) -> Result<Self> {
        check_radius(r)?;
        let ball = PI * (2.0 * r - (2.0 * r).sin());
        let sin2 = r.sin().powi(2);
        let k = 1.0 / r.tan();
        Ok(CatalogSurface {
            kind: SurfaceKind::GeodesicSphere { r },
            harmonic: None,
            exact: ExactData {
                genus: 0,
                area: Some(4.0 * PI * sin2),
                side_volumes: [closed(ball), closed(S3_VOLUME - ball)],
                principal: Some((k, k)),
                traceless_norm: Some(0.0),
                gauss_k: Some(1.0 / sin2),
                lambda1: Some(2.0 / sin2),
            },
        })
    }

    pub fn equator() -> Self {
        Self::geodesic_sphere(FRAC_PI_2).expect("pi/2 is a valid radius")
    }

    /// Flat torus (a cos u, a sin u, b cos v, b sin v), b = sqrt(1 - a^2).
    pub fn flat_torus(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 || a >= 1.0 {
            return Err(Error::domain(format!("torus parameter a must lie in (0, 1), got {a}")));
        }
        let b = (1.0 - a * a).sqrt();
        Ok(CatalogSurface {
            kind: SurfaceKind::FlatTorus { a },
            harmonic: None,
            exact: ExactData {
                genus: 1,
                area: Some(4.0 * PI * PI * a * b),
                // side one is {x1^2 + x2^2 > a^2}
                side_volumes: [closed(S3_VOLUME * b * b), closed(S3_VOLUME * a * a)],
                principal: Some((-b / a, a / b)),
                traceless_norm: Some(1.0 / (SQRT_2 * a * b)),
                gauss_k: Some(0.0),
                lambda1: Some(1.0 / a.max(b).powi(2)),
            },
        })
    }

    pub fn clifford() -> Self {
        Self::flat_torus(FRAC_1_SQRT_2).expect("1/sqrt(2) is a valid parameter")
    }

    /// Graph rho = r + eps * Y_lm in geodesic polar coordinates about e4.
    pub fn perturbed_sphere(r: f64, eps: f64, l: u32, m: i32) -> Result<Self> {
        check_radius(r)?;
        if !eps.is_finite() || eps.abs() > MAX_PERTURBATION {
            return Err(Error::domain(format!("|eps| must be <= {MAX_PERTURBATION}, got {eps}")));
        }
        let harmonic = RealHarmonic::new(l, m)?;
        let mut surface = CatalogSurface {
            kind: SurfaceKind::PerturbedSphere { r, eps, l, m },
            harmonic: Some(harmonic),
            exact: ExactData {
                genus: 0,
                area: None,
                side_volumes: [closed(0.0), closed(0.0)],
                principal: None,
                traceless_norm: None,
                gauss_k: None,
                lambda1: None,
            },
        };
        if eps == 0.0 {
            let sphere = Self::geodesic_sphere(r)?;
            surface.exact = sphere.exact;
            surface.exact.lambda1 = None;
            return Ok(surface);
        }

        let grid = QuadratureGrid::for_domain(&sphere_domain(), (PERTURBED_QUADRATURE, PERTURBED_QUADRATURE))?;
        let mut ball_terms = Vec::with_capacity(grid.u.len() * grid.v.len());
        for (i, &theta) in grid.u.nodes.iter().enumerate() {
            for (j, &phi) in grid.v.nodes.iter().enumerate() {
                let rho = surface.radius(theta, phi);
                if !(rho > 0.0 && rho < PI) {
                    return Err(Error::ImmersionFailure {
                        u: theta,
                        v: phi,
                        reason: format!("radial function {rho} leaves (0, pi)"),
                    });
                }
                let p = surface.point(theta, phi)?;
                tangent_normal_frame(&p).map_err(|e| Error::ImmersionFailure {
                    u: theta,
                    v: phi,
                    reason: e.to_string(),
                })?;
                // integral of sin^2 from 0 to rho, times the round area element
                ball_terms.push(grid.weight(i, j) * theta.sin() * (0.5 * rho - 0.25 * (2.0 * rho).sin()));
            }
        }
        let ball = pairwise_sum(&ball_terms);
        let quad = |value| VolumeEstimate { value, stderr: 0.0, source: VolumeSource::Quadrature };
        surface.exact.side_volumes = [quad(ball), quad(S3_VOLUME - ball)];
        Ok(surface)
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn exact(&self) -> &ExactData {
        &self.exact
    }

    /// Clifford torus or equator.
    pub fn is_minimal(&self) -> bool {
        match self.kind {
            SurfaceKind::GeodesicSphere { r } => (r - FRAC_PI_2).abs() < MINIMAL_PARAMETER_TOLERANCE,
            SurfaceKind::FlatTorus { a } => (a - FRAC_1_SQRT_2).abs() < MINIMAL_PARAMETER_TOLERANCE,
            SurfaceKind::PerturbedSphere { .. } => false,
        }
    }

    /// Surfaces for which the genus bound is an equality: geodesic spheres and
    /// the Clifford torus.
    pub fn is_equality_case(&self) -> bool {
        match self.kind {
            SurfaceKind::GeodesicSphere { .. } => true,
            SurfaceKind::FlatTorus { .. } => self.is_minimal(),
            SurfaceKind::PerturbedSphere { eps, .. } => eps == 0.0,
        }
    }

    /// Radial function of sphere-type surfaces.
    fn radius_jet(&self, theta: f64, phi: f64) -> Jet {
        match (self.kind, self.harmonic) {
            (SurfaceKind::GeodesicSphere { r }, _) => Jet { value: r, ..Jet::default() },
            (SurfaceKind::PerturbedSphere { r, eps, .. }, Some(h)) => {
                let y = h.jet(theta, phi);
                Jet {
                    value: r + eps * y.value,
                    d_theta: eps * y.d_theta,
                    d_phi: eps * y.d_phi,
                    d_theta2: eps * y.d_theta2,
                    d_theta_phi: eps * y.d_theta_phi,
                    d_phi2: eps * y.d_phi2,
                }
            }
            _ => unreachable!("radius requested for a torus"),
        }
    }

    fn radius(&self, theta: f64, phi: f64) -> f64 {
        self.radius_jet(theta, phi).value
    }

    /// Which region a point of S^3 lies in.
    pub fn side_of(&self, x: &Vec4) -> Side {
        match self.kind {
            SurfaceKind::FlatTorus { a } => {
                if x[0] * x[0] + x[1] * x[1] > a * a {
                    Side::One
                } else {
                    Side::Two
                }
            }
            _ => {
                let horizontal = x.xyz().norm();
                let distance = horizontal.atan2(x[3]);
                let rho = if horizontal == 0.0 {
                    self.radius(0.0, 0.0)
                } else {
                    let theta = (x[2] / horizontal).clamp(-1.0, 1.0).acos();
                    self.radius(theta, x[1].atan2(x[0]))
                };
                if distance < rho {
                    Side::One
                } else {
                    Side::Two
                }
            }
        }
    }
}

impl Surface for CatalogSurface {
    fn label(&self) -> String {
        self.to_string()
    }

    fn domain(&self) -> Domain {
        match self.kind {
            SurfaceKind::FlatTorus { .. } => {
                Domain { u: Interval::periodic(0.0, TAU), v: Interval::periodic(0.0, TAU) }
            }
            _ => sphere_domain(),
        }
    }

    fn point(&self, u: f64, v: f64) -> Result<SurfacePoint> {
        match self.kind {
            SurfaceKind::FlatTorus { a } => {
                let b = (1.0 - a * a).sqrt();
                let (su, cu) = u.sin_cos();
                let (sv, cv) = v.sin_cos();
                Ok(SurfacePoint {
                    u,
                    v,
                    position: Vec4::new(a * cu, a * su, b * cv, b * sv),
                    du: Vec4::new(-a * su, a * cu, 0.0, 0.0),
                    dv: Vec4::new(0.0, 0.0, -b * sv, b * cv),
                    duu: Vec4::new(-a * cu, -a * su, 0.0, 0.0),
                    duv: Vec4::zeros(),
                    dvv: Vec4::new(0.0, 0.0, -b * cv, -b * sv),
                })
            }
            _ => Ok(polar_graph(u, v, self.radius_jet(u, v))),
        }
    }
}

impl fmt::Display for CatalogSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SurfaceKind::GeodesicSphere { r } => write!(f, "sphere:r={r}"),
            SurfaceKind::FlatTorus { a } => write!(f, "torus:a={a}"),
            SurfaceKind::PerturbedSphere { r, eps, l, m } => write!(f, "psphere:r={r},eps={eps},l={l},m={m}"),
        }
    }
}

fn parse_params(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("expected key=value, got `{kv}`")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn take<T: FromStr>(params: &[(String, String)], key: &str, default: Option<T>) -> Result<T> {
    match params.iter().find(|(k, _)| k == key) {
        Some((_, v)) => v.parse().map_err(|_| Error::domain(format!("cannot parse {key}=`{v}`"))),
        None => default.ok_or_else(|| Error::domain(format!("missing parameter `{key}`"))),
    }
}

impl FromStr for CatalogSurface {
    type Err = Error;

    /// `sphere:r=<r>`, `torus:a=<a>`, `psphere:r=<r>,eps=<eps>,l=<l>,m=<m>`,
    /// or the aliases `equator` and `clifford`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (family, body) = spec.split_once(':').unwrap_or((spec, ""));
        let params = parse_params(body)?;
        let allowed: &[&str] = match family {
            "sphere" => &["r"],
            "torus" => &["a"],
            "psphere" => &["r", "eps", "l", "m"],
            "equator" | "clifford" => &[],
            other => return Err(Error::domain(format!("unknown surface family `{other}`"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::domain(format!("unknown parameter `{k}` for `{family}`")));
        }
        match family {
            "sphere" => Self::geodesic_sphere(take(&params, "r", None)?),
            "torus" => Self::flat_torus(take(&params, "a", None)?),
            "psphere" => Self::perturbed_sphere(
                take(&params, "r", None)?,
                take(&params, "eps", None)?,
                take(&params, "l", None)?,
                take(&params, "m", Some(0))?,
            ),
            "equator" => Ok(Self::equator()),
            _ => Ok(Self::clifford()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvature_at;
    use crate::quadrature::integrate;

    #[test]
    fn parse_surface_strings() {
        let s: CatalogSurface = "sphere:r=0.7853981634".parse().unwrap();
        assert!(matches!(s.kind(), SurfaceKind::GeodesicSphere { .. }));
        let t: CatalogSurface = "torus:a=0.7071067812".parse().unwrap();
        assert!(t.is_minimal());
        let p: CatalogSurface = "psphere:r=1.0,eps=0.1,l=2,m=0".parse().unwrap();
        assert!(!p.is_minimal());
        assert!("torus:a=1.5".parse::<CatalogSurface>().is_err());
        assert!("torus:b=0.5".parse::<CatalogSurface>().is_err());
        assert!("cube:s=1".parse::<CatalogSurface>().is_err());
        assert!("sphere:r=abc".parse::<CatalogSurface>().is_err());
        assert!("sphere:r=0.0001".parse::<CatalogSurface>().is_err());
        assert!("psphere:r=1,eps=0.5,l=2,m=0".parse::<CatalogSurface>().is_err());
        assert!("psphere:r=1,eps=0.1,l=2,m=3".parse::<CatalogSurface>().is_err());
        assert!("equator".parse::<CatalogSurface>().unwrap().is_minimal());
        assert_eq!(s.to_string().parse::<CatalogSurface>().unwrap(), s);
    }

    #[test]
    fn exact_sphere_values() {
        let e = CatalogSurface::equator();
        let x = e.exact();
        assert!((x.area.unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((x.side_volumes[0].value - PI * PI).abs() < 1e-13);
        assert!((x.lambda1.unwrap() * x.area.unwrap() - 8.0 * PI).abs() < 1e-13);
        let q = CatalogSurface::geodesic_sphere(PI / 4.0).unwrap();
        let x = q.exact();
        assert!((x.principal.unwrap().0 - 1.0).abs() < 1e-15);
        assert!((x.area.unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((x.side_volumes[0].value - PI * (PI / 2.0 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn exact_torus_values() {
        let c = CatalogSurface::clifford();
        let x = c.exact();
        assert!((x.area.unwrap() - S3_VOLUME).abs() < 1e-13);
        assert!((x.traceless_norm.unwrap() - SQRT_2).abs() < 1e-14);
        assert!((x.side_volumes[0].value - PI * PI).abs() < 1e-13);
        assert!((x.side_volumes[1].value - PI * PI).abs() < 1e-13);
        let t = CatalogSurface::flat_torus(0.6).unwrap();
        let x = t.exact();
        assert!((x.area.unwrap() - 4.0 * PI * PI * 0.48).abs() < 1e-13);
        assert!((x.traceless_norm.unwrap() - 1.0 / (SQRT_2 * 0.48)).abs() < 1e-14);
        assert!((x.side_volumes[0].value + x.side_volumes[1].value - S3_VOLUME).abs() < 1e-13);
    }

    #[test]
    fn harmonics_are_orthonormal() {
        let d = sphere_domain();
        let grid = QuadratureGrid::for_domain(&d, (64, 32)).unwrap();
        let pairs = [(0, 0), (2, 0), (3, 1), (3, -2), (4, 4)];
        for &(l1, m1) in &pairs {
            for &(l2, m2) in &pairs {
                let (h1, h2) = (RealHarmonic::new(l1, m1).unwrap(), RealHarmonic::new(l2, m2).unwrap());
                let mut terms = Vec::new();
                for (i, &t) in grid.u.nodes.iter().enumerate() {
                    for (j, &p) in grid.v.nodes.iter().enumerate() {
                        terms.push(grid.weight(i, j) * t.sin() * h1.jet(t, p).value * h2.jet(t, p).value);
                    }
                }
                let expected = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                let got = pairwise_sum(&terms);
                assert!((got - expected).abs() < 1e-12, "({l1},{m1}) ({l2},{m2}) {got}");
            }
        }
    }

    #[test]
    fn harmonic_derivatives_match_differences() {
        let h = RealHarmonic::new(3, 1).unwrap();
        let (t, p, d) = (0.9, 2.1, 1e-5);
        let j = h.jet(t, p);
        let fd_t = (h.jet(t + d, p).value - h.jet(t - d, p).value) / (2.0 * d);
        let fd_p = (h.jet(t, p + d).value - h.jet(t, p - d).value) / (2.0 * d);
        let fd_tt = (h.jet(t + d, p).d_theta - h.jet(t - d, p).d_theta) / (2.0 * d);
        let fd_tp = (h.jet(t, p + d).d_theta - h.jet(t, p - d).d_theta) / (2.0 * d);
        let fd_pp = (h.jet(t, p + d).d_phi - h.jet(t, p - d).d_phi) / (2.0 * d);
        for (a, b) in [(j.d_theta, fd_t), (j.d_phi, fd_p), (j.d_theta2, fd_tt), (j.d_theta_phi, fd_tp), (j.d_phi2, fd_pp)] {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn analytic_partials_match_differences() {
        let s = CatalogSurface::perturbed_sphere(1.0, 0.2, 3, 1).unwrap();
        let (u, v, d) = (1.2, 0.7, 1e-5);
        let p = s.point(u, v).unwrap();
        let fd = |f: &dyn Fn(&SurfacePoint) -> Vec4, du: f64, dv: f64| {
            (f(&s.point(u + du, v + dv).unwrap()) - f(&s.point(u - du, v - dv).unwrap())) / (2.0 * d)
        };
        assert!((p.du - fd(&|q| q.position, d, 0.0)).norm() < 1e-8);
        assert!((p.dv - fd(&|q| q.position, 0.0, d)).norm() < 1e-8);
        assert!((p.duu - fd(&|q| q.du, d, 0.0)).norm() < 1e-8);
        assert!((p.duv - fd(&|q| q.du, 0.0, d)).norm() < 1e-8);
        assert!((p.dvv - fd(&|q| q.dv, 0.0, d)).norm() < 1e-8);
    }

    #[test]
    fn zero_perturbation_is_the_sphere() {
        let p = CatalogSurface::perturbed_sphere(PI / 3.0, 0.0, 2, 0).unwrap();
        let s = CatalogSurface::geodesic_sphere(PI / 3.0).unwrap();
        for &(u, v) in &[(0.1, 0.2), (1.5, 3.0), (3.0, 6.0)] {
            assert_eq!(p.point(u, v).unwrap(), s.point(u, v).unwrap());
        }
    }

    #[test]
    fn normal_points_into_side_one() {
        let surfaces = [
            CatalogSurface::geodesic_sphere(0.4).unwrap(),
            CatalogSurface::geodesic_sphere(2.5).unwrap(),
            CatalogSurface::flat_torus(0.3).unwrap(),
            CatalogSurface::clifford(),
            CatalogSurface::perturbed_sphere(1.0, 0.25, 2, -1).unwrap(),
        ];
        for s in &surfaces {
            for &(u, v) in &[(0.3, 0.2), (1.7, 4.0), (2.9, 5.5)] {
                let p = s.point(u, v).unwrap();
                let n = tangent_normal_frame(&p).unwrap().normal;
                let t: f64 = 1e-4;
                let inside = p.position * t.cos() + n * t.sin();
                let outside = p.position * t.cos() - n * t.sin();
                assert_eq!(s.side_of(&inside), Side::One, "{s}");
                assert_eq!(s.side_of(&outside), Side::Two, "{s}");
            }
        }
    }

    #[test]
    fn sphere_curvature_sign() {
        let r = PI / 3.0;
        let s = CatalogSurface::geodesic_sphere(r).unwrap();
        let c = curvature_at(&s.point(1.0, 2.0).unwrap()).unwrap();
        assert!((c.k1 - 1.0 / r.tan()).abs() < 1e-12);
        assert!((c.k2 - 1.0 / r.tan()).abs() < 1e-12);
    }

    #[test]
    fn perturbed_volume_matches_area_integral_shape() {
        // ball volume by quadrature agrees with the closed form at eps -> 0
        let p = CatalogSurface::perturbed_sphere(1.0, 1e-12, 2, 0).unwrap();
        let ball = PI * (2.0 - 2f64.sin());
        assert!((p.exact().side_volumes[0].value - ball).abs() < 1e-10);
        let area = integrate(&p, &p.grid((64, 64)).unwrap(), |_, _| 1.0).unwrap();
        assert!((area - 4.0 * PI * 1f64.sin().powi(2)).abs() < 1e-9);
    }
}
