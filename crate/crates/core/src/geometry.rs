//! Pointwise extrinsic geometry of a surface immersed in the unit 3-sphere.
//!
//! A surface point carries its position in R^4 together with first and second
//! partials of the immersion. From those we build the unit normal (tangent to
//! S^3 and orthogonal to the surface), the first and second fundamental forms,
//! and the principal curvatures. Gauss curvature follows from the Gauss
//! equation in a space form of curvature 1: K = 1 + k1 k2.

use nalgebra::{Matrix3, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Vec4 = Vector4<f64>;

/// Relative threshold on EG - F^2 below which a metric is degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-12;

/// Principal curvatures closer than this are reported as an umbilic.
pub const UMBILIC_TOLERANCE: f64 = 1e-10;

/// Immersion data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub u: f64,
    pub v: f64,
    pub position: Vec4,
    pub du: Vec4,
    pub dv: Vec4,
    pub duu: Vec4,
    pub duv: Vec4,
    pub dvv: Vec4,
}

impl SurfacePoint {
    /// Largest violation of |x| = 1 and of tangency of the first partials to S^3.
    pub fn sphere_defect(&self) -> (f64, f64) {
        let norm = (self.position.norm() - 1.0).abs();
        let tangency = self.position.dot(&self.du).abs().max(self.position.dot(&self.dv).abs());
        (norm, tangency)
    }
}

/// First fundamental form coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metric {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl Metric {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    /// Area density sqrt(EG - F^2).
    pub fn area_element(&self) -> f64 {
        self.det().max(0.0).sqrt()
    }
}

/// Unit normal and metric at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub normal: Vec4,
    pub metric: Metric,
}

/// Pointwise curvature quantities with respect to the frame normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureData {
    pub k1: f64,
    pub k2: f64,
    /// Normalized mean curvature (k1 + k2) / 2.
    pub mean: f64,
    /// |Å| = (k2 - k1) / sqrt(2).
    pub traceless_norm: f64,
    /// Intrinsic curvature 1 + k1 k2.
    pub gauss_k: f64,
    #[serde(skip)]
    pub normal: Vec4,
}

impl CurvatureData {
    pub fn from_principal(k1: f64, k2: f64, normal: Vec4) -> Self {
        let (mut k1, mut k2) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        if k2 - k1 < UMBILIC_TOLERANCE {
            let h = 0.5 * (k1 + k2);
            k1 = h;
            k2 = h;
        }
        CurvatureData {
            k1,
            k2,
            mean: 0.5 * (k1 + k2),
            traceless_norm: (k2 - k1) / std::f64::consts::SQRT_2,
            gauss_k: 1.0 + k1 * k2,
            normal,
        }
    }

    /// |A|^2 = k1^2 + k2^2.
    pub fn norm_a_sq(&self) -> f64 {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    pub fn norm_a(&self) -> f64 {
        self.norm_a_sq().sqrt()
    }

    /// The same data seen from the opposite normal.
    pub fn flipped(&self) -> Self {
        CurvatureData::from_principal(-self.k2, -self.k1, -self.normal)
    }
}

/// 4-dimensional generalized cross product: the vector n with
/// <n, w> = det(a, b, c, w) for all w.
pub fn cross4(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        Matrix3::new(
            a[cols[0]], a[cols[1]], a[cols[2]],
            b[cols[0]], b[cols[1]], b[cols[2]],
            c[cols[0]], c[cols[1]], c[cols[2]],
        )
        .determinant()
    };
    // cofactor of the last row: (-1)^(4 + i) with 1-based i
    Vec4::new(-minor(0), minor(1), -minor(2), minor(3))
}

/// Unit normal and metric. The normal is the normalized cross product of
/// (position, du, dv), so (position, du, dv, normal) is positively oriented.
pub fn tangent_normal_frame(p: &SurfacePoint) -> Result<Frame> {
    let metric = Metric {
        e: p.du.dot(&p.du),
        f: p.du.dot(&p.dv),
        g: p.dv.dot(&p.dv),
    };
    let eg = metric.e * metric.g;
    let det = metric.det();
    if !(det > DEGENERACY_RATIO * eg) {
        return Err(Error::DegenerateMetric { u: p.u, v: p.v, det, eg });
    }
    let n = cross4(&p.position, &p.du, &p.dv);
    let len = n.norm();
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::DegenerateMetric { u: p.u, v: p.v, det, eg });
    }
    Ok(Frame { normal: n / len, metric })
}

/// Second fundamental form coefficients (e, f, g) against the frame normal.
pub fn second_fundamental_form(p: &SurfacePoint, frame: &Frame) -> Metric {
    Metric {
        e: p.duu.dot(&frame.normal),
        f: p.duv.dot(&frame.normal),
        g: p.dvv.dot(&frame.normal),
    }
}

/// Principal curvatures and derived quantities at a point.
///
/// The shape operator is expressed in the orthonormal tangent basis obtained
/// by Gram-Schmidt on (du, dv), which makes it symmetric; its eigenvalues are
/// then computed with `hypot` so near-umbilic points stay accurate.
pub fn curvature_at(p: &SurfacePoint) -> Result<CurvatureData> {
    let frame = tangent_normal_frame(p)?;
    let first = frame.metric;
    let second = second_fundamental_form(p, &frame);

    // e1 = alpha du, e2 = beta dv + gamma du
    let alpha = 1.0 / first.e.sqrt();
    let beta = (first.e / first.det()).sqrt();
    let gamma = -first.f / first.e * beta;

    let s11 = alpha * alpha * second.e;
    let s12 = alpha * (beta * second.f + gamma * second.e);
    let s22 = beta * beta * second.g + 2.0 * beta * gamma * second.f + gamma * gamma * second.e;

    let mid = 0.5 * (s11 + s22);
    let rad = (0.5 * (s11 - s22)).hypot(s12);
    Ok(CurvatureData::from_principal(mid - rad, mid + rad, frame.normal))
}
