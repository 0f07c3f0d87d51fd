//! Scalar pinching functions and one-dimensional solves.
//!
//! The central object is
//!
//! ```text
//! f(t) = sqrt(2) t + (t^2 - 2) atan(t / sqrt(2)),
//! ```
//!
//! a strictly increasing convex function with f(0) = 0 whose integral over a
//! surface in S^3, evaluated at the traceless norm |Å|, bounds 4 pi^2 times
//! the genus. Alongside it live the Heintze-Karcher tube integrand, the
//! two-variable comparison function used to pass from principal curvatures to
//! |Å|, and the monotone equations for beta and for f^-1.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{solve_increasing, RootResult};

/// Volume of the unit 3-sphere, 2 pi^2.
pub const S3_VOLUME: f64 = 2.0 * PI * PI;

/// Below this t, f and the cubic gap are summed from their Taylor series; the
/// closed form loses all significant digits to cancellation as t -> 0.
const SERIES_CROSSOVER: f64 = 0.35;

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::domain(format!("{name} must be finite, got {x}")))
    }
}

fn nonneg(name: &str, x: f64) -> Result<f64> {
    finite(name, x)?;
    if x < 0.0 {
        return Err(Error::domain(format!("{name} must be >= 0, got {x}")));
    }
    Ok(x)
}

fn ordered(k1: f64, k2: f64) -> Result<()> {
    finite("k1", k1)?;
    finite("k2", k2)?;
    if k1 > k2 {
        return Err(Error::domain(format!("need k1 <= k2, got ({k1}, {k2})")));
    }
    Ok(())
}

/// Magnitude of the l-th series coefficient 8l / (4l^2 - 1).
fn series_coefficient(l: u32) -> f64 {
    let l = l as f64;
    8.0 * l / (4.0 * l * l - 1.0)
}

/// sum_{l >= first} (-1)^(l+1) c_l x^(2l+1), summed until terms stop mattering.
fn series_tail(x: f64, first: u32) -> f64 {
    let x2 = x * x;
    let mut power = x.powi(2 * first as i32 + 1);
    let mut sum = 0.0;
    for l in first..first + 40 {
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * series_coefficient(l) * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        power *= x2;
    }
    sum
}

/// The pinching function f(t) for t >= 0.
pub fn f_pinch(t: f64) -> Result<f64> {
    nonneg("t", t)?;
    if t < SERIES_CROSSOVER {
        return Ok(series_tail(t / SQRT_2, 1));
    }
    Ok(SQRT_2 * t + (t * t - 2.0) * (t / SQRT_2).atan())
}

/// f'(t) = 2 sqrt(2) t^2 / (2 + t^2) + 2 t atan(t / sqrt(2)).
pub fn f_derivative(t: f64) -> Result<f64> {
    nonneg("t", t)?;
    Ok(2.0 * SQRT_2 * t * t / (2.0 + t * t) + 2.0 * t * (t / SQRT_2).atan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the first omitted term.
    pub error_bound: f64,
}

/// Partial sum of the alternating power series of f with `terms` terms.
///
/// Only defined for t < sqrt(2), the radius of convergence of the underlying
/// arctangent expansion.
pub fn f_series(t: f64, terms: u32) -> Result<SeriesValue> {
    nonneg("t", t)?;
    if t >= SQRT_2 {
        return Err(Error::domain(format!("series diverges for t >= sqrt(2), got {t}")));
    }
    let x = t / SQRT_2;
    let x2 = x * x;
    let mut power = x * x2;
    let mut value = 0.0;
    for l in 1..=terms {
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        value += sign * series_coefficient(l) * power;
        power *= x2;
    }
    Ok(SeriesValue { value, error_bound: series_coefficient(terms + 1) * power })
}

/// Solves f(t) = y.
pub fn f_inverse(y: f64) -> Result<RootResult> {
    nonneg("y", y)?;
    solve_increasing(|t| f_pinch(t).unwrap_or(f64::NAN), |t| f_derivative(t).unwrap_or(f64::NAN), y)
}

/// Right side minus left side of the two-variable comparison
///
/// ```text
/// -(1 + k1 k2)(atan k2 - atan k1) <= 2(-1 + d^2) atan d,   d = (k2 - k1) / 2.
/// ```
///
/// Non-negative, and zero exactly when k1 = k2 or k1 = -k2.
pub fn pair_gap(k1: f64, k2: f64) -> Result<f64> {
    ordered(k1, k2)?;
    let d = 0.5 * (k2 - k1);
    let rhs = 2.0 * (d * d - 1.0) * d.atan();
    let lhs = -(1.0 + k1 * k2) * atan_difference(k1, k2);
    Ok(rhs - lhs)
}

/// The comparison in half-difference / half-sum coordinates:
/// F(t, s) = 2(t^2 - 1) atan t + (1 + s^2 - t^2)(atan(s + t) - atan(s - t)),
/// with k1 = s - t, k2 = s + t.
pub fn pair_gap_st(t: f64, s: f64) -> Result<f64> {
    nonneg("t", t)?;
    finite("s", s)?;
    let q = 1.0 + s * s - t * t;
    Ok(2.0 * (t * t - 1.0) * t.atan() + q * atan_spread(t, s))
}

/// atan(k2) - atan(k1) for k1 <= k2, without cancellation.
fn atan_difference(k1: f64, k2: f64) -> f64 {
    (k2 - k1).atan2(1.0 + k1 * k2)
}

/// atan(s + t) - atan(s - t) for t >= 0, without cancellation.
fn atan_spread(t: f64, s: f64) -> f64 {
    (2.0 * t).atan2(1.0 + s * s - t * t)
}

/// dF/ds.
pub fn pair_gap_ds(t: f64, s: f64) -> Result<f64> {
    nonneg("t", t)?;
    finite("s", s)?;
    let a = 1.0 + (t - s) * (t - s);
    let b = 1.0 + (t + s) * (t + s);
    // 1/b - 1/a = -4ts / (ab)
    Ok(2.0 * s * atan_spread(t, s) - (1.0 + s * s - t * t) * 4.0 * t * s / (a * b))
}

/// d^2F/dt ds = 32 t^2 s (1 + t^2 + s^2) / ((1 + (t - s)^2)^2 (1 + (t + s)^2)^2).
pub fn pair_gap_dtds(t: f64, s: f64) -> Result<f64> {
    nonneg("t", t)?;
    finite("s", s)?;
    let a = 1.0 + (t - s) * (t - s);
    let b = 1.0 + (t + s) * (t + s);
    Ok(32.0 * t * t * s * (1.0 + t * t + s * s) / (a * a * b * b))
}

/// 2 sqrt(2) t^3 / 3 - f(t): positive for t > 0.
pub fn cubic_gap(t: f64) -> Result<f64> {
    nonneg("t", t)?;
    if t < SERIES_CROSSOVER {
        // the leading series term is exactly the cubic
        return Ok(-series_tail(t / SQRT_2, 2));
    }
    Ok(2.0 * SQRT_2 * t * t * t / 3.0 - f_pinch(t)?)
}

/// Arccotangent on the branch (0, pi): acot(x) = pi/2 - atan(x).
pub fn acot(x: f64) -> f64 {
    FRAC_PI_2 - x.atan()
}

/// Jacobian of the normal exponential map at distance t along a normal
/// geodesic, for a point with principal curvatures k1, k2.
pub fn hk_integrand(k1: f64, k2: f64, t: f64) -> Result<f64> {
    finite("k1", k1)?;
    finite("k2", k2)?;
    finite("t", t)?;
    let (s, c) = t.sin_cos();
    Ok((c - k1 * s) * (c - k2 * s))
}

/// Integral of [`hk_integrand`] from 0 to the focal time acot(k2), in closed
/// form: (-k1 + (1 + k1 k2) acot(k2)) / 2.
pub fn hk_time_integral(k1: f64, k2: f64) -> Result<f64> {
    ordered(k1, k2)?;
    Ok(0.5 * (-k1 + (1.0 + k1 * k2) * acot(k2)))
}

/// k2 - k1 - (1 + k1 k2)(atan k2 - atan k1).
pub fn genus_integrand(k1: f64, k2: f64) -> Result<f64> {
    ordered(k1, k2)?;
    Ok(k2 - k1 - (1.0 + k1 * k2) * atan_difference(k1, k2))
}

/// beta + (beta^2 - 1) atan(beta).
pub fn beta_map(beta: f64) -> f64 {
    beta + (beta * beta - 1.0) * beta.atan()
}

fn beta_map_derivative(beta: f64) -> f64 {
    2.0 * beta * beta.atan() + 2.0 * beta * beta / (1.0 + beta * beta)
}

/// Unique root beta >= 0 of beta + (beta^2 - 1) atan(beta) = 2 g0 pi^2 / area.
pub fn beta_solve(g0: u32, area: f64) -> Result<RootResult> {
    if g0 == 0 {
        return Err(Error::domain("g0 must be a positive integer"));
    }
    finite("area", area)?;
    if area <= 0.0 {
        return Err(Error::domain(format!("area must be > 0, got {area}")));
    }
    let rhs = 2.0 * g0 as f64 * PI * PI / area;
    solve_increasing(beta_map, beta_map_derivative, rhs)
}

/// floor((g + 3) / 2)
pub fn improved_genus_factor(g: u32) -> u32 {
    (g + 3) / 2
}

/// Lower bound on max |A| for a minimal surface of genus g >= 1 in an ambient
/// space of the given volume: f^-1((2 pi^2 (g - 1) + |M|) / (4 pi floor((g+3)/2))).
pub fn min_surface_max_a_bound(g: u32, ambient_volume: f64) -> Result<RootResult> {
    if g == 0 {
        return Err(Error::domain("genus must be >= 1"));
    }
    check_ambient(ambient_volume)?;
    let arg = (2.0 * PI * PI * (g as f64 - 1.0) + ambient_volume)
        / (4.0 * PI * improved_genus_factor(g) as f64);
    f_inverse(arg)
}

fn check_ambient(ambient_volume: f64) -> Result<()> {
    finite("ambient volume", ambient_volume)?;
    // volume comparison caps |M| at |S^3|; allow rounding in 2 pi^2 inputs
    if ambient_volume <= 0.0 || ambient_volume > S3_VOLUME * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "ambient volume must lie in (0, 2 pi^2], got {ambient_volume}"
        )));
    }
    Ok(())
}

/// 16 pi - 4 |M| / pi + (2 / pi) * integral of f(|Å|).
pub fn eigenvalue_bound_rhs(integral_f: f64, ambient_volume: f64) -> Result<f64> {
    nonneg("integral of f", integral_f)?;
    check_ambient(ambient_volume)?;
    Ok(16.0 * PI - 4.0 * ambient_volume / PI + 2.0 / PI * integral_f)
}

/// 8 pi (g + 1).
pub fn yang_yau_bound(g: u32) -> f64 {
    8.0 * PI * (g as f64 + 1.0)
}

/// 8 pi floor((g + 3) / 2).
pub fn improved_eigenvalue_bound(g: u32) -> f64 {
    8.0 * PI * improved_genus_factor(g) as f64
}

/// 3 sqrt(2) pi^2: minimal surfaces with smaller total |A|^3 are equators.
pub fn gap_threshold() -> f64 {
    3.0 * SQRT_2 * PI * PI
}
