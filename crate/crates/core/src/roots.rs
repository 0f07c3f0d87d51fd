//! Root solves for strictly increasing functions on [0, inf).

use serde::Serialize;

use crate::error::{Error, Result};

/// Bisection stops once the bracket is this narrow; Newton takes over.
pub const BISECTION_WIDTH: f64 = 1e-8;
pub const MAX_NEWTON_STEPS: usize = 20;
/// Relative step size at which Newton polishing stops.
pub const NEWTON_TOLERANCE: f64 = 1e-12;
/// Bracket expansion gives up beyond this abscissa.
pub const BRACKET_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootResult {
    pub value: f64,
    /// function(value) - target
    pub residual: f64,
    /// Bracket that straddled the target before refinement.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

impl RootResult {
    /// Acceptance tolerance on the residual for a given target.
    pub fn residual_tolerance(target: f64) -> f64 {
        1e-11 * (1.0 + target.abs())
    }
}

/// Solves `func(x) = target` for an increasing `func` with `func(0) <= target`.
///
/// The bracket [0, 1] is doubled until it straddles the target, bisected down to
/// [`BISECTION_WIDTH`], and the midpoint polished with safeguarded Newton steps.
pub fn solve_increasing<F, D>(func: F, deriv: D, target: f64) -> Result<RootResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !target.is_finite() {
        return Err(Error::domain(format!("non-finite target {target}")));
    }
    let base = func(0.0);
    if target < base {
        return Err(Error::domain(format!("target {target} below function value {base} at 0")));
    }
    if target == base {
        return Ok(RootResult { value: 0.0, residual: 0.0, bracket: (0.0, 0.0), iterations: 0 });
    }

    let (mut lo, mut hi) = (0.0, 1.0);
    while func(hi) < target {
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            if func(BRACKET_LIMIT) >= target {
                hi = BRACKET_LIMIT;
                break;
            }
            return Err(Error::BracketFailure { target, limit: BRACKET_LIMIT });
        }
    }
    let bracket = (lo, hi);

    let mut iterations = 0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if func(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON_STEPS {
        let r = func(x) - target;
        if r == 0.0 {
            break;
        }
        if r < 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let slope = deriv(x);
        let mut next = x - r / slope;
        if !(slope > 0.0) || !next.is_finite() || next < lo || next > hi {
            next = 0.5 * (lo + hi);
        }
        iterations += 1;
        let done = (next - x).abs() <= NEWTON_TOLERANCE * x.abs().max(1.0);
        x = next;
        if done {
            break;
        }
    }

    Ok(RootResult { value: x, residual: func(x) - target, bracket, iterations })
}
