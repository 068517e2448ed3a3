use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub root: f64,
    pub iterations: usize,
    pub residual: f64,
    /// `|residual| <= tol`. False only when the bracket collapsed to machine
    /// precision before the residual met the tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200 }
    }
}

/// Finds a zero of `f` inside `bracket`.
///
/// With a derivative this takes Newton steps, replacing any step that leaves
/// the current bracket (or is not finite) with bisection. Without one it
/// bisects.
pub fn find_root(
    f: impl Fn(f64) -> f64,
    f_prime: Option<&dyn Fn(f64) -> f64>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<RootResult> {
    find_root_with(f, f_prime, bracket, &RootOptions { tol, ..Default::default() })
}

pub fn find_root_with(
    f: impl Fn(f64) -> f64,
    f_prime: Option<&dyn Fn(f64) -> f64>,
    bracket: (f64, f64),
    opts: &RootOptions,
) -> Result<RootResult> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain("root bracket must be finite"));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() || f_lo * f_hi > 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    if f_lo == 0.0 {
        return Ok(RootResult { root: lo, iterations: 0, residual: 0.0, converged: true });
    }
    if f_hi == 0.0 {
        return Ok(RootResult { root: hi, iterations: 0, residual: 0.0, converged: true });
    }

    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for iteration in 1..=opts.max_iter {
        if fx.abs() <= opts.tol {
            return Ok(RootResult { root: x, iterations: iteration, residual: fx, converged: true });
        }
        if (fx > 0.0) == (f_lo > 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(RootResult { root: x, iterations: iteration, residual: fx, converged: false });
        }
        let newton = f_prime.map(|d| x - fx / d(x));
        x = match newton {
            Some(step) if step.is_finite() && step > lo && step < hi => step,
            _ => 0.5 * (lo + hi),
        };
        fx = f(x);
    }
    if fx.abs() <= opts.tol {
        return Ok(RootResult { root: x, iterations: opts.max_iter, residual: fx, converged: true });
    }
    Err(Error::NoConvergence {
        routine: "root finder",
        iterations: opts.max_iter,
        residual: fx,
    })
}
