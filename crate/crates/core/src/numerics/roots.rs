//! Bracketed scalar root finding: false-position (secant) steps inside a
//! bisection safeguard. Every accepted step keeps a sign change, and a step
//! that fails to halve the bracket forces a bisection next.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 400;

/// Finds a root of `f` in `bracket` to an interval width of `tol`.
pub fn find_root<F>(f: F, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    if tol.is_nan() || tol <= 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "find_root needs a finite bracket and positive tolerance, got [{a}, {b}], tol {tol}"
        )));
    }
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Bracketing {
            lower: a,
            upper: b,
            f_lower: fa,
            f_upper: fb,
        });
    }

    let mut force_bisect = false;
    for _ in 0..MAX_ITERATIONS {
        let width = b - a;
        if width <= tol {
            break;
        }
        let mut x = if force_bisect {
            0.5 * (a + b)
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        // Keep secant points away from the ends so the bracket can collapse.
        let guard = 0.25 * tol;
        x = x.clamp(a + guard, b - guard);

        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::Domain(format!("objective is NaN at {x}")));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        force_bisect = (b - a) > 0.5 * width;
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
