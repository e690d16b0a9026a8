//! Bracketed root finding.
//!
//! A Newton iteration that never leaves its sign-change bracket: each step is
//! either a Newton step landing strictly inside the current bracket and at
//! least halving the previous step, or a bisection step.

use crate::error::{GeometryError, Result};

/// Default iteration cap for [`newton_bisect`].
pub const MAX_ITERATIONS: usize = 100;

/// Find a root of `f` inside `[lo, hi]`.
///
/// `f` returns the value and derivative at a point. The endpoints must
/// bracket a sign change (a zero at either endpoint is returned directly).
/// Iteration stops once the step falls below `x_tol + 2 eps |x|` or the
/// bracket collapses to adjacent floats, so a tolerance of zero drives the
/// result to full double precision.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = f(a);
    if fa == 0.0 {
        return Ok(a);
    }
    let (fb, _) = f(b);
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(GeometryError::InvalidParams(format!(
            "root bracket [{a}, {b}] has no sign change (f = {fa}, {fb})"
        )));
    }
    // Orientation: f(a) has the sign of `a_sign`.
    let a_sign = fa.signum();

    let mut x = 0.5 * (a + b);
    let mut prev_step = b - a;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == a_sign {
            a = x;
        } else {
            b = x;
        }

        let newton = x - fx / dfx;
        let use_newton = dfx != 0.0
            && newton.is_finite()
            && newton > a
            && newton < b
            && (newton - x).abs() <= 0.5 * prev_step.abs();
        let next = if use_newton { newton } else { 0.5 * (a + b) };

        let step = next - x;
        let stop = x_tol + 2.0 * f64::EPSILON * next.abs();
        if step.abs() <= stop || next <= a || next >= b || b - a <= stop {
            return Ok(next.clamp(a, b));
        }
        prev_step = step;
        x = next;
    }
    Err(GeometryError::NoConvergence {
        what: "bracketed Newton iteration",
        iterations: max_iter,
    })
}
