//! Small numeric utilities: monotone root finding and adaptive quadrature.

use crate::error::{Error, Result};

/// Inverts a non-decreasing function by bisection on an initial bracket
/// `[lo, hi]`, expanding the bracket if needed. Stops once `|f(mid) - target|`
/// falls below `tol` or the bracket collapses to machine width.
pub fn invert_monotone(
    f: impl Fn(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    context: &'static str,
) -> Result<f64> {
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut flo = f(lo);
    let mut fhi = f(hi);
    let mut step = (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        if flo <= target {
            break;
        }
        lo -= step;
        step *= 2.0;
        flo = f(lo);
    }
    step = (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        if fhi >= target {
            break;
        }
        hi += step;
        step *= 2.0;
        fhi = f(hi);
    }
    if flo > target || fhi < target {
        return Err(Error::RootFind { context, lo, hi, flo, fhi, target });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if (fmid - target).abs() <= tol || (hi - lo) <= f64::EPSILON * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if fmid < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootFind { context, lo, hi, flo: f(lo), fhi: f(hi), target })
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
