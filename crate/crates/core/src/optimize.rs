//! Scalar root bracketing used by the staged optimizer and Blahut-Arimoto.

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Assumes `f(lo)` and `f(hi)` have opposite signs (or one is zero) and
/// returns a point within `tol` of a root. Iteration stops early when the
/// midpoint no longer moves in floating point.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let lo_positive = f_lo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
