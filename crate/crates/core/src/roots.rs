//! Bisection root finding on f64.
//!
//! All solvers in this crate reduce their 1-D root problems to bisection on
//! a bracketed sign change: it is branch-predictable, derivative-free and
//! bitwise deterministic, which the reproducibility contract of the CLI
//! relies on.

/// Result of a bisection run.
#[derive(Debug, Clone, Copy)]
pub struct BisectResult {
    pub root: f64,
    /// Width of the final bracket; the root is within this of the true zero.
    pub width: f64,
    pub iterations: usize,
}

/// Bisect a sign change of `f` inside `[lo, hi]`.
///
/// Requires f(lo) and f(hi) to have opposite (non-zero) signs unless one of
/// them is exactly zero. Runs until the bracket cannot shrink in f64 or
/// `max_iter` is hit, so the result is accurate to roundoff; `rel_tol` lets
/// callers stop earlier.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Option<BisectResult> {
    let mut flo = f(lo);
    if flo == 0.0 {
        return Some(BisectResult { root: lo, width: 0.0, iterations: 0 });
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return Some(BisectResult { root: hi, width: 0.0, iterations: 0 });
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let mut iterations = 0;
    while iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted in f64
        }
        let fmid = f(mid);
        iterations += 1;
        if fmid == 0.0 {
            return Some(BisectResult { root: mid, width: 0.0, iterations });
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Some(BisectResult { root: 0.5 * (lo + hi), width: hi - lo, iterations })
}

/// Bisect the switching point of a monotone predicate: `pred` must be false
/// at `lo` and true at `hi`. Returns the midpoint of the final bracket.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(
    mut pred: P,
    mut lo: f64,
    mut hi: f64,
    max_iter: usize,
) -> BisectResult {
    debug_assert!(lo < hi);
    let mut iterations = 0;
    while iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    BisectResult { root: 0.5 * (lo + hi), width: hi - lo, iterations }
}

/// Walk `[start, stop]` in steps of `step` and return the first sign-change
/// bracket of `f`, or None.
pub fn first_sign_change<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    stop: f64,
    step: f64,
) -> Option<(f64, f64)> {
    debug_assert!(step > 0.0);
    let mut a = start;
    let mut fa = f(a);
    while a < stop {
        let b = (a + step).min(stop);
        let fb = f(b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            return Some((a, b));
        }
        a = b;
        fa = fb;
        if b >= stop {
            break;
        }
    }
    None
}
