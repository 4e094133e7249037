//! Bessel functions of the first kind J_m, their derivatives, and their
//! positive zeros.
//!
//! Values come from the power series for small arguments and Miller's
//! backward recurrence with the normalization J_0 + 2·Σ J_{2k} = 1
//! otherwise; both paths give close to full f64 accuracy for the orders
//! and arguments used here (m up to a few dozen, x up to a few hundred).

use crate::roots::{bisect, first_sign_change};

/// J_0(x), J_1(x), ..., J_{m_max}(x) in one pass. x must be >= 0.
pub fn bessel_j_seq(m_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and >= 0, got {x}");
    if x == 0.0 {
        let mut out = vec![0.0; m_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x <= 2.0 {
        return (0..=m_max).map(|m| series_j(m, x)).collect();
    }

    // Miller's algorithm: run the three-term recurrence downward from an
    // index high enough that the minimal solution dominates, then rescale
    // with the even-order sum rule.
    let big = m_max.max(x.ceil() as usize);
    let start = big + 40 + (4.0 * (big as f64).sqrt()) as usize;
    let mut out = vec![0.0f64; m_max + 1];
    let mut j_above = 0.0f64; // J_{n+1}
    let mut j_here = 1e-30f64; // J_n, starting at n = start
    let mut norm = 0.0f64;
    for n in (1..=start).rev() {
        if n <= m_max {
            out[n] = j_here;
        }
        if n % 2 == 0 {
            norm += 2.0 * j_here;
        }
        let j_below = (2.0 * n as f64 / x) * j_here - j_above;
        j_above = j_here;
        j_here = j_below;
        if j_here.abs() > 1e250 {
            let s = 1e-250;
            j_here *= s;
            j_above *= s;
            norm *= s;
            for v in &mut out {
                *v *= s;
            }
        }
    }
    out[0] = j_here;
    norm += j_here;
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// Power series Σ_k (-1)^k (x/2)^{m+2k} / (k! (m+k)!).
fn series_j(m: usize, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0f64;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let mut sum = term;
    let neg_q = -half * half;
    for k in 1..200usize {
        term *= neg_q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() < sum.abs() * 1e-17 + 1e-300 {
            break;
        }
    }
    sum
}

pub fn bessel_j(m: u32, x: f64) -> f64 {
    bessel_j_seq(m as usize, x)[m as usize]
}

/// d/dx J_m(x): J_0' = -J_1 and J_m' = (J_{m-1} - J_{m+1}) / 2.
pub fn bessel_j_prime(m: u32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        let seq = bessel_j_seq(m as usize + 1, x);
        (seq[m as usize - 1] - seq[m as usize + 1]) / 2.0
    }
}

/// First `count` positive zeros of J_m, ascending, found by one 0.1-step
/// sign scan (consecutive zeros of J_m are separated by at least ~2.9) with
/// bisection polish.
pub fn bessel_zeros(m: u32, count: usize) -> Vec<f64> {
    // j_{m,1} > m, and J_m is positive on (0, j_{m,1}).
    let start = if m == 0 { 1e-3 } else { m as f64 };
    scan_zeros(|x| bessel_j(m, x), start, count, 0.1, &format!("J_{m}"))
}

/// s-th positive zero j_{m,s} of J_m (s >= 1).
pub fn bessel_zero(m: u32, s: usize) -> f64 {
    assert!(s >= 1, "zero index s must be >= 1");
    bessel_zeros(m, s)[s - 1]
}

/// First `count` positive zeros of J_m', ascending. For m >= 1 the first is
/// the first maximum of J_m, in (m, j_{m,1}).
pub fn bessel_prime_zeros(m: u32, count: usize) -> Vec<f64> {
    scan_zeros(|x| bessel_j_prime(m, x), 1e-3, count, 0.05, &format!("J_{m}'"))
}

/// s-th positive zero of J_m' (s >= 1).
pub fn bessel_prime_zero(m: u32, s: usize) -> f64 {
    assert!(s >= 1, "zero index s must be >= 1");
    bessel_prime_zeros(m, s)[s - 1]
}

fn scan_zeros<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    count: usize,
    step: f64,
    what: &str,
) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(count);
    let mut lo = start;
    while zeros.len() < count {
        let limit = lo + 50.0 + 4.0 * (count - zeros.len()) as f64;
        let (a, b) = first_sign_change(&f, lo, limit, step)
            .unwrap_or_else(|| panic!("no sign change of {what} in [{lo}, {limit}]"));
        let r = bisect(&f, a, b, 1e-15, 200).expect("bracket carries a sign change");
        zeros.push(r.root);
        lo = b;
    }
    zeros
}
