//! Semianalytic Robin spectra for p = 2: intervals by a scalar secular
//! equation, rectangles by tensor sums, disks by Bessel cross-products,
//! plus Dirichlet/Neumann closed forms for the same shapes.
//!
//! Interval modes u = cos(ωx) + (α/ω) sin(ωx) satisfy the Robin condition
//! at x = L exactly when
//!
//! ```text
//! S(ω) = (ω² − α²)·sin(ωL) − 2αω·cos(ωL) = 0,          λ = ω².
//! ```
//!
//! Disk modes J_m(√λ r)·{cos,sin}(mθ) satisfy it exactly when
//!
//! ```text
//! f_m(x) = x·J_m′(x) + αR·J_m(x) = 0,                   λ = (x/R)².
//! ```
//!
//! Every root is certified by a bracket whose endpoints have opposite
//! secular signs, obtained from Neumann/Dirichlet interlacing; a failed
//! sign check is an error, never a silently skipped mode.
//!
//! Negative α is rejected here: those spectra contain negative eigenvalues
//! on different transcendental branches, and the FEM module covers them.

use std::f64::consts::PI;

use crate::bessel::{bessel_j, bessel_j_prime, bessel_prime_zeros, bessel_zeros};
use crate::domain::{BoundaryCondition, DomainSpec};
use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::spectrum::{ModeProvenance, Spectrum, SpectrumEntry};

const BISECT_REL_TOL: f64 = 1e-12;
const BISECT_MAX_ITER: usize = 200;

/// A certified root bracket for one secular equation.
///
/// For intervals the bracket is in ω with `scale` = L and no angular order;
/// for disks it is in x = √λ·R with `scale` = R and `angular_order` = m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularBracket {
    /// Root index within its family (n for intervals, s for disks), 1-based.
    pub index: usize,
    /// Angular order m for disk brackets, None for intervals.
    pub angular_order: Option<u32>,
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    /// L for intervals, R for disks.
    pub scale: f64,
}

impl SecularBracket {
    fn describe(&self) -> String {
        match self.angular_order {
            Some(m) => format!(
                "disk bracket (m,s)=({m},{}) in [{:.6}, {:.6}] (alpha={}, R={})",
                self.index, self.lo, self.hi, self.alpha, self.scale
            ),
            None => format!(
                "interval bracket n={} in [{:.6}, {:.6}] (alpha={}, L={})",
                self.index, self.lo, self.hi, self.alpha, self.scale
            ),
        }
    }
}

/// Interval secular function S(ω) = (ω² − α²) sin(ωL) − 2αω cos(ωL).
pub fn interval_secular(omega: f64, length: f64, alpha: f64) -> f64 {
    (omega * omega - alpha * alpha) * (omega * length).sin()
        - 2.0 * alpha * omega * (omega * length).cos()
}

/// Disk secular function f_m(x) = x·J_m′(x) + αR·J_m(x).
pub fn disk_secular(m: u32, x: f64, radius: f64, alpha: f64) -> f64 {
    x * bessel_j_prime(m, x) + alpha * radius * bessel_j(m, x)
}

/// Certified ω-bracket for the n-th positive interval root (α > 0):
/// ((n−1)π/L, nπ/L), with the left endpoint of the first bracket nudged
/// into (0, ω₁) where S is provably negative.
pub fn interval_bracket(n: usize, length: f64, alpha: f64) -> Result<SecularBracket> {
    assert!(n >= 1 && alpha > 0.0 && length > 0.0);
    let hi = n as f64 * PI / length;
    let lo = if n > 1 {
        (n - 1) as f64 * PI / length
    } else {
        // S(ω) = ω(ω²L − α²L − 2α) + O(ω⁵) < 0 for small ω, and S has no
        // root in (0, ω₁); shrink until the computed sign agrees.
        let mut lo = 1e-3 * hi;
        let mut tries = 0;
        while interval_secular(lo, length, alpha) >= 0.0 {
            lo /= 16.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::BracketFailure(format!(
                    "could not find a negative-sign left endpoint for the first \
                     interval root (L={length}, alpha={alpha})"
                )));
            }
        }
        lo
    };
    let b = SecularBracket { index: n, angular_order: None, lo, hi, alpha, scale: length };
    check_signs(&b, |w| interval_secular(w, length, alpha))?;
    Ok(b)
}

fn check_signs(b: &SecularBracket, f: impl Fn(f64) -> f64) -> Result<()> {
    let flo = f(b.lo);
    let fhi = f(b.hi);
    if flo == 0.0 || fhi == 0.0 || flo.signum() != fhi.signum() {
        Ok(())
    } else {
        Err(Error::BracketFailure(format!(
            "secular sign check failed for {}: f(lo)={flo:e}, f(hi)={fhi:e}",
            b.describe()
        )))
    }
}

fn bisect_bracket(b: &SecularBracket, f: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    check_signs(b, &f)?;
    let r = bisect(&f, b.lo, b.hi, BISECT_REL_TOL, BISECT_MAX_ITER).ok_or_else(|| {
        Error::BracketFailure(format!("no sign change in {}", b.describe()))
    })?;
    if r.width > 10.0 * BISECT_REL_TOL * r.root.abs().max(1.0) {
        return Err(Error::NoConvergence(format!(
            "bisection stalled at width {:e} after {} iterations in {}",
            r.width,
            r.iterations,
            b.describe()
        )));
    }
    Ok((r.root, r.width))
}

fn reject_negative_alpha(alpha: f64) -> Result<()> {
    if alpha < 0.0 {
        Err(Error::NeedsSignedAlphaSolver(format!(
            "semianalytic spectra require alpha >= 0 (got {alpha}); \
             negative alpha lives on a different transcendental branch, use the FEM solver"
        )))
    } else if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("alpha must be finite, got {alpha}")))
    }
}

fn check_k(k: usize) -> Result<()> {
    if k >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidDomain("eigenvalue count k must be >= 1".into()))
    }
}

fn entry(value: f64, multiplicity: usize, mode: String, solver: &str, abs_error: f64) -> SpectrumEntry {
    SpectrumEntry {
        value,
        multiplicity,
        provenance: ModeProvenance { component: 0, mode, solver: solver.into(), abs_error },
    }
}

/// First k Robin eigenvalues of the interval (0, L) for α ≥ 0.
pub fn interval_spectrum(length: f64, alpha: f64, k: usize) -> Result<Spectrum> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidDomain(format!("interval length must be > 0, got {length}")));
    }
    reject_negative_alpha(alpha)?;
    check_k(k)?;

    if alpha == 0.0 {
        // Neumann closed form: λ_n = ((n−1)π/L)².
        let entries = (1..=k)
            .map(|n| {
                let w = (n - 1) as f64 * PI / length;
                let v = w * w;
                entry(v, 1, format!("n={n}"), "interval-secular", 1e-14 * v)
            })
            .collect();
        return Spectrum::from_entries(entries);
    }

    let mut entries = Vec::with_capacity(k);
    for n in 1..=k {
        let b = interval_bracket(n, length, alpha)?;
        let (w, width) = bisect_bracket(&b, |omega| interval_secular(omega, length, alpha))?;
        let v = w * w;
        let err = 2.0 * w * width + 1e-14 * v;
        entries.push(entry(v, 1, format!("n={n}"), "interval-secular", err));
    }
    Spectrum::from_entries(entries)
}

/// First k Robin eigenvalues of the rectangle (0,a) × (0,b): the k smallest
/// sums of interval eigenvalues of the two sides. Exact coincidences are
/// coalesced into one entry carrying the multiplicity.
pub fn rectangle_spectrum(a: f64, b: f64, alpha: f64, k: usize) -> Result<Spectrum> {
    reject_negative_alpha(alpha)?;
    check_k(k)?;
    // The k-th smallest sum uses at most the k-th smallest term from each
    // side, so k one-dimensional modes per side suffice.
    let sa = interval_spectrum(a, alpha, k)?;
    let sb = interval_spectrum(b, alpha, k)?;
    let va = sa.flattened();
    let vb = sb.flattened();
    let ea: Vec<f64> = sa.entries().iter().map(|e| e.provenance.abs_error).collect();
    let eb: Vec<f64> = sb.entries().iter().map(|e| e.provenance.abs_error).collect();

    let mut sums: Vec<(f64, usize, usize, f64)> = Vec::with_capacity(k * k);
    for (i, &x) in va.iter().enumerate() {
        for (j, &y) in vb.iter().enumerate() {
            sums.push((x + y, i + 1, j + 1, ea[i] + eb[j]));
        }
    }
    sums.sort_by(|p, q| p.0.total_cmp(&q.0));
    sums.truncate(k);

    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (v, i, j, err) in sums {
        match entries.last_mut() {
            Some(last) if last.value == v => {
                last.multiplicity += 1;
                last.provenance.mode.push_str(&format!(",({i},{j})"));
                last.provenance.abs_error = last.provenance.abs_error.max(err);
            }
            _ => entries.push(entry(v, 1, format!("(i,j)=({i},{j})"), "rect-tensor", err)),
        }
    }
    Spectrum::from_entries(entries)
}

/// First k Robin eigenvalues of the disk of radius R for α ≥ 0. Angular
/// order m contributes roots of f_m with multiplicity 2 for m ≥ 1; orders
/// are scanned until the analytic lower bound (m/R)² for any further root
/// exceeds the current k-th candidate.
pub fn disk_spectrum(radius: f64, alpha: f64, k: usize) -> Result<Spectrum> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidDomain(format!("disk radius must be > 0, got {radius}")));
    }
    reject_negative_alpha(alpha)?;
    check_k(k)?;

    let mut cand = CandidateHeap::new(k);
    let mut m: u32 = 0;
    loop {
        let floor = (m as f64 / radius).powi(2);
        if cand.full() && floor > cand.kth() {
            break;
        }
        if alpha == 0.0 {
            disk_order_neumann(radius, m, &mut cand);
        } else {
            disk_order_robin(radius, alpha, m, &mut cand)?;
        }
        m += 1;
        assert!(m < 10_000, "runaway angular-order scan");
    }
    let mut s = Spectrum::from_entries(cand.entries)?;
    s.truncate_to(k);
    Ok(s)
}

/// Ascending candidate collector that can report the current k-th smallest
/// value counted with multiplicity.
struct CandidateHeap {
    k: usize,
    values: Vec<f64>, // flattened, kept sorted
    entries: Vec<SpectrumEntry>,
}

impl CandidateHeap {
    fn new(k: usize) -> Self {
        CandidateHeap { k, values: Vec::new(), entries: Vec::new() }
    }
    fn push(&mut self, e: SpectrumEntry) {
        for _ in 0..e.multiplicity {
            let pos = self.values.partition_point(|&v| v < e.value);
            self.values.insert(pos, e.value);
        }
        self.entries.push(e);
    }
    fn full(&self) -> bool {
        self.values.len() >= self.k
    }
    fn kth(&self) -> f64 {
        self.values[self.k - 1]
    }
    /// Candidates of order m are exhausted once a value exceeds this.
    fn cutoff(&self) -> f64 {
        if self.full() { self.kth() } else { f64::INFINITY }
    }
}

/// Roots of f_m(x) = x J_m'(x) + αR J_m(x) for one order m (α > 0).
///
/// The s-th root lies in (j_{m,s−1}, j_{m,s}) with j_{m,0} := 0: f_m is
/// positive as x → 0⁺ (and on (0, j'_{m,1}] since both J_m and J_m' are
/// nonnegative there), while sign f_m(j_{m,s}) = sign J_m'(j_{m,s}) = (−1)^s.
fn disk_order_robin(radius: f64, alpha: f64, m: u32, cand: &mut CandidateHeap) -> Result<()> {
    let mult = if m == 0 { 1 } else { 2 };
    let f = |x: f64| disk_secular(m, x, radius, alpha);
    let mut zeros = bessel_zeros(m, 4);
    let first_lo = if m == 0 { 1e-9 } else { bessel_prime_zeros(m, 1)[0] };
    let mut s = 1usize;
    loop {
        if zeros.len() < s {
            zeros = bessel_zeros(m, s + 4);
        }
        let lo = if s == 1 { first_lo } else { zeros[s - 2] };
        let hi = zeros[s - 1];
        let b = SecularBracket {
            index: s,
            angular_order: Some(m),
            lo,
            hi,
            alpha,
            scale: radius,
        };
        let (x, width) = bisect_bracket(&b, f)?;
        let v = (x / radius) * (x / radius);
        let err = 2.0 * x / (radius * radius) * width + 1e-14 * v;
        cand.push(entry(v, mult, format!("(m,s)=({m},{s})"), "disk-bessel", err));
        if cand.full() && v > cand.cutoff() {
            return Ok(());
        }
        s += 1;
        assert!(s < 10_000, "runaway radial-root scan");
    }
}

/// Neumann disk eigenvalues for one order m: λ = 0 for m = 0 plus
/// (j_{1,s}/R)² (since J_0' = −J_1), and (j'_{m,s}/R)² for m ≥ 1.
fn disk_order_neumann(radius: f64, m: u32, cand: &mut CandidateHeap) {
    let mult = if m == 0 { 1 } else { 2 };
    if m == 0 {
        cand.push(entry(0.0, 1, "(m,s)=(0,0)".into(), "disk-bessel", 0.0));
    }
    let mut count = 4usize;
    let mut pushed = 0usize;
    loop {
        let zeros =
            if m == 0 { bessel_zeros(1, count) } else { bessel_prime_zeros(m, count) };
        // A regrown batch starts with the roots already in the heap; skip
        // them so no eigenvalue is counted twice.
        for (i, &x) in zeros.iter().enumerate().skip(pushed) {
            let s = i + 1;
            let v = (x / radius) * (x / radius);
            cand.push(entry(v, mult, format!("(m,s)=({m},{s})"), "disk-bessel", 1e-13 * v));
            pushed = s;
            if cand.full() && v > cand.cutoff() {
                return;
            }
        }
        count *= 2;
        assert!(count < 10_000, "runaway radial-root scan");
    }
}

/// Dirichlet (μ) or Neumann closed-form spectra for intervals, rectangles
/// and disks.
pub fn closed_form_dirichlet_neumann(
    d: &DomainSpec,
    condition: BoundaryCondition,
    k: usize,
) -> Result<Spectrum> {
    check_k(k)?;
    let dirichlet = match condition {
        BoundaryCondition::Dirichlet => true,
        BoundaryCondition::Neumann => false,
        BoundaryCondition::Robin(_) => {
            return Err(Error::Unsupported(
                "closed forms exist only for Dirichlet and Neumann conditions".into(),
            ))
        }
    };
    match d {
        DomainSpec::Interval { length } => interval_closed_form(*length, dirichlet, k),
        DomainSpec::Ball { dim: 1, radius } => interval_closed_form(2.0 * radius, dirichlet, k),
        DomainSpec::Rectangle { a, b } => {
            let sa = interval_closed_form(*a, dirichlet, k)?.flattened();
            let sb = interval_closed_form(*b, dirichlet, k)?.flattened();
            let mut sums: Vec<(f64, usize, usize)> = Vec::with_capacity(k * k);
            for (i, &x) in sa.iter().enumerate() {
                for (j, &y) in sb.iter().enumerate() {
                    sums.push((x + y, i + 1, j + 1));
                }
            }
            sums.sort_by(|p, q| p.0.total_cmp(&q.0));
            sums.truncate(k);
            let entries = sums
                .into_iter()
                .map(|(v, i, j)| {
                    entry(v, 1, format!("(i,j)=({i},{j})"), "closed-form", 1e-14 * v)
                })
                .collect();
            Spectrum::from_entries(entries)
        }
        DomainSpec::Disk { radius } | DomainSpec::Ball { dim: 2, radius } => {
            disk_closed_form(*radius, dirichlet, k)
        }
        other => Err(Error::Unsupported(format!(
            "no closed-form spectrum for {other}; supported shapes are interval, rectangle, disk"
        ))),
    }
}

fn interval_closed_form(length: f64, dirichlet: bool, k: usize) -> Result<Spectrum> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidDomain(format!("interval length must be > 0, got {length}")));
    }
    let entries = (1..=k)
        .map(|n| {
            let idx = if dirichlet { n } else { n - 1 };
            let w = idx as f64 * PI / length;
            let v = w * w;
            entry(v, 1, format!("n={n}"), "closed-form", 1e-14 * v)
        })
        .collect();
    Spectrum::from_entries(entries)
}

fn disk_closed_form(radius: f64, dirichlet: bool, k: usize) -> Result<Spectrum> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidDomain(format!("disk radius must be > 0, got {radius}")));
    }
    let mut cand = CandidateHeap::new(k);
    let mut m: u32 = 0;
    loop {
        let floor = (m as f64 / radius).powi(2);
        if cand.full() && floor > cand.kth() {
            break;
        }
        let mult = if m == 0 { 1 } else { 2 };
        if !dirichlet && m == 0 {
            cand.push(entry(0.0, 1, "(m,s)=(0,0)".into(), "closed-form", 0.0));
        }
        let mut count = 4usize;
        let mut pushed = 0usize;
        'orders: loop {
            let zeros = match (dirichlet, m) {
                (true, _) => bessel_zeros(m, count),
                (false, 0) => bessel_zeros(1, count),
                (false, _) => bessel_prime_zeros(m, count),
            };
            // A regrown batch starts with the roots already in the heap;
            // skip them so no eigenvalue is counted twice.
            for (i, &x) in zeros.iter().enumerate().skip(pushed) {
                let s = i + 1;
                let v = (x / radius) * (x / radius);
                cand.push(entry(v, mult, format!("(m,s)=({m},{s})"), "closed-form", 1e-13 * v));
                pushed = s;
                if cand.full() && v > cand.cutoff() {
                    break 'orders;
                }
            }
            count *= 2;
            assert!(count < 10_000, "runaway radial-root scan");
        }
        m += 1;
        assert!(m < 10_000, "runaway angular-order scan");
    }
    let mut s = Spectrum::from_entries(cand.entries)?;
    s.truncate_to(k);
    Ok(s)
}
