//! Generalized-Wentzell eigenvalues Λ_n(Ω, β, γ) of
//!
//! ```text
//! Δu + β·∂u/∂ν + γ·u = 0 on ∂Ω,      β, γ > 0,
//! ```
//!
//! computed through the Robin eigencurves: Λ_n = λ_n(Ω, α_n) where α_n is
//! the unique fixed point of g_n(α) = (γ − λ_n(Ω, α))/β. Since λ_n is
//! continuous and nondecreasing in α, h(α) = g_n(α) − α is strictly
//! decreasing and has exactly one zero; h(γ/β) = −λ_n(Ω, γ/β)/β < 0
//! always, so the fixed point lies below γ/β. When λ_n(Ω, 0) < γ the
//! bracket is (0, γ/β); otherwise the fixed point sits at negative α and
//! the bracket is extended geometrically to the left, which requires a
//! solver that accepts α < 0 (FEM).
//!
//! Each g_n evaluation is one full Robin eigenvalue solve, so curve values
//! are memoized per α and the bisection is capped at 60 iterations.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::domain::{BoundaryParams, DomainSpec};
use crate::error::{Error, Result};
use crate::solver::{spectrum_of, SolveOptions};
use crate::spectrum::{ModeProvenance, Spectrum, SpectrumEntry};

/// Wentzell boundary parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WentzellParams {
    pub beta: f64,
    pub gamma: f64,
}

impl WentzellParams {
    pub fn new(beta: f64, gamma: f64) -> Result<WentzellParams> {
        let p = WentzellParams { beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidDomain(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidDomain(format!("gamma must be > 0, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// One sampled point of a Robin eigencurve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigencurveSample {
    pub n: usize,
    pub alpha: f64,
    pub lambda: f64,
    /// g_n(α) = (γ − λ_n(α))/β.
    pub g: f64,
}

/// Source of Robin eigencurves λ_n(Ω, α).
pub trait EigencurveProvider {
    /// First k eigenvalues (with multiplicity) at the given α, together
    /// with an estimate of their absolute error.
    fn eigs(&self, alpha: f64, k: usize) -> Result<(Vec<f64>, f64)>;

    fn describe(&self) -> String;
}

/// Eigencurves of a concrete domain, evaluated through the solver routing
/// and memoized per α. Negative α works for domains with a FEM route.
pub struct DomainCurves {
    domain: DomainSpec,
    opts: SolveOptions,
    memo: Mutex<HashMap<u64, (Vec<f64>, f64)>>,
}

impl DomainCurves {
    pub fn new(domain: DomainSpec) -> Result<DomainCurves> {
        DomainCurves::with_options(domain, SolveOptions::default())
    }

    pub fn with_options(domain: DomainSpec, opts: SolveOptions) -> Result<DomainCurves> {
        domain.validate()?;
        Ok(DomainCurves { domain, opts, memo: Mutex::new(HashMap::new()) })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }
}

impl EigencurveProvider for DomainCurves {
    fn eigs(&self, alpha: f64, k: usize) -> Result<(Vec<f64>, f64)> {
        let key = alpha.to_bits();
        if let Some((vals, err)) = self.memo.lock().unwrap().get(&key) {
            if vals.len() >= k {
                return Ok((vals[..k].to_vec(), *err));
            }
        }
        let bc = BoundaryParams::robin(2.0, alpha);
        let s = spectrum_of(&self.domain, &bc, k, &self.opts)?;
        let vals = s.flattened();
        let err = s.max_abs_error();
        let out = (vals[..k].to_vec(), err);
        let mut memo = self.memo.lock().unwrap();
        let slot = memo.entry(key).or_insert_with(|| (vals.clone(), err));
        if slot.0.len() < vals.len() {
            *slot = (vals, err);
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("{}", self.domain)
    }
}

/// Constant eigencurves λ_n(α) ≡ levels[n−1], for testing the fixed-point
/// machinery in isolation.
pub struct SyntheticCurves {
    pub levels: Vec<f64>,
}

impl EigencurveProvider for SyntheticCurves {
    fn eigs(&self, _alpha: f64, k: usize) -> Result<(Vec<f64>, f64)> {
        if k > self.levels.len() {
            return Err(Error::Unsupported(format!(
                "synthetic provider holds {} curves, {k} requested",
                self.levels.len()
            )));
        }
        Ok((self.levels[..k].to_vec(), 0.0))
    }

    fn describe(&self) -> String {
        format!("synthetic flat curves {:?}", self.levels)
    }
}

/// One solved Wentzell eigenvalue with its fixed-point diagnostics.
#[derive(Debug, Clone)]
pub struct WentzellEig {
    pub n: usize,
    /// Fixed point α_n of g_n.
    pub alpha: f64,
    /// Λ_n = γ − α_n·β.
    pub lambda: f64,
    /// |g_n(α_n) − α_n|.
    pub residual: f64,
    pub iterations: usize,
    /// Error estimate of the underlying Robin eigenvalue at α_n.
    pub curve_error: f64,
}

const MAX_BISECT: usize = 60;
const MAX_EXTEND: usize = 40;
const RESIDUAL_LIMIT: f64 = 1e-10;

/// Sample g_n over an α grid, for curve diagnostics.
pub fn sample_curves(
    provider: &dyn EigencurveProvider,
    params: &WentzellParams,
    alphas: &[f64],
    k: usize,
) -> Result<Vec<EigencurveSample>> {
    params.validate()?;
    let mut out = Vec::with_capacity(alphas.len() * k);
    for &alpha in alphas {
        let (vals, _) = provider.eigs(alpha, k)?;
        for (i, &lambda) in vals.iter().enumerate() {
            out.push(EigencurveSample {
                n: i + 1,
                alpha,
                lambda,
                g: (params.gamma - lambda) / params.beta,
            });
        }
    }
    Ok(out)
}

/// First k Wentzell eigenvalues with full fixed-point diagnostics.
pub fn wentzell_eigs_detailed(
    params: &WentzellParams,
    k: usize,
    provider: &dyn EigencurveProvider,
) -> Result<Vec<WentzellEig>> {
    params.validate()?;
    if k < 1 {
        return Err(Error::InvalidDomain("eigenvalue count k must be >= 1".into()));
    }
    let (beta, gamma) = (params.beta, params.gamma);
    let mut out = Vec::with_capacity(k);
    for n in 1..=k {
        let g = |alpha: f64| -> Result<(f64, f64)> {
            let (vals, err) = provider.eigs(alpha, n)?;
            Ok(((gamma - vals[n - 1]) / beta, err))
        };
        let h = |alpha: f64| -> Result<f64> { Ok(g(alpha)?.0 - alpha) };

        let h0 = h(0.0)?;
        let (mut lo, mut hi) = if h0 > 0.0 {
            // λ_n(Ω, 0) < γ: fixed point in (0, γ/β) since h(γ/β) < 0
            (0.0, gamma / beta)
        } else {
            // fixed point at α ≤ 0: extend the bracket geometrically left
            let mut cand = -(gamma / beta);
            let mut j = 0;
            while h(cand)? <= 0.0 {
                j += 1;
                if j > MAX_EXTEND {
                    return Err(Error::BracketFailure(format!(
                        "no sign change of g_{n}(α) − α down to α = {cand:e} on {}",
                        provider.describe()
                    )));
                }
                cand *= 2.0;
            }
            (cand, 0.0)
        };

        let mut iterations = 0;
        for _ in 0..MAX_BISECT {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
            if hi - lo <= 1e-14 * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
        }
        let alpha_n = 0.5 * (lo + hi);
        let (g_val, curve_error) = g(alpha_n)?;
        let residual = (g_val - alpha_n).abs();
        if residual >= RESIDUAL_LIMIT {
            return Err(Error::NoConvergence(format!(
                "fixed-point residual {residual:e} on curve {n} of {} exceeds {RESIDUAL_LIMIT:e}",
                provider.describe()
            )));
        }
        out.push(WentzellEig {
            n,
            alpha: alpha_n,
            lambda: gamma - alpha_n * beta,
            residual,
            iterations,
            curve_error,
        });
    }
    Ok(out)
}

/// First k Wentzell eigenvalues as a Spectrum.
pub fn wentzell_eigs(
    params: &WentzellParams,
    k: usize,
    provider: &dyn EigencurveProvider,
) -> Result<Spectrum> {
    let detailed = wentzell_eigs_detailed(params, k, provider)?;
    let entries = detailed
        .iter()
        .map(|e| SpectrumEntry {
            value: e.lambda,
            multiplicity: 1,
            provenance: ModeProvenance {
                component: 0,
                mode: format!("fixpoint-n={}", e.n),
                solver: "wentzell".into(),
                abs_error: params.beta * e.residual + e.curve_error,
            },
        })
        .collect();
    Spectrum::from_entries(entries)
}

/// Numeric report of the transfer comparison between two domains: Robin
/// domination at the fixed-point anchors versus Wentzell domination.
#[derive(Debug, Clone)]
pub struct TransferCheck {
    /// Fixed point α_k of U's k-th curve and the Wentzell value Λ_k(U).
    pub alpha_u: f64,
    pub wentzell_u: f64,
    /// Same for V.
    pub alpha_v: f64,
    pub wentzell_v: f64,
    /// (λ_k(U, α), λ_k(V, α)) evaluated at α = α_u and α = α_v.
    pub robin_at_alpha_u: (f64, f64),
    pub robin_at_alpha_v: (f64, f64),
    /// Combined error estimate used for all margin decisions.
    pub tolerance: f64,
    /// min over both anchors of λ_k(U, α) − λ_k(V, α).
    pub robin_margin: f64,
    /// Λ_k(U) − Λ_k(V).
    pub wentzell_margin: f64,
    /// Robin domination holds decisively at both anchors.
    pub premise_holds: bool,
    /// Wentzell domination violated decisively.
    pub conclusion_violated: bool,
    /// Some margin is inside the error bars (equality / extremal case).
    pub borderline: bool,
}

impl TransferCheck {
    /// The implication "Robin domination at the anchors ⇒ Wentzell
    /// domination" survived the check.
    pub fn consistent(&self) -> bool {
        !(self.premise_holds && self.conclusion_violated)
    }
}

/// Compare Λ_k(U) against Λ_k(V) and verify that Robin domination at the
/// fixed-point anchors transfers to the Wentzell values.
pub fn transfer_check(
    u: &DomainSpec,
    v: &DomainSpec,
    params: &WentzellParams,
    k: usize,
    opts: &SolveOptions,
) -> Result<TransferCheck> {
    let curves_u = DomainCurves::with_options(u.clone(), *opts)?;
    let curves_v = DomainCurves::with_options(v.clone(), *opts)?;
    let eig_u = wentzell_eigs_detailed(params, k, &curves_u)?.pop().unwrap();
    let eig_v = wentzell_eigs_detailed(params, k, &curves_v)?.pop().unwrap();

    let lam = |curves: &DomainCurves, alpha: f64| -> Result<(f64, f64)> {
        let (vals, err) = curves.eigs(alpha, k)?;
        Ok((vals[k - 1], err))
    };
    let (u_at_u, err_uu) = lam(&curves_u, eig_u.alpha)?;
    let (v_at_u, err_vu) = lam(&curves_v, eig_u.alpha)?;
    let (u_at_v, err_uv) = lam(&curves_u, eig_v.alpha)?;
    let (v_at_v, err_vv) = lam(&curves_v, eig_v.alpha)?;

    let fixpoint_err = params.beta * (eig_u.residual + eig_v.residual)
        + eig_u.curve_error
        + eig_v.curve_error;
    let tolerance = 2.0 * (err_uu + err_vu + err_uv + err_vv + fixpoint_err).max(1e-12);

    let robin_margin = (u_at_u - v_at_u).min(u_at_v - v_at_v);
    let wentzell_margin = eig_u.lambda - eig_v.lambda;

    let premise_holds = robin_margin > tolerance;
    let conclusion_violated = wentzell_margin < -tolerance;
    let borderline = robin_margin.abs() <= tolerance || wentzell_margin.abs() <= tolerance;

    Ok(TransferCheck {
        alpha_u: eig_u.alpha,
        wentzell_u: eig_u.lambda,
        alpha_v: eig_v.alpha,
        wentzell_v: eig_v.lambda,
        robin_at_alpha_u: (u_at_u, v_at_u),
        robin_at_alpha_v: (u_at_v, v_at_v),
        tolerance,
        robin_margin,
        wentzell_margin,
        premise_holds,
        conclusion_violated,
        borderline,
    })
}
