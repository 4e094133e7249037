//! Routing of (domain, boundary condition, k) to a concrete solver:
//! secular equations for intervals and rectangles, Bessel roots for disks,
//! FEM with Richardson extrapolation for meshes and signed α, radial
//! shooting for p ≠ 2 ground states, and certified merges for unions.

use crate::analytic::{
    closed_form_dirichlet_neumann, disk_spectrum, interval_spectrum, rectangle_spectrum,
};
use crate::domain::{make_dk, volume, BoundaryCondition, BoundaryParams, DomainSpec};
use crate::error::{Error, Result};
use crate::fem::{dirichlet_eigs, estimate_error, richardson_extrapolate, robin_eigs};
use crate::mesh::mesh_for_domain;
use crate::shooting::ball_lambda1;
use crate::spectrum::{merge_spectra_with_bounds, ModeProvenance, Spectrum, SpectrumEntry};

/// Which backend computes a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    /// Pick per domain: analytic where a secular equation exists, FEM for
    /// meshes and negative α, shooting for p ≠ 2.
    #[default]
    Auto,
    Analytic,
    Fem,
    Shooting,
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<SolverChoice> {
        match s {
            "auto" => Ok(SolverChoice::Auto),
            "analytic" => Ok(SolverChoice::Analytic),
            "fem" => Ok(SolverChoice::Fem),
            "shooting" => Ok(SolverChoice::Shooting),
            other => Err(Error::Unsupported(format!(
                "unknown solver '{other}' (expected auto|analytic|fem|shooting)"
            ))),
        }
    }
}

/// Knobs shared by every solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub solver: SolverChoice,
    /// Extra FEM refinement levels on top of the base mesh.
    pub refine: usize,
    /// Residual tolerance passed to the sparse eigensolver.
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions { solver: SolverChoice::Auto, refine: 0, tol: 1e-10 }
    }
}

/// Cells per side (rectangles) / rings (disks) of the unrefined FEM mesh.
pub const FEM_BASE_RESOLUTION: usize = 8;

/// First k eigenvalues of the domain under the given boundary condition.
///
/// FEM results are solved on two nested meshes and Richardson-extrapolated;
/// their `abs_error` is the |fine − coarse|/3 rate-2 estimate. Unions are
/// merged per component with tail bounds where a component cannot supply k
/// values itself (p ≠ 2 balls).
pub fn spectrum_of(
    d: &DomainSpec,
    bc: &BoundaryParams,
    k: usize,
    opts: &SolveOptions,
) -> Result<Spectrum> {
    d.validate()?;
    bc.validate()?;
    if k < 1 {
        return Err(Error::InvalidDomain("eigenvalue count k must be >= 1".into()));
    }
    if let DomainSpec::Union(parts) = d {
        return union_spectrum(parts, bc, k, opts);
    }
    match opts.solver {
        SolverChoice::Auto => auto_route(d, bc, k, opts),
        SolverChoice::Analytic => analytic_route(d, bc, k),
        SolverChoice::Fem => fem_route(d, bc, k, opts),
        SolverChoice::Shooting => shooting_route(d, bc, k),
    }
}

fn auto_route(d: &DomainSpec, bc: &BoundaryParams, k: usize, opts: &SolveOptions) -> Result<Spectrum> {
    if bc.p == 2.0 {
        match d {
            DomainSpec::Interval { .. } | DomainSpec::Ball { dim: 1, .. } => analytic_route(d, bc, k),
            DomainSpec::Rectangle { .. } | DomainSpec::Disk { .. } | DomainSpec::Ball { dim: 2, .. } => {
                match bc.condition {
                    // the secular equations assume α ≥ 0; signed α needs FEM
                    BoundaryCondition::Robin(a) if a < 0.0 => fem_route(d, bc, k, opts),
                    _ => analytic_route(d, bc, k),
                }
            }
            DomainSpec::Ball { .. } => high_dim_ball_route(d, bc, k),
            DomainSpec::MeshDomain { .. } => fem_route(d, bc, k, opts),
            DomainSpec::Union(_) => unreachable!("unions handled by spectrum_of"),
        }
    } else {
        match bc.condition {
            BoundaryCondition::Neumann | BoundaryCondition::Robin(_) => shooting_route(d, bc, k),
            BoundaryCondition::Dirichlet => Err(Error::Unsupported(
                "Dirichlet p-Laplacian eigenvalues are out of scope; only Robin/Neumann \
                 ground states on balls are computed for p != 2"
                    .into(),
            )),
        }
    }
}

/// Balls of dimension ≥ 3: only the ground state is reachable (shooting for
/// α > 0, the constant function for Neumann).
fn high_dim_ball_route(d: &DomainSpec, bc: &BoundaryParams, k: usize) -> Result<Spectrum> {
    match bc.condition {
        BoundaryCondition::Neumann => {
            if k == 1 {
                zero_ground_state()
            } else {
                Err(Error::Unsupported(
                    "balls of dimension >= 3 support only k = 1 (no secular solver)".into(),
                ))
            }
        }
        BoundaryCondition::Robin(_) => shooting_route(d, bc, k),
        BoundaryCondition::Dirichlet => Err(Error::Unsupported(
            "no Dirichlet solver for balls of dimension >= 3".into(),
        )),
    }
}

fn analytic_route(d: &DomainSpec, bc: &BoundaryParams, k: usize) -> Result<Spectrum> {
    if bc.p != 2.0 {
        return Err(Error::Unsupported(format!(
            "analytic spectra exist only for p = 2, got p = {}",
            bc.p
        )));
    }
    match bc.condition {
        BoundaryCondition::Dirichlet | BoundaryCondition::Neumann => {
            closed_form_dirichlet_neumann(d, bc.condition, k)
        }
        BoundaryCondition::Robin(alpha) => match d {
            DomainSpec::Interval { length } => interval_spectrum(*length, alpha, k),
            DomainSpec::Ball { dim: 1, radius } => interval_spectrum(2.0 * radius, alpha, k),
            DomainSpec::Rectangle { a, b } => rectangle_spectrum(*a, *b, alpha, k),
            DomainSpec::Disk { radius } | DomainSpec::Ball { dim: 2, radius } => {
                disk_spectrum(*radius, alpha, k)
            }
            other => Err(Error::Unsupported(format!(
                "no analytic spectrum for {other}; use fem or shooting"
            ))),
        },
    }
}

fn fem_route(d: &DomainSpec, bc: &BoundaryParams, k: usize, opts: &SolveOptions) -> Result<Spectrum> {
    if bc.p != 2.0 {
        return Err(Error::Unsupported(format!(
            "the FEM solver is linear (p = 2 only), got p = {}",
            bc.p
        )));
    }
    let base = mesh_for_domain(d, FEM_BASE_RESOLUTION)?;
    let mut coarse_mesh = (*base).clone();
    for _ in 0..opts.refine {
        coarse_mesh = coarse_mesh.refine();
    }
    let fine_mesh = coarse_mesh.refine();
    let (coarse, fine) = match bc.condition {
        BoundaryCondition::Dirichlet => (
            dirichlet_eigs(&coarse_mesh, k, opts.tol)?,
            dirichlet_eigs(&fine_mesh, k, opts.tol)?,
        ),
        BoundaryCondition::Neumann | BoundaryCondition::Robin(_) => {
            let alpha = bc.robin_alpha().unwrap();
            (
                robin_eigs(&coarse_mesh, alpha, k, opts.tol)?,
                robin_eigs(&fine_mesh, alpha, k, opts.tol)?,
            )
        }
    };
    let entries = coarse
        .entries()
        .iter()
        .zip(fine.entries())
        .map(|(c, f)| SpectrumEntry {
            value: richardson_extrapolate(c.value, f.value),
            multiplicity: f.multiplicity,
            provenance: ModeProvenance {
                component: 0,
                mode: f.provenance.mode.clone(),
                solver: f.provenance.solver.clone(),
                abs_error: estimate_error(c.value, f.value).max(f.provenance.abs_error),
            },
        })
        .collect();
    Spectrum::from_entries(entries)
}

fn shooting_route(d: &DomainSpec, bc: &BoundaryParams, k: usize) -> Result<Spectrum> {
    if k != 1 {
        return Err(Error::Unsupported(format!(
            "radial shooting computes only the ground state; k = {k} on a connected ball \
             is out of reach for p != 2 (assemble unions of balls instead)"
        )));
    }
    let (n_dim, radius) = match d {
        DomainSpec::Interval { length } => (1u32, length / 2.0),
        DomainSpec::Disk { radius } => (2, *radius),
        DomainSpec::Ball { dim, radius } => (*dim, *radius),
        other => {
            return Err(Error::Unsupported(format!(
                "radial shooting needs a ball-like domain, got {other}"
            )))
        }
    };
    let alpha = match bc.condition {
        BoundaryCondition::Robin(a) => a,
        BoundaryCondition::Neumann => 0.0,
        BoundaryCondition::Dirichlet => {
            return Err(Error::Unsupported(
                "radial shooting solves Robin conditions only".into(),
            ))
        }
    };
    if alpha == 0.0 {
        // Neumann ground state is the constant, for every p
        return zero_ground_state();
    }
    let shot = ball_lambda1(n_dim, radius, alpha, bc.p)?;
    Spectrum::from_entries(vec![SpectrumEntry {
        value: shot.lambda1,
        multiplicity: 1,
        provenance: ModeProvenance {
            component: 0,
            mode: "radial-1".into(),
            solver: "radial-shooting".into(),
            abs_error: shot.est_error,
        },
    }])
}

fn zero_ground_state() -> Result<Spectrum> {
    Spectrum::from_entries(vec![SpectrumEntry {
        value: 0.0,
        multiplicity: 1,
        provenance: ModeProvenance {
            component: 0,
            mode: "const".into(),
            solver: "closed-form".into(),
            abs_error: 0.0,
        },
    }])
}

/// Merge a disjoint union. For p = 2 every component supplies k values of
/// its own, so the merge is unconditional. For p ≠ 2 each ball supplies
/// only λ₁; the merge is certified by the two-ball lower bound applied to
/// the component itself: λ₂(B) ≥ λ₁(B'), where B' is the ball of half the
/// volume of B.
fn union_spectrum(
    parts: &[DomainSpec],
    bc: &BoundaryParams,
    k: usize,
    opts: &SolveOptions,
) -> Result<Spectrum> {
    let mut spectra = Vec::with_capacity(parts.len());
    let mut bounds = Vec::with_capacity(parts.len());
    for comp in parts {
        if bc.p == 2.0 {
            spectra.push(spectrum_of(comp, bc, k, opts)?);
            bounds.push(f64::NEG_INFINITY);
        } else {
            spectra.push(spectrum_of(comp, bc, 1, opts)?);
            bounds.push(ball_second_eig_bound(comp, bc, opts)?);
        }
    }
    merge_spectra_with_bounds(&spectra, &bounds, k)
}

/// Lower bound on the second eigenvalue of a connected ball-like domain:
/// λ₂(B) ≥ λ₁ of the ball with half the volume.
fn ball_second_eig_bound(comp: &DomainSpec, bc: &BoundaryParams, opts: &SolveOptions) -> Result<f64> {
    let half = make_dk(volume(comp) / 2.0, 1, comp.dim())?;
    let s = spectrum_of(&half, bc, 1, opts)?;
    Ok(s.value(1).expect("ground-state solve returned an empty spectrum"))
}
