//! Numerical laboratory for Robin and Wentzell eigenvalues of the Laplacian
//! and p-Laplacian on simple planar and radial domains.
//!
//! The library computes the spectrum of
//!
//! ```text
//!   -div(|∇u|^{p-2} ∇u) = λ |u|^{p-2} u      in Ω,
//!   |∇u|^{p-2} ∂u/∂ν + α |u|^{p-2} u = 0     on ∂Ω,
//! ```
//!
//! by three independent routes:
//!
//! * closed-form / secular-equation solvers for intervals, rectangles and
//!   disks ([`analytic`]),
//! * a radial ODE shooting method for the first eigenvalue of balls in any
//!   dimension, for p between 1.2 and 6 ([`shooting`]),
//! * a P1 triangle finite-element discretization for arbitrary polygonal
//!   meshes, including signed α ([`fem`]).
//!
//! On top of the Robin solvers, [`wentzell`] computes eigenvalues of the
//! Wentzell problem (βΛ-coupled dynamic boundary condition) through the
//! fixed-point identity Λ_n = λ_n(Ω, (γ - Λ_n)/β), and [`experiments`]
//! packages the shape-comparison experiments (ball minimality of λ₁,
//! two-ball minimality of λ₂, index-k crossovers, parameter sweeps).

pub mod analytic;
pub mod bessel;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod roots;
pub mod shooting;
pub mod solver;
pub mod spectrum;
pub mod wentzell;

pub use domain::{
    make_dk, parse_domain, scale_domain, volume, BoundaryCondition, BoundaryParams, DomainSpec,
};
pub use error::{Error, Result};
pub use experiments::{
    check_faber_krahn, check_two_balls, crossover, sweep_alpha, sweep_volume,
    wentzell_transfer_report, CaseOutcome, CaseRow, ExperimentReport, SweepTable, Verdict,
};
pub use shooting::{ball_lambda1, lambda1_bracket_scan, radial_rayleigh, ShootingResult};
pub use solver::{spectrum_of, SolveOptions, SolverChoice};
pub use spectrum::{merge_spectra, ModeProvenance, Spectrum, SpectrumEntry};
pub use wentzell::{
    sample_curves, transfer_check, wentzell_eigs, wentzell_eigs_detailed, DomainCurves,
    EigencurveProvider, EigencurveSample, SyntheticCurves, TransferCheck, WentzellEig,
    WentzellParams,
};
