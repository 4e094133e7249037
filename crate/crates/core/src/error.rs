//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Domain parameters are out of range, the DSL string is malformed, or
    /// the requested operation is undefined for this domain.
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    /// The (domain, p, solver) combination is outside what any solver
    /// supports, e.g. a full spectrum of a p ≠ 2 ball.
    #[error("unsupported combination: {0}")]
    Unsupported(String),

    /// A spectrum merge cannot certify the first k values of the union
    /// because one part supplies too few entries and no usable tail bound.
    #[error(
        "undersupplied component {component}: {supplied} value(s) up to {last_value:e} \
         cannot certify position {needed} of the union"
    )]
    UndersuppliedComponent {
        component: usize,
        supplied: usize,
        last_value: f64,
        needed: usize,
    },

    /// A root scan found no sign change in the allowed range.
    #[error("bracket failure: {0}")]
    BracketFailure(String),

    /// An iterative solve stopped before reaching its tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A fixed-point bracket extends to α < 0 but the active eigenvalue
    /// provider only supports α ≥ 0.
    #[error("needs signed-α solver: {0}")]
    NeedsSignedAlphaSolver(String),

    /// Mesh validation failed (bad indices, inverted triangles, open or
    /// over-covered boundary).
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file: {0}")]
    MeshFile(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical
    /// breakdown; the CLI maps these to exit code 2, the rest to 3.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidDomain(_)
                | Error::Unsupported(_)
                | Error::InvalidMesh(_)
                | Error::MeshFile(_)
                | Error::Io(_)
        )
    }
}
