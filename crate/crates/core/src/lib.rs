//! Method-of-characteristics toolkit for the quasilinear equation
//! `(u_y² − 1) u_xx − 2 u_x u_y u_xy + u_x² u_yy = 0`: forward Cauchy
//! solver, recovery of initial data from characteristic families, and
//! geometry of the definition domain.

pub mod expr;
pub mod numerics;
pub mod plane;
pub mod cauchy;
pub mod inverse;
pub mod corpus;
pub mod geometry;
pub mod cli;

use thiserror::Error;

pub use cauchy::{build_solution, CauchyError, ImplicitSolution, InitialData, Invariant};
pub use corpus::{get_example, ExampleId, ExampleParams};
pub use expr::{ExprError, Expression};
pub use inverse::{CharacteristicFamily, Family, FamilySpec, InverseError};
pub use numerics::{NumericsError, Tolerance};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Cauchy(#[from] CauchyError),
    #[error(transparent)]
    Inverse(#[from] InverseError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures caused by the mathematics of the problem (points
    /// outside the definition domain, degenerations, ambiguous roots)
    /// rather than by bad input.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Expr(e) => matches!(e, ExprError::Domain(_)),
            Error::Cauchy(e) => cauchy_is_domain(e),
            Error::Inverse(e) => match e {
                InverseError::NoParameter { .. }
                | InverseError::AmbiguousParameter { .. }
                | InverseError::SingularPoint { .. }
                | InverseError::Degenerate { .. } => true,
                InverseError::Cauchy(e) => cauchy_is_domain(e),
                _ => false,
            },
            _ => false,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Expr(ExprError::Parse(_)) => "parse",
            Error::Expr(_) => "expression",
            Error::Numerics(_) => "numerics",
            Error::Cauchy(_) => "cauchy",
            Error::Inverse(_) => "inverse",
            Error::Corpus(_) => "corpus",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }
}

fn cauchy_is_domain(e: &CauchyError) -> bool {
    matches!(
        e,
        CauchyError::DegenerateSupport { .. }
            | CauchyError::OutsideDomain { .. }
            | CauchyError::AmbiguousRoot { .. }
            | CauchyError::SingularDirection { .. }
    )
}
