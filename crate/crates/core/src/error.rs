use std::fmt;

use thiserror::Error;

/// A single violated constraint of an admissible or compatible pair.
///
/// Indices are stored 0-based and displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Symmetry(usize, usize),
    RowMarginal(usize),
    ColumnMarginal(usize),
    IntegralityRho(usize),
    IntegralityMu(usize, usize),
    Negative(usize, usize),
    NotDistribution,
    DiagonalNonZero(usize),
    Forbidden(usize, usize, usize, usize),
    SymmetryQuad(usize, usize, usize, usize),
    Marginal(usize, usize),
    Dimension,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Symmetry(i, j) => write!(f, "symmetry ({},{})", i + 1, j + 1),
            Violation::RowMarginal(i) => write!(f, "row marginal {}", i + 1),
            Violation::ColumnMarginal(i) => write!(f, "column marginal {}", i + 1),
            Violation::IntegralityRho(i) => write!(f, "integrality ρ_{}", i + 1),
            Violation::IntegralityMu(i, j) => write!(f, "integrality μ_{}{}", i + 1, j + 1),
            Violation::Negative(i, j) => write!(f, "negative entry ({},{})", i + 1, j + 1),
            Violation::NotDistribution => write!(f, "class sizes do not sum to n"),
            Violation::DiagonalNonZero(i) => write!(f, "diagonal μ_{}{} must vanish", i + 1, i + 1),
            Violation::Forbidden(i, j, s, t) => {
                write!(f, "forbidden entry ({},{},{},{})", i + 1, j + 1, s + 1, t + 1)
            }
            Violation::SymmetryQuad(i, j, s, t) => {
                write!(f, "symmetry ({},{},{},{})", i + 1, j + 1, s + 1, t + 1)
            }
            Violation::Marginal(i, j) => write!(f, "marginal ({},{})", i + 1, j + 1),
            Violation::Dimension => write!(f, "dimension mismatch"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dn must be even (n={n}, d={d})")]
    OddCloneCount { n: usize, d: usize },

    #[error("{what} exceeds the oracle limit: {got} > {limit}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("inadmissible input: {}", join(.0))]
    Inadmissible(Vec<Violation>),

    #[error("not doubly stochastic: row residual {row_residual:.3e}, column residual {col_residual:.3e}")]
    NotDoublyStochastic { row_residual: f64, col_residual: f64 },

    #[error("projection did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("support violation at index {0}: first argument is positive where the second vanishes")]
    SupportViolation(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("d = {d} coincides with the threshold for k = {k}")]
    AtThreshold { d: f64, k: usize },

    #[error("interval for k = {k} contains {count} integers")]
    MultipleIntegers { k: usize, count: usize },

    #[error("region admits no matrix: {0}")]
    InfeasibleRegion(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors raised by an explicit feasibility guard.
    pub fn is_guard(&self) -> bool {
        match self {
            Error::GuardExceeded { .. } => true,
            Error::Context { source, .. } => source.is_guard(),
            _ => false,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
