//! Crate-wide error taxonomy.
//!
//! Every fallible operation in this crate reports one of the variants below.
//! The variants split into three families, which the CLI maps onto exit codes:
//!
//! * input errors (malformed expressions, bad problem files, unknown criteria)
//!   carry enough context to point at the offending key or byte offset;
//! * validity errors (coefficient positivity, transition-probability range,
//!   evaluation domain) name the time `t` and the index `j` at which the
//!   violation occurred;
//! * numerical-property errors (residuals, degenerate matrices, cross-form
//!   disagreement, iteration caps) signal that a computation could not be
//!   certified, never silently degrade.

use thiserror::Error;

/// Which coefficient family an index refers to in a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    /// Up/birth coefficient `a_j`.
    A,
    /// Down/death coefficient `b_j`.
    B,
    /// Walk transition probability `c_j`.
    C,
}

impl std::fmt::Display for CoeffKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoeffKind::A => write!(f, "a"),
            CoeffKind::B => write!(f, "b"),
            CoeffKind::C => write!(f, "c"),
        }
    }
}

/// The operation that triggered an evaluation-domain error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainOp {
    /// Division with a zero divisor.
    Division,
    /// Square root of a non-positive argument.
    Sqrt,
    /// Natural logarithm of a non-positive argument.
    Ln,
    /// Power with a non-positive base (evaluated as exp(y·ln x)).
    Pow,
}

impl std::fmt::Display for DomainOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainOp::Division => write!(f, "division by zero"),
            DomainOp::Sqrt => write!(f, "square root of non-positive value"),
            DomainOp::Ln => write!(f, "logarithm of non-positive value"),
            DomainOp::Pow => write!(f, "power with non-positive base"),
        }
    }
}

/// Unified error type for the whole crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The expression text is not well formed; `offset` is the byte offset of
    /// the first character that could not be consumed.
    #[error("syntax error at offset {offset}: {detail}")]
    Syntax { offset: usize, detail: String },

    /// An identifier other than `t`, `sqrt`, `exp`, `ln` appeared.
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    /// An arithmetic operation left the real domain while evaluating an
    /// expression at a concrete `t`; `subexpr` is the canonical rendering of
    /// the offending subexpression.
    #[error("{op} in `{subexpr}` at t = {t}")]
    Domain {
        op: DomainOp,
        subexpr: String,
        t: f64,
    },

    /// A birth-death coefficient violated the structural sign requirements
    /// (`a_j > 0` for all j, `b_j > 0` for j ≥ 1, `b_0 ≥ 0`) at `t`.
    #[error("positivity violation: {which}_{j} = {value} at t = {t}")]
    Positivity {
        j: usize,
        which: CoeffKind,
        value: f64,
        t: f64,
    },

    /// A walk probability left its admissible range (`0 < c_0 ≤ 1`,
    /// `0 < c_j < 1` for j ≥ 1) at `t`.
    #[error("range violation: c_{j} = {value} outside admissible range at t = {t}")]
    Range { j: usize, value: f64, t: f64 },

    /// The even-order reduction of a walk matrix was requested for a matrix of
    /// odd size.
    #[error("matrix size {size} is odd; the square-root reduction needs an even size")]
    OddOrder { size: usize },

    /// A symmetric tridiagonal matrix had a zero off-diagonal entry at slot
    /// `j`, so eigenvector recursions and sign-count arguments break down.
    #[error("degenerate off-diagonal entry at position {j}")]
    DegenerateOffDiagonal { j: usize },

    /// The computed eigenvector failed the residual acceptance bound even
    /// after the fallback refinement.
    #[error("eigenvector residual {residual} exceeds bound {bound} for eigenvalue {lambda}")]
    ResidualTooLarge {
        lambda: f64,
        residual: f64,
        bound: f64,
    },

    /// A sign-change count was requested for a vector that is identically zero.
    #[error("sign-change count undefined for the all-zero vector")]
    AllZero,

    /// Two algebraically equivalent derivative expansions disagreed beyond the
    /// certification tolerance — an implementation bug, never a data issue.
    #[error(
        "derivative form mismatch at t = {t}, k = {k}: {form_a} = {value_a} vs {form_b} = {value_b}"
    )]
    FormMismatch {
        t: f64,
        k: usize,
        form_a: String,
        value_a: f64,
        form_b: String,
        value_b: f64,
    },

    /// An iterative method hit its iteration cap before reaching its
    /// convergence criterion.
    #[error("{what} failed to converge within {iterations} iterations")]
    Convergence { what: String, iterations: usize },

    /// Malformed input outside expression text: problem files, CLI arguments,
    /// criterion names.
    #[error("{0}")]
    Input(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
