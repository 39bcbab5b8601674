//! Spectral analysis of time-dependent birth-death and random-walk
//! tridiagonal matrices.
//!
//! A birth-death matrix of size n+1 is tridiagonal with diagonal entries
//! `a_j(t) + b_j(t)`, superdiagonal `a_j(t)` and subdiagonal `b_{j+1}(t)`,
//! where the coefficient functions are closed-form expressions in `t` with
//! `a_j > 0`, `b_j > 0` (j ≥ 1) and `b_0 ≥ 0` on the domain of interest. A
//! random-walk matrix has zero diagonal, superdiagonal `c_j(t)` and
//! subdiagonal `1 - c_{j+1}(t)` with probabilities `0 < c_j < 1` (and
//! `c_0 ≤ 1`). Both are diagonally similar to symmetric tridiagonal matrices,
//! so their spectra are real and simple.
//!
//! The crate provides:
//!
//! * [`expr`] — parsing, canonical printing, and dual-number evaluation of
//!   coefficient expressions in one variable `t`;
//! * [`model`] — matrix specifications, assembly of the general and
//!   symmetrized forms, the walk-to-birth-death shift transform, and the
//!   even-size square-root reduction of walk matrices;
//! * [`problem`] — TOML problem files describing a spec and its `t` domain;
//! * [`eigen`] — bisection eigenvalues via Sturm sign counts, three-term
//!   eigenvector recursions with residual certification, sign-change counts,
//!   and interlacing checks;
//! * [`calculus`] — eigenvalue bounds and four algebraically equivalent
//!   quadratic-form expansions of the eigenvalue derivative dλ_k/dt, which
//!   must agree to certification tolerance;
//! * [`monotonicity`] — coefficient-level criteria that certify the sign of
//!   extreme (or all) eigenvalue derivatives, with per-index witness traces,
//!   and interval scans over the `t` domain;
//! * [`oracle`] — an independent dense eigensolver (cyclic Jacobi), central
//!   finite-difference derivatives with Richardson refinement, and a registry
//!   of closed-form reference values;
//! * [`report`] and [`cli`] — deterministic CSV/report output and the
//!   `bd-spectra` command-line front end.

pub mod calculus;
pub mod cli;
pub mod dual;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod model;
pub mod monotonicity;
pub mod oracle;
pub mod problem;
pub mod report;

pub use dual::Dual;
pub use error::{CoeffKind, DomainOp, Error, Result};
pub use expr::{CoeffExpr, Expr};
