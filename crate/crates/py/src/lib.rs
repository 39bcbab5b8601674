//! Python bindings: evaluate coefficient expressions, compute spectra,
//! certified eigenvalue derivatives, and monotonicity scans of problem
//! files, returning plain Python types throughout. Every library error is
//! surfaced as a `ValueError` carrying the library's own message.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bd_spectra::calculus::{bounds, lambda_prime_checked};
use bd_spectra::expr::CoeffExpr;
use bd_spectra::model::{rw_to_bd_hat, BirthDeathSpec};
use bd_spectra::monotonicity::{classify, scan, Criterion, ModelKind};
use bd_spectra::oracle::problem_eigenvalues;
use bd_spectra::problem::{load_problem, ProblemSpec};

fn to_py_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(path: &str) -> PyResult<ProblemSpec> {
    load_problem(std::path::Path::new(path)).map_err(to_py_err)
}

/// The birth-death spec whose eigenvalue derivatives coincide with the
/// problem's own: the spec itself, or the identity-shift companion of a walk.
fn companion(problem: &ProblemSpec) -> BirthDeathSpec {
    match problem {
        ProblemSpec::BirthDeath(spec) => spec.clone(),
        ProblemSpec::RandomWalk(spec) => rw_to_bd_hat(spec),
    }
}

/// Evaluate a coefficient expression, returning `(value, derivative)`.
#[pyfunction]
fn eval_coeff(src: &str, t: f64) -> PyResult<(f64, f64)> {
    let expr = CoeffExpr::parse(src).map_err(to_py_err)?;
    let d = expr.eval_dual(t).map_err(to_py_err)?;
    Ok((d.value, d.deriv))
}

/// Problem metadata as `(kind, n, (lo, hi))`.
#[pyfunction]
fn describe(path: &str) -> PyResult<(String, usize, (f64, f64))> {
    let problem = load(path)?;
    Ok((problem.kind().to_string(), problem.n(), problem.domain()))
}

/// Ascending eigenvalues of the problem's matrix at `t`.
#[pyfunction]
fn eigenvalues(path: &str, t: f64) -> PyResult<Vec<f64>> {
    problem_eigenvalues(&load(path)?, t).map_err(to_py_err)
}

/// Certified derivatives dλ_k/dt at `t`, ascending k. For walk problems
/// these are the derivatives of the walk eigenvalues themselves (the
/// identity shift leaves derivatives unchanged).
#[pyfunction]
fn derivatives(path: &str, t: f64) -> PyResult<Vec<f64>> {
    let spec = companion(&load(path)?);
    (0..spec.size())
        .map(|k| lambda_prime_checked(&spec, t, k).map_err(to_py_err))
        .collect()
}

/// Closed-form spectral bounds `(m1, m2, mu)` at `t`, satisfying
/// m1 < λ_max ≤ m2 and 0 < λ_min < μ (walk bounds are shifted down by one).
#[pyfunction]
fn spectral_bounds(path: &str, t: f64) -> PyResult<(f64, f64, f64)> {
    let problem = load(path)?;
    let shift = match problem {
        ProblemSpec::BirthDeath(_) => 0.0,
        ProblemSpec::RandomWalk(_) => -1.0,
    };
    let bs = bounds(&companion(&problem), t).map_err(to_py_err)?;
    Ok((bs.m1 + shift, bs.m2 + shift, bs.mu + shift))
}

/// Whether the problem satisfies the named criterion at `t`. Both the arrow
/// spelling (`B_MAX↑`) and the ASCII alias (`B_MAX_UP`) are accepted.
#[pyfunction]
fn member(path: &str, criterion: &str, t: f64) -> PyResult<bool> {
    let problem = load(path)?;
    let criterion = Criterion::parse(criterion).map_err(to_py_err)?;
    Ok(classify(&problem, criterion, t).map_err(to_py_err)?.member)
}

/// Maximal subintervals (on an interior grid of the given size) where the
/// named criterion holds, as a list of `(lo, hi)` pairs.
#[pyfunction]
fn scan_intervals(path: &str, criterion: &str, grid: usize) -> PyResult<Vec<(f64, f64)>> {
    let problem = load(path)?;
    let criterion = Criterion::parse(criterion).map_err(to_py_err)?;
    Ok(scan(&problem, criterion, grid)
        .map_err(to_py_err)?
        .into_iter()
        .map(|run| (run.lo, run.hi))
        .collect())
}

/// Criterion tags applicable to a problem kind (`"birth_death"` or
/// `"random_walk"`), in canonical order.
#[pyfunction]
fn criteria(kind: &str) -> PyResult<Vec<String>> {
    let kind = match kind {
        "birth_death" => ModelKind::BirthDeath,
        "random_walk" => ModelKind::RandomWalk,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown problem kind {other:?}; expected \"birth_death\" or \"random_walk\""
            )))
        }
    };
    Ok(Criterion::for_kind(kind)
        .into_iter()
        .map(|c| c.tag().to_string())
        .collect())
}

#[pymodule]
fn bd_spectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(eval_coeff, m)?)?;
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(derivatives, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(member, m)?)?;
    m.add_function(wrap_pyfunction!(scan_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(criteria, m)?)?;
    Ok(())
}
