//! Independent ground truth for cross-validation: a dense cyclic-Jacobi
//! eigensolver that shares no code with the Sturm bisection path, central
//! finite-difference eigenvalue slopes with Richardson refinement, and a
//! small registry of closed-form reference curves.
//!
//! Everything here is deliberately slow and simple — the point is that a
//! disagreement between this module and the production path indicts the
//! production path.

use crate::calculus::lambda_prime_checked;
use crate::eigen::{default_tol, eigenvalues_bisect};
use crate::error::{Error, Result};
use crate::model::{assemble_s, assemble_s_walk, rw_to_bd_hat, TriGeneral, TriSym};
use crate::problem::ProblemSpec;

/// Largest matrix the dense solver accepts.
pub const DENSE_SIZE_CAP: usize = 64;

/// Default central-difference step.
pub const FD_DEFAULT_H: f64 = 1e-6;

/// Relative tolerance for finite-difference vs quadratic-form agreement.
pub const FD_AGREEMENT_RTOL: f64 = 1e-5;

/// Jacobi sweeps before giving up; convergence is quadratic, so the cap is
/// generous even at the size cap.
const JACOBI_SWEEP_CAP: usize = 50;

/// Relative difference between the h and h/2 central-difference estimates
/// beyond which the Richardson extrapolation replaces the plain estimate.
const RICHARDSON_TRIGGER_RTOL: f64 = 1e-4;

// ---------------------------------------------------------------------------
// Dense eigensolver
// ---------------------------------------------------------------------------

/// All eigenvalues of a dense symmetric matrix, ascending, by cyclic Jacobi
/// rotations.
///
/// Errors with [`Error::Input`] on non-square input or sizes above
/// [`DENSE_SIZE_CAP`], and with [`Error::Convergence`] if the off-diagonal
/// mass has not collapsed after the sweep cap.
pub fn dense_eig(mat: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = mat.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    if m > DENSE_SIZE_CAP {
        return Err(Error::Input(format!(
            "dense eigensolver is capped at size {DENSE_SIZE_CAP}, got {m}"
        )));
    }
    if mat.iter().any(|row| row.len() != m) {
        return Err(Error::Input(format!(
            "dense eigensolver needs a square matrix; got {m} rows of uneven length"
        )));
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let frob: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let stop = f64::EPSILON * (1.0 + frob);

    for _ in 0..JACOBI_SWEEP_CAP {
        let off: f64 = (0..m)
            .flat_map(|p| ((p + 1)..m).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            let mut values: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
            values.sort_by(f64::total_cmp);
            return Ok(values);
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle chosen to zero the (p, q) entry.
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for row in a.iter_mut() {
                    let akp = row[p];
                    let akq = row[q];
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (ep, eq) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let apk = *ep;
                    let aqk = *eq;
                    *ep = c * apk - s * aqk;
                    *eq = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::Convergence {
        what: "dense Jacobi eigensolver".into(),
        iterations: JACOBI_SWEEP_CAP,
    })
}

/// Expand a symmetric tridiagonal matrix to dense form.
#[must_use]
fn expand_sym(m: &TriSym) -> Vec<Vec<f64>> {
    let size = m.size();
    let mut dense = vec![vec![0.0; size]; size];
    for j in 0..size {
        dense[j][j] = m.diag[j];
        if j + 1 < size {
            dense[j][j + 1] = m.off[j];
            dense[j + 1][j] = m.off[j];
        }
    }
    dense
}

/// Dense eigenvalues of a symmetric tridiagonal matrix.
pub fn dense_eig_sym(m: &TriSym) -> Result<Vec<f64>> {
    dense_eig(&expand_sym(m))
}

/// Dense eigenvalues of an unsymmetric tridiagonal matrix whose paired
/// off-diagonal products are positive, via diagonal similarity to symmetric
/// form. Errors with [`Error::DegenerateOffDiagonal`] when a product is not
/// positive.
pub fn dense_eig_general(m: &TriGeneral) -> Result<Vec<f64>> {
    let size = m.size();
    let mut off = vec![0.0; size.saturating_sub(1)];
    for (j, slot) in off.iter_mut().enumerate() {
        let product = m.sup[j] * m.sub[j];
        if product <= 0.0 {
            return Err(Error::DegenerateOffDiagonal { j });
        }
        *slot = product.sqrt();
    }
    dense_eig_sym(&TriSym {
        diag: m.diag.clone(),
        off,
    })
}

// ---------------------------------------------------------------------------
// Finite-difference derivatives
// ---------------------------------------------------------------------------

/// Central-difference slope of the k-th ascending eigenvalue of a spectrum
/// map `t ↦ eigenvalues`, with step `h`.
///
/// Computes the plain central difference at `h`; when the `h` and `h/2`
/// estimates differ by more than 1e-4 relative, returns the Richardson
/// extrapolation `(4·D(h/2) − D(h))/3` instead. Sorted-index matching across
/// the stencil is valid because the spectra here are simple for every `t`,
/// so sorted order cannot swap without a collision.
pub fn fd_lambda_prime<F>(eigenvalues: F, t: f64, k: usize, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Input(format!(
            "finite-difference step must be positive and finite, got {h}"
        )));
    }
    let diff = |hh: f64| -> Result<f64> {
        let plus = eigenvalues(t + hh)?;
        let minus = eigenvalues(t - hh)?;
        if k >= plus.len() || k >= minus.len() {
            return Err(Error::Input(format!(
                "eigenvalue index {k} out of range for spectrum of size {}",
                plus.len().min(minus.len())
            )));
        }
        Ok((plus[k] - minus[k]) / (2.0 * hh))
    };
    let d_h = diff(h)?;
    let d_half = diff(0.5 * h)?;
    if (d_h - d_half).abs() > RICHARDSON_TRIGGER_RTOL * (1.0 + d_half.abs()) {
        Ok((4.0 * d_half - d_h) / 3.0)
    } else {
        Ok(d_h)
    }
}

/// Ascending eigenvalues of the problem's matrix at `t` (the walk matrix
/// itself for walk problems), via the Sturm bisection path.
pub fn problem_eigenvalues(problem: &ProblemSpec, t: f64) -> Result<Vec<f64>> {
    let s = match problem {
        ProblemSpec::BirthDeath(spec) => assemble_s(spec, t)?,
        ProblemSpec::RandomWalk(spec) => assemble_s_walk(spec, t)?,
    };
    let tol = default_tol(&s);
    eigenvalues_bisect(&s, tol)
}

/// Finite-difference slope of the k-th ascending eigenvalue of a problem.
///
/// Errors with [`Error::Input`] when the stencil `[t−h, t+h]` leaves the
/// problem's open domain.
pub fn fd_problem(problem: &ProblemSpec, t: f64, k: usize, h: f64) -> Result<f64> {
    let (lo, hi) = problem.domain();
    if t - h <= lo || t + h >= hi {
        return Err(Error::Input(format!(
            "finite-difference stencil [{}, {}] leaves the domain ({lo}, {hi})",
            t - h,
            t + h
        )));
    }
    fd_lambda_prime(|tt| problem_eigenvalues(problem, tt), t, k, h)
}

// ---------------------------------------------------------------------------
// Closed-form registry
// ---------------------------------------------------------------------------

/// Closed-form eigenvalue curves for the bundled reference problems.
///
/// The two-site walk curve ships in two algebraically different candidate
/// forms; [`adjudicate_two_site_max`] decides which one the dense solver
/// confirms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// Middle eigenvalue of the reciprocal-coefficient example:
    /// `1/t + 1/(1−t)` on (0, 1).
    ReciprocalMiddle,
    /// Candidate A for the largest two-site walk eigenvalue:
    /// `sqrt(2t) / ((1+t)(1+2t))`.
    TwoSiteWalkMaxA,
    /// Candidate B for the largest two-site walk eigenvalue:
    /// `sqrt(2t / ((1+t)(1+2t)))`.
    TwoSiteWalkMaxB,
}

impl ClosedForm {
    /// All registered curves.
    pub const ALL: &'static [ClosedForm] = &[
        ClosedForm::ReciprocalMiddle,
        ClosedForm::TwoSiteWalkMaxA,
        ClosedForm::TwoSiteWalkMaxB,
    ];

    /// Registry tag.
    #[must_use]
    pub fn tag(self) -> &'static str {
        match self {
            ClosedForm::ReciprocalMiddle => "reciprocal_middle",
            ClosedForm::TwoSiteWalkMaxA => "two_site_walk_max_a",
            ClosedForm::TwoSiteWalkMaxB => "two_site_walk_max_b",
        }
    }

    /// Look up a curve by tag.
    pub fn parse(name: &str) -> Result<ClosedForm> {
        ClosedForm::ALL
            .iter()
            .copied()
            .find(|c| c.tag() == name)
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown closed form {name:?}; valid tags: {}",
                    ClosedForm::ALL
                        .iter()
                        .map(|c| c.tag())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
    }

    /// Evaluate the curve at `t ∈ (0, 1)`.
    #[must_use]
    pub fn eval(self, t: f64) -> f64 {
        match self {
            ClosedForm::ReciprocalMiddle => 1.0 / t + 1.0 / (1.0 - t),
            ClosedForm::TwoSiteWalkMaxA => (2.0 * t).sqrt() / ((1.0 + t) * (1.0 + 2.0 * t)),
            ClosedForm::TwoSiteWalkMaxB => (2.0 * t / ((1.0 + t) * (1.0 + 2.0 * t))).sqrt(),
        }
    }
}

impl std::fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Outcome of comparing the two candidate formulas for the largest
/// eigenvalue of the two-site walk (`c_0 = 1/(1+t)`, `c_1 = 1/(1+2t)`)
/// against the dense 2×2 eigensolve.
#[derive(Debug, Clone)]
pub struct ClosedFormAdjudication {
    pub t: f64,
    /// Largest eigenvalue from the dense solver (authoritative).
    pub dense: f64,
    pub candidate_a: f64,
    pub candidate_b: f64,
    /// The candidate within 1e-10 relative of the dense value, if any.
    pub matched: Option<ClosedForm>,
}

/// Compare both registered two-site walk formulas against the dense solver
/// at `t ∈ (0, 1)`.
pub fn adjudicate_two_site_max(t: f64) -> Result<ClosedFormAdjudication> {
    let c0 = 1.0 / (1.0 + t);
    let c1 = 1.0 / (1.0 + 2.0 * t);
    let walk = TriGeneral {
        diag: vec![0.0, 0.0],
        sup: vec![c0],
        sub: vec![1.0 - c1],
    };
    let eigs = dense_eig_general(&walk)?;
    let dense = eigs[1];
    let candidate_a = ClosedForm::TwoSiteWalkMaxA.eval(t);
    let candidate_b = ClosedForm::TwoSiteWalkMaxB.eval(t);
    let tol = 1e-10 * (1.0 + dense.abs());
    let matched = if (dense - candidate_b).abs() <= tol {
        Some(ClosedForm::TwoSiteWalkMaxB)
    } else if (dense - candidate_a).abs() <= tol {
        Some(ClosedForm::TwoSiteWalkMaxA)
    } else {
        None
    };
    Ok(ClosedFormAdjudication {
        t,
        dense,
        candidate_a,
        candidate_b,
        matched,
    })
}

// ---------------------------------------------------------------------------
// Cross-validation reports
// ---------------------------------------------------------------------------

/// One finite-difference vs quadratic-form comparison, optionally annotated
/// with a registered closed-form value at the same `t`.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub t: f64,
    pub k: usize,
    pub fd_deriv: f64,
    pub form_deriv: f64,
    /// `|fd − form| ≤ 1e-5 · (1 + |form|)`.
    pub agree: bool,
    pub closed_form: Option<f64>,
}

/// Compare the finite-difference slope of λ_k against the quadratic-form
/// derivative at `t`. For walk problems the form derivative comes from the
/// identity-shift companion, whose eigenvalue slopes equal the walk's.
pub fn oracle_report(
    problem: &ProblemSpec,
    t: f64,
    k: usize,
    h: f64,
    closed: Option<ClosedForm>,
) -> Result<OracleReport> {
    let fd_deriv = fd_problem(problem, t, k, h)?;
    let form_deriv = match problem {
        ProblemSpec::BirthDeath(spec) => lambda_prime_checked(spec, t, k)?,
        ProblemSpec::RandomWalk(spec) => lambda_prime_checked(&rw_to_bd_hat(spec), t, k)?,
    };
    let agree = (fd_deriv - form_deriv).abs() <= FD_AGREEMENT_RTOL * (1.0 + form_deriv.abs());
    Ok(OracleReport {
        t,
        k,
        fd_deriv,
        form_deriv,
        agree,
        closed_form: closed.map(|c| c.eval(t)),
    })
}
