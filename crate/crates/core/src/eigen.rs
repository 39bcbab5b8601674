//! Eigenvalues and eigenvectors of symmetric tridiagonal matrices.
//!
//! Eigenvalues come from bisection driven by Sturm sign counts: the number of
//! negative pivots in the LDLᵀ factorization of M − xI equals the number of
//! eigenvalues strictly below x. With all off-diagonal entries nonzero and
//! positive the matrix is a Jacobi matrix, so its eigenvalues are simple and
//! the oscillation theorem fixes the eigenvector sign pattern: for ascending
//! eigenvalues λ_0 < … < λ_n, the eigenvector of λ_k changes sign exactly
//! n − k times (the top eigenvector is sign-constant by Perron–Frobenius,
//! the bottom one alternates).
//!
//! Eigenvectors use the three-term polynomial recursion fixed by a first
//! coordinate of 1:
//!
//! ```text
//! q_{-1} = 0,  q_0 = 1,
//! q_{j+1} = ((λ − diag_j) q_j − off_{j-1} q_{j-1}) / off_j .
//! ```
//!
//! The recursion can lose accuracy for interior eigenvalues, so every vector
//! is certified by its residual ‖Mq − λq‖∞ / ‖q‖∞; on failure a shifted
//! inverse-iteration fallback (tridiagonal LU with partial pivoting) refines
//! the vector, and only a vector passing the residual bound is returned.

use crate::error::{Error, Result};
use crate::model::{assemble_s, BirthDeathSpec, TriSym};

/// Residual acceptance bound for eigenvectors: ‖Mq − λq‖∞ / ‖q‖∞ ≤ this.
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// Default bisection tolerance: 1e-13 · max(1, ‖M‖∞).
#[must_use]
pub fn default_tol(m: &TriSym) -> f64 {
    1e-13 * m.norm_inf().max(1.0)
}

/// Number of eigenvalues of `m` strictly less than `x`.
///
/// Runs the LDLᵀ pivot recursion `d ← (diag_j − x) − off_{j-1}² / d` and
/// counts negative pivots; pivots closer to zero than a sign-preserving floor
/// are pushed away from it so the recursion never divides by zero.
#[must_use]
pub fn sturm_count(m: &TriSym, x: f64) -> usize {
    let floor = f64::EPSILON * f64::EPSILON * m.norm_inf().max(1.0);
    let mut d = 1.0f64;
    let mut count = 0;
    for j in 0..m.size() {
        let off2 = if j == 0 {
            0.0
        } else {
            m.off[j - 1] * m.off[j - 1]
        };
        d = (m.diag[j] - x) - off2 / d;
        if d.abs() < floor {
            d = if d.is_sign_negative() { -floor } else { floor };
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Padded Gershgorin bracket guaranteed to contain the whole spectrum.
#[must_use]
pub fn gershgorin_bracket(m: &TriSym) -> (f64, f64) {
    let size = m.size();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..size {
        let mut r = 0.0;
        if j > 0 {
            r += m.off[j - 1].abs();
        }
        if j + 1 < size {
            r += m.off[j].abs();
        }
        lo = lo.min(m.diag[j] - r);
        hi = hi.max(m.diag[j] + r);
    }
    (lo - 1.0, hi + 1.0)
}

/// All eigenvalues in ascending order, each bisected to interval width `tol`
/// (or the floating-point resolution at the eigenvalue, whichever is coarser).
///
/// Requires every off-diagonal entry nonzero; a zero entry would decouple the
/// matrix and break the simplicity guarantees, so it is reported rather than
/// silently accepted.
pub fn eigenvalues_bisect(m: &TriSym, tol: f64) -> Result<Vec<f64>> {
    for (j, &o) in m.off.iter().enumerate() {
        if o == 0.0 {
            return Err(Error::DegenerateOffDiagonal { j });
        }
    }
    let tol = if tol > 0.0 { tol } else { default_tol(m) };
    let (lo, hi) = gershgorin_bracket(m);
    let size = m.size();
    let mut out = Vec::with_capacity(size);
    const MAX_ITER: usize = 200;
    for k in 0..size {
        let mut a = lo;
        let mut b = hi;
        let mut iter = 0;
        loop {
            let mid = 0.5 * (a + b);
            let width = b - a;
            if width <= tol || width <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
                out.push(mid);
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::Convergence {
                    what: format!("bisection for eigenvalue {k}"),
                    iterations: MAX_ITER,
                });
            }
            if sturm_count(m, mid) <= k {
                a = mid;
            } else {
                b = mid;
            }
        }
    }
    Ok(out)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// ‖Mq − λq‖∞ / ‖q‖∞.
fn residual_ratio(m: &TriSym, lambda: f64, q: &[f64]) -> f64 {
    let size = m.size();
    let mut worst: f64 = 0.0;
    for j in 0..size {
        let mut r = (m.diag[j] - lambda) * q[j];
        if j > 0 {
            r += m.off[j - 1] * q[j - 1];
        }
        if j + 1 < size {
            r += m.off[j] * q[j + 1];
        }
        worst = worst.max(r.abs());
    }
    worst / inf_norm(q)
}

/// Solve (M − shift·I) x = rhs in place by tridiagonal LU with partial
/// pivoting; pivots too close to zero are replaced by a tiny value of the
/// same sign (inverse iteration wants near-singular systems).
fn solve_shifted(m: &TriSym, shift: f64, rhs: &mut [f64]) {
    let n = m.size();
    let tiny = f64::EPSILON * f64::EPSILON * m.norm_inf().max(1.0);
    let fix = |p: f64| -> f64 {
        if p.abs() < tiny {
            if p.is_sign_negative() {
                -tiny
            } else {
                tiny
            }
        } else {
            p
        }
    };
    let mut d: Vec<f64> = m.diag.iter().map(|&x| x - shift).collect();
    let mut du: Vec<f64> = m.off.clone();
    let dl: Vec<f64> = m.off.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            // No row interchange.
            let fact = dl[i] / fix(d[i]);
            d[i + 1] -= fact * du[i];
            rhs[i + 1] -= fact * rhs[i];
        } else {
            // Interchange rows i and i+1.
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            du[i] = temp;
            let t0 = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = t0 - fact * rhs[i + 1];
        }
    }
    // Back substitution.
    rhs[n - 1] /= fix(d[n - 1]);
    if n > 1 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / fix(d[n - 2]);
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / fix(d[i]);
    }
}

/// Eigenvector for eigenvalue `lambda`, normalized so the first coordinate
/// is exactly 1. Tries the three-term recursion first; if its residual
/// exceeds [`RESIDUAL_BOUND`], falls back to shifted inverse iteration, and
/// errs if even that cannot be certified.
pub fn eigenvector_q(m: &TriSym, lambda: f64) -> Result<Vec<f64>> {
    let size = m.size();
    for (j, &o) in m.off.iter().enumerate() {
        if o == 0.0 {
            return Err(Error::DegenerateOffDiagonal { j });
        }
    }
    let mut q = vec![0.0; size];
    q[0] = 1.0;
    if size > 1 {
        q[1] = (lambda - m.diag[0]) / m.off[0];
        for j in 1..size - 1 {
            q[j + 1] = ((lambda - m.diag[j]) * q[j] - m.off[j - 1] * q[j - 1]) / m.off[j];
        }
    }
    let recursion_ok = q.iter().all(|x| x.is_finite());
    if recursion_ok && residual_ratio(m, lambda, &q) <= RESIDUAL_BOUND {
        return Ok(q);
    }

    // Inverse iteration fallback from a mild perturbation of the recursion
    // output (or a flat vector if the recursion overflowed).
    let shift = lambda + 1e-14 * m.norm_inf().max(1.0);
    let mut v = if recursion_ok {
        let s = inf_norm(&q);
        q.iter().map(|&x| x / s).collect::<Vec<f64>>()
    } else {
        vec![1.0; size]
    };
    for _ in 0..3 {
        solve_shifted(m, shift, &mut v);
        let s = inf_norm(&v);
        if s == 0.0 || !s.is_finite() {
            v = vec![1.0; size];
            continue;
        }
        for x in &mut v {
            *x /= s;
        }
    }
    let scale = inf_norm(&v);
    if v[0].abs() < 1e-12 * scale {
        return Err(Error::ResidualTooLarge {
            lambda,
            residual: f64::INFINITY,
            bound: RESIDUAL_BOUND,
        });
    }
    let v0 = v[0];
    for x in &mut v {
        *x /= v0;
    }
    let r = residual_ratio(m, lambda, &v);
    if r <= RESIDUAL_BOUND {
        Ok(v)
    } else {
        Err(Error::ResidualTooLarge {
            lambda,
            residual: r,
            bound: RESIDUAL_BOUND,
        })
    }
}

/// Number of sign changes in `v`, skipping exact zeros. The all-zero vector
/// has no well-defined count and is reported as an error.
pub fn sign_changes(v: &[f64]) -> Result<usize> {
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for &x in v {
        if x == 0.0 {
            continue;
        }
        if let Some(p) = prev {
            if p * x < 0.0 {
                count += 1;
            }
        }
        prev = Some(x);
    }
    if prev.is_none() {
        return Err(Error::AllZero);
    }
    Ok(count)
}

/// Full spectral data: ascending eigenvalues and their recursion-normalized
/// eigenvectors (`qvecs[k]` is the eigenvector of `values[k]`, with
/// `qvecs[k][0] = 1`).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub qvecs: Vec<Vec<f64>>,
}

/// Compute the full spectrum of `m` with the default tolerance.
pub fn spectrum(m: &TriSym) -> Result<Spectrum> {
    let values = eigenvalues_bisect(m, default_tol(m))?;
    for w in values.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Convergence {
                what: format!("eigenvalue separation ({} vs {})", w[0], w[1]),
                iterations: 0,
            });
        }
    }
    let mut qvecs = Vec::with_capacity(values.len());
    for &lambda in &values {
        qvecs.push(eigenvector_q(m, lambda)?);
    }
    Ok(Spectrum { values, qvecs })
}

/// Check that the eigenvalues of each leading principal section strictly
/// interlace those of the next larger section, with a slack of
/// 1e-12 · max(1, ‖M‖∞) to absorb bisection error. Sections of the general
/// and symmetrized forms share spectra, so the symmetric form is used.
pub fn interlacing_check(spec: &BirthDeathSpec, t: f64) -> Result<bool> {
    let s = assemble_s(spec, t)?;
    let slack = 1e-12 * s.norm_inf().max(1.0);
    let mut prev: Option<Vec<f64>> = None;
    for size in 1..=s.size() {
        let section = TriSym {
            diag: s.diag[..size].to_vec(),
            off: s.off[..size.saturating_sub(1)].to_vec(),
        };
        let eigs = eigenvalues_bisect(&section, default_tol(&s))?;
        if let Some(small) = prev {
            // small has `size-1` values, eigs has `size`.
            for i in 0..small.len() {
                if !(eigs[i] < small[i] + slack && small[i] < eigs[i + 1] + slack) {
                    return Ok(false);
                }
            }
        }
        prev = Some(eigs);
    }
    Ok(true)
}
