//! Eigenvalue bounds, auxiliary coefficient sequences, and four equivalent
//! quadratic-form expansions of the eigenvalue derivative dλ_k/dt.
//!
//! Throughout, `S(t)` is the symmetrized birth-death matrix with diagonal
//! `s_j = a_j + b_j` and off-diagonal `off_j = sqrt(P_j)`, `P_j = a_j b_{j+1}`.
//! Because `S` has simple eigenvalues, each λ_k(t) is differentiable and
//!
//! ```text
//! λ'_k = qᵀ S' q / qᵀ q
//! ```
//!
//! for the eigenvector q of λ_k. Expanding `qᵀ S' q` directly, or after
//! eliminating neighbors through the three-term recursion, yields four
//! algebraically identical forms with different per-index groupings:
//!
//! * `rawdot`   — Σ s'_j q_j² + 2 Σ off'_j q_j q_{j+1};
//! * `grouped`  — diagonal weights `s'_j + ℓ_j (λ − s_j)` with cross terms
//!   `sqrt(P_j) (√e_j)' q_{j-1} q_j`, where `ℓ_j = P'_j / (2 P_j)` and
//!   `e_j = P_{j-1} / P_j` (with `e_0 = 0`); the last index uses `ℓ_{n-1}`;
//! * `sumsq`    — pure squares `(s'_j + (Π'_j/Π_j)(λ − s_j)) q_j²` with the
//!   telescoped products `Π_n = 1`, `Π_j Π_{j+1} = P_j`;
//! * `newform`  — weights `(a'_j λ + D_j) / a_j` with cross terms
//!   `sqrt(a_{j-1}/b_j) D_j q_{j-1} q_j / a_j`, `D_j = a_j b'_j − a'_j b_j`.
//!
//! The four forms must agree to relative 1e-9; disagreement is an
//! implementation bug and is surfaced as a hard error, never smoothed over.
//! For a 1×1 matrix every form degenerates to the exact identity
//! λ' = a'_0 + b'_0 (the ℓ index underflows and is taken as 0).
//!
//! The module also provides coefficient-level spectral bounds: with
//! `m1 = max_j s_j` and `μ = min_j s_j`, and `m2` the smaller of a
//! row-doubling bound σ and a Gershgorin-type bound ρ, every valid spec
//! satisfies `m1 < λ_max ≤ m2` and `0 < λ_min < μ` (strictly for n ≥ 1).

use crate::dual::Dual;
use crate::eigen::{spectrum, Spectrum};
use crate::error::{Error, Result};
use crate::model::{symmetrize, BirthDeathSpec, Coefficients};

/// Relative tolerance for cross-form agreement certification.
pub const FORM_AGREEMENT_RTOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

/// Coefficient-level bounds on the spectrum at a fixed time.
///
/// `m1 < λ_max ≤ m2 = min(σ, ρ)` and `0 < λ_min < μ`, with equality
/// `λ_max = m1 = μ` only in the 1×1 case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet {
    /// Largest diagonal entry `max_j (a_j + b_j)`; strict lower bound for λ_max.
    pub m1: f64,
    /// Row-doubling upper bound.
    pub sigma: f64,
    /// Gershgorin-type upper bound using symmetrized off-diagonals.
    pub rho: f64,
    /// `min(sigma, rho)`; upper bound for λ_max.
    pub m2: f64,
    /// Smallest diagonal entry `min_j (a_j + b_j)`; strict upper bound for λ_min.
    pub mu: f64,
}

/// Compute all spectral bounds for `spec` at `t`.
pub fn bounds(spec: &BirthDeathSpec, t: f64) -> Result<BoundSet> {
    let co = spec.coefficients(t)?;
    Ok(bounds_from(&co))
}

/// Bounds from already-evaluated coefficients.
#[must_use]
pub fn bounds_from(co: &Coefficients) -> BoundSet {
    let n = co.a.len() - 1;
    let s = |j: usize| co.a[j].value + co.b[j].value;
    let p = |j: usize| co.a[j].value * co.b[j + 1].value;

    let mut m1 = f64::NEG_INFINITY;
    let mut mu = f64::INFINITY;
    for j in 0..=n {
        m1 = m1.max(s(j));
        mu = mu.min(s(j));
    }

    let sigma = if n == 0 {
        (2.0 * co.a[0].value + co.b[0].value).max(co.a[0].value + 2.0 * co.b[0].value)
    } else {
        let mut v = (2.0 * co.a[0].value + co.b[0].value).max(co.a[n].value + 2.0 * co.b[n].value);
        for i in 1..n {
            v = v.max(2.0 * s(i));
        }
        v
    };

    let rho = if n == 0 {
        s(0)
    } else {
        let mut v = (s(0) + p(0).sqrt()).max(s(n) + p(n - 1).sqrt());
        for i in 1..n {
            v = v.max(s(i) + p(i - 1).sqrt() + p(i).sqrt());
        }
        v
    };

    BoundSet {
        m1,
        sigma,
        rho,
        m2: sigma.min(rho),
        mu,
    }
}

// ---------------------------------------------------------------------------
// Auxiliary sequences
// ---------------------------------------------------------------------------

/// Derived coefficient sequences shared by the derivative forms and the
/// monotonicity criteria. Index ranges:
///
/// * `e`, `e_prime`, `sqrt_e_prime`, `ell`: length n (index j = 0..n-1;
///   `e_0 = 0` with zero derivatives by the off-range convention a_{-1} = 0);
/// * `pi`, `pi_log_deriv`: length n+1 (`pi[n] = 1`, `pi_log_deriv[n] = 0`);
/// * `chi`: length n+1, the positive eigenvector-magnitude sequence at the
///   spectral point 0: the eigen-recursion evaluated at λ = 0 gives
///   coordinates `(-1)^j chi_j`.
#[derive(Debug, Clone)]
pub struct AuxSequences {
    pub e: Vec<f64>,
    pub e_prime: Vec<f64>,
    pub sqrt_e_prime: Vec<f64>,
    pub ell: Vec<f64>,
    pub pi: Vec<f64>,
    pub pi_log_deriv: Vec<f64>,
    pub chi: Vec<f64>,
}

/// Compute all auxiliary sequences for `spec` at `t`.
pub fn aux_sequences(spec: &BirthDeathSpec, t: f64) -> Result<AuxSequences> {
    let co = spec.coefficients(t)?;
    Ok(aux_from(&co))
}

/// Auxiliary sequences from already-evaluated coefficients.
#[must_use]
pub fn aux_from(co: &Coefficients) -> AuxSequences {
    let n = co.a.len() - 1;
    let p: Vec<Dual> = (0..n).map(|j| co.a[j] * co.b[j + 1]).collect();

    let mut e = vec![0.0; n];
    let mut e_prime = vec![0.0; n];
    let mut sqrt_e_prime = vec![0.0; n];
    let mut ell = vec![0.0; n];
    for j in 0..n {
        ell[j] = p[j].deriv / (2.0 * p[j].value);
        if j >= 1 {
            let ed = p[j - 1] / p[j];
            e[j] = ed.value;
            e_prime[j] = ed.deriv;
            sqrt_e_prime[j] = (p[j - 1].sqrt() / p[j].sqrt()).deriv;
        }
    }

    // Downward product recursion.
    let mut pi = vec![1.0; n + 1];
    for j in (0..n).rev() {
        pi[j] = p[j].value / pi[j + 1];
    }

    // Alternating log-derivative sums, written parity-split the way the
    // closed products telescope: for n-k odd the + terms are P_{k}, P_{k+2},
    // ..., P_{n-1} and the - terms the odd offsets in between; for n-k even
    // the pairs (P_{k+2j}, P_{k+2j+1}) alternate. Both reduce to
    // Σ_{m=k}^{n-1} (-1)^{m-k} P'_m / P_m.
    let mut pi_log_deriv = vec![0.0; n + 1];
    let ld = |m: usize| p[m].deriv / p[m].value;
    for (k, slot) in pi_log_deriv.iter_mut().enumerate().take(n) {
        let mut acc = 0.0;
        if (n - k) % 2 == 1 {
            let half = (n - k - 1) / 2;
            for j in 0..=half {
                acc += ld(k + 2 * j);
            }
            for j in 1..=half {
                acc -= ld(k + 2 * j - 1);
            }
        } else {
            let half = (n - k - 2) / 2;
            for j in 0..=half {
                acc += ld(k + 2 * j);
                acc -= ld(k + 2 * j + 1);
            }
        }
        *slot = acc;
    }

    AuxSequences {
        e,
        e_prime,
        sqrt_e_prime,
        ell,
        pi,
        pi_log_deriv,
        chi: chi_recursion(co),
    }
}

/// The χ sequence by its two-term recursion: `χ_0 = 1` and
/// `χ_j = sqrt(a_{j-1}/b_j) χ_{j-1} + b_0 / (b_j d_j)`, where `d` is the
/// symmetrizing diagonal. All entries are positive; with a reflecting
/// boundary (`b_0 = 0`) the recursion collapses to the pure ratio form.
#[must_use]
pub fn chi_recursion(co: &Coefficients) -> Vec<f64> {
    let n = co.a.len() - 1;
    let mut chi = vec![1.0; n + 1];
    let mut d = 1.0; // d_j while iterating
    for j in 1..=n {
        let ratio = (co.a[j - 1].value / co.b[j].value).sqrt();
        d *= ratio;
        chi[j] = ratio * chi[j - 1] + co.b[0].value / (co.b[j].value * d);
    }
    chi
}

/// The χ sequence by its closed form:
/// `χ_j = [Σ_{k=0}^{j} (b_0⋯b_{k-1})(a_k⋯a_{j-1})] / sqrt((a_0⋯a_{j-1})(b_1⋯b_j))`.
/// Used to cross-validate [`chi_recursion`]; the two must agree to 1e-10.
#[must_use]
pub fn chi_closed_form(co: &Coefficients) -> Vec<f64> {
    let n = co.a.len() - 1;
    let mut chi = vec![1.0; n + 1];
    for (j, slot) in chi.iter_mut().enumerate().skip(1) {
        let mut numer = 0.0;
        for k in 0..=j {
            let mut term = 1.0;
            for i in 0..k {
                term *= co.b[i].value;
            }
            for i in k..j {
                term *= co.a[i].value;
            }
            numer += term;
        }
        let mut denom = 1.0;
        for i in 0..j {
            denom *= co.a[i].value;
        }
        for i in 1..=j {
            denom *= co.b[i].value;
        }
        *slot = numer / denom.sqrt();
    }
    chi
}

/// Leading principal minors Δ_0..Δ_{n+1} of the birth-death matrix by the
/// coefficient recursion `Δ_0 = 1`, `Δ_k = a_{k-1} Δ_{k-1} + b_0 b_1 ⋯ b_{k-1}`.
/// All minors are positive for a valid spec, which is why the spectrum is
/// positive. Cross-validated against direct tridiagonal determinants.
#[must_use]
pub fn delta_minors(co: &Coefficients) -> Vec<f64> {
    let n = co.a.len() - 1;
    let mut delta = vec![1.0; n + 2];
    let mut bprod = 1.0;
    for k in 1..=n + 1 {
        bprod *= co.b[k - 1].value;
        delta[k] = co.a[k - 1].value * delta[k - 1] + bprod;
    }
    delta
}

// ---------------------------------------------------------------------------
// Derivative forms
// ---------------------------------------------------------------------------

/// Which quadratic-form expansion produced a derivative value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    RawDot,
    Grouped,
    SumSquares,
    NewForm,
}

impl Form {
    /// All four forms in a fixed order.
    pub const ALL: [Form; 4] = [Form::RawDot, Form::Grouped, Form::SumSquares, Form::NewForm];

    /// Stable tag used in reports.
    #[must_use]
    pub fn tag(self) -> &'static str {
        match self {
            Form::RawDot => "rawdot",
            Form::Grouped => "grouped",
            Form::SumSquares => "sumsq",
            Form::NewForm => "newform",
        }
    }
}

impl std::fmt::Display for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// One derivative evaluation: the value `total = λ'_k`, the per-index
/// contributions to `qᵀ S' q` (so `Σ terms = total · qᵀq`), and the form
/// that grouped them.
#[derive(Debug, Clone)]
pub struct DerivativeBreakdown {
    pub total: f64,
    pub terms: Vec<f64>,
    pub form_used: Form,
}

/// Shared evaluation context: coefficients and the full spectrum at one `t`.
#[derive(Debug, Clone)]
pub struct SpectralPoint {
    pub co: Coefficients,
    pub spectrum: Spectrum,
}

impl SpectralPoint {
    /// Evaluate coefficients and the spectrum of the symmetrized matrix.
    pub fn compute(spec: &BirthDeathSpec, t: f64) -> Result<Self> {
        let co = spec.coefficients(t)?;
        let s = symmetrize(&co);
        let spectrum = spectrum(&s)?;
        Ok(SpectralPoint { co, spectrum })
    }
}

/// Per-index contributions of one form for eigenvalue index `k`.
fn form_terms(co: &Coefficients, sp: &Spectrum, k: usize, form: Form) -> Vec<f64> {
    let n = co.a.len() - 1;
    let q = &sp.qvecs[k];
    let lambda = sp.values[k];
    let sv = |j: usize| co.a[j].value + co.b[j].value;
    let sd = |j: usize| co.a[j].deriv + co.b[j].deriv;
    let mut terms = vec![0.0; n + 1];
    match form {
        Form::RawDot => {
            for j in 0..=n {
                terms[j] = sd(j) * q[j] * q[j];
                if j < n {
                    let p = co.a[j] * co.b[j + 1];
                    let off_prime = p.deriv / (2.0 * p.value.sqrt());
                    terms[j] += 2.0 * off_prime * q[j] * q[j + 1];
                }
            }
        }
        Form::Grouped => {
            let aux = aux_from(co);
            for j in 0..=n {
                let ell = if j < n {
                    aux.ell[j]
                } else if n > 0 {
                    aux.ell[n - 1]
                } else {
                    0.0
                };
                terms[j] = (sd(j) + ell * (lambda - sv(j))) * q[j] * q[j];
                if j >= 1 && j < n {
                    let pj = co.a[j].value * co.b[j + 1].value;
                    terms[j] += pj.sqrt() * aux.sqrt_e_prime[j] * q[j - 1] * q[j];
                }
            }
        }
        Form::SumSquares => {
            let aux = aux_from(co);
            for j in 0..=n {
                // pi_log_deriv[n] = 0, so the top index reduces to s'_n q_n².
                terms[j] = (sd(j) + aux.pi_log_deriv[j] * (lambda - sv(j))) * q[j] * q[j];
            }
        }
        Form::NewForm => {
            for j in 0..=n {
                let dj = co.a[j].value * co.b[j].deriv - co.a[j].deriv * co.b[j].value;
                let mut num = (co.a[j].deriv * lambda + dj) * q[j] * q[j];
                if j >= 1 {
                    num += (co.a[j - 1].value / co.b[j].value).sqrt() * dj * q[j - 1] * q[j];
                }
                terms[j] = num / co.a[j].value;
            }
        }
    }
    terms
}

/// Derivative of eigenvalue `k` at `t` using a single expansion.
pub fn lambda_prime(
    spec: &BirthDeathSpec,
    t: f64,
    k: usize,
    form: Form,
) -> Result<DerivativeBreakdown> {
    let point = SpectralPoint::compute(spec, t)?;
    lambda_prime_at(&point, k, form)
}

/// Derivative from an existing [`SpectralPoint`].
pub fn lambda_prime_at(point: &SpectralPoint, k: usize, form: Form) -> Result<DerivativeBreakdown> {
    let size = point.co.a.len();
    if k >= size {
        return Err(Error::Input(format!(
            "eigenvalue index {k} out of range for size {size}"
        )));
    }
    let terms = form_terms(&point.co, &point.spectrum, k, form);
    let q = &point.spectrum.qvecs[k];
    let qq: f64 = q.iter().map(|x| x * x).sum();
    let total = terms.iter().sum::<f64>() / qq;
    Ok(DerivativeBreakdown {
        total,
        terms,
        form_used: form,
    })
}

/// All four expansions for eigenvalue `k` at `t`, certified mutually
/// consistent to relative 1e-9. Any disagreement is an implementation bug
/// and is reported as [`Error::FormMismatch`].
pub fn lambda_prime_all(
    spec: &BirthDeathSpec,
    t: f64,
    k: usize,
) -> Result<[DerivativeBreakdown; 4]> {
    let point = SpectralPoint::compute(spec, t)?;
    lambda_prime_all_at(&point, t, k)
}

/// All four expansions from an existing [`SpectralPoint`]; `t` is only used
/// for error reporting.
pub fn lambda_prime_all_at(
    point: &SpectralPoint,
    t: f64,
    k: usize,
) -> Result<[DerivativeBreakdown; 4]> {
    let raw = lambda_prime_at(point, k, Form::RawDot)?;
    let grouped = lambda_prime_at(point, k, Form::Grouped)?;
    let sumsq = lambda_prime_at(point, k, Form::SumSquares)?;
    let newform = lambda_prime_at(point, k, Form::NewForm)?;
    let scale = 1.0 + raw.total.abs();
    for other in [&grouped, &sumsq, &newform] {
        if (other.total - raw.total).abs() > FORM_AGREEMENT_RTOL * scale {
            return Err(Error::FormMismatch {
                t,
                k,
                form_a: Form::RawDot.tag().into(),
                value_a: raw.total,
                form_b: other.form_used.tag().into(),
                value_b: other.total,
            });
        }
    }
    Ok([raw, grouped, sumsq, newform])
}

/// Certified derivative value: all four forms computed and checked, the
/// direct expansion returned.
pub fn lambda_prime_checked(spec: &BirthDeathSpec, t: f64, k: usize) -> Result<f64> {
    let [raw, _, _, _] = lambda_prime_all(spec, t, k)?;
    Ok(raw.total)
}
