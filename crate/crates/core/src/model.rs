//! Matrix specifications and assemblies.
//!
//! Two families of tridiagonal matrices are modeled, each of size n+1 with
//! time-dependent coefficient expressions:
//!
//! * **Birth-death**: diagonal `a_j + b_j`, superdiagonal `a_j`, subdiagonal
//!   `b_{j+1}`. Validity requires `a_j(t) > 0` for all j, `b_j(t) > 0` for
//!   j ≥ 1, and `b_0(t) ≥ 0`. The matrix is diagonally similar to the
//!   symmetric tridiagonal form with the same diagonal and off-diagonal
//!   entries `sqrt(a_j b_{j+1})`; the similarity scaling is
//!   `d_0 = 1`, `d_j = sqrt((a_0 ⋯ a_{j-1}) / (b_1 ⋯ b_j))`. All
//!   eigenvalues are therefore real and simple, and they are positive when
//!   the matrix is irreducible.
//!
//! * **Random walk**: zero diagonal, superdiagonal `c_j`, subdiagonal
//!   `1 - c_{j+1}`, with `0 < c_j(t) < 1` for j ≥ 1 and `0 < c_0(t) ≤ 1`.
//!   Its spectrum is symmetric about 0 and lies in (-1, 1). Shifting by the
//!   identity produces a birth-death matrix with `â_j = c_j`,
//!   `b̂_j = 1 - c_j`, so every eigenvalue of the walk matrix is the
//!   corresponding shifted eigenvalue of that companion.
//!
//! For walk matrices of even size, a two-step reduction maps the squared
//! spectrum onto a half-size birth-death matrix built from the products
//! `δ_j = c_j (1 - c_{j+1})`: the walk eigenvalues are exactly `±sqrt(ν)`
//! over the eigenvalues ν of the reduced matrix.

use crate::dual::Dual;
use crate::error::{CoeffKind, Error, Result};
use crate::expr::{CoeffExpr, Expr};

// ---------------------------------------------------------------------------
// Specifications
// ---------------------------------------------------------------------------

/// A time-dependent birth-death matrix of size n+1.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathSpec {
    /// Largest index; the matrix has rows 0..=n.
    pub n: usize,
    /// Up coefficients `a_0..a_n`.
    pub a: Vec<CoeffExpr>,
    /// Down coefficients `b_0..b_n`.
    pub b: Vec<CoeffExpr>,
    /// Open interval of admissible times (lo, hi).
    pub domain: (f64, f64),
    /// Set when `b_0` is the literal constant 0. Structural: depends on the
    /// expression text, never on numerical evaluation. Several criteria and
    /// identities specialize to this reflecting-boundary case.
    pub b0_identically_zero: bool,
}

/// Coefficient values and derivatives at a fixed time.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub a: Vec<Dual>,
    pub b: Vec<Dual>,
}

impl BirthDeathSpec {
    /// Validate lengths and domain and compute the structural boundary flag.
    pub fn new(n: usize, a: Vec<CoeffExpr>, b: Vec<CoeffExpr>, domain: (f64, f64)) -> Result<Self> {
        if a.len() != n + 1 {
            return Err(Error::Input(format!(
                "coefficient list a has {} entries, expected n+1 = {}",
                a.len(),
                n + 1
            )));
        }
        if b.len() != n + 1 {
            return Err(Error::Input(format!(
                "coefficient list b has {} entries, expected n+1 = {}",
                b.len(),
                n + 1
            )));
        }
        check_domain(domain)?;
        let b0_identically_zero = b[0].is_literal_zero();
        Ok(BirthDeathSpec {
            n,
            a,
            b,
            domain,
            b0_identically_zero,
        })
    }

    /// Matrix size n+1.
    #[must_use]
    pub fn size(&self) -> usize {
        self.n + 1
    }

    /// Evaluate all coefficients at `t` and enforce the sign requirements:
    /// `a_j > 0` for all j, `b_j > 0` for j ≥ 1, `b_0 ≥ 0`.
    pub fn coefficients(&self, t: f64) -> Result<Coefficients> {
        let mut a = Vec::with_capacity(self.size());
        let mut b = Vec::with_capacity(self.size());
        for (j, expr) in self.a.iter().enumerate() {
            let d = expr.eval_dual(t)?;
            if d.value <= 0.0 {
                return Err(Error::Positivity {
                    j,
                    which: CoeffKind::A,
                    value: d.value,
                    t,
                });
            }
            a.push(d);
        }
        for (j, expr) in self.b.iter().enumerate() {
            let d = expr.eval_dual(t)?;
            let bad = if j == 0 {
                d.value < 0.0
            } else {
                d.value <= 0.0
            };
            if bad {
                return Err(Error::Positivity {
                    j,
                    which: CoeffKind::B,
                    value: d.value,
                    t,
                });
            }
            b.push(d);
        }
        Ok(Coefficients { a, b })
    }
}

/// A time-dependent random-walk matrix of size n+1.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomWalkSpec {
    /// Largest index; the matrix has rows 0..=n.
    pub n: usize,
    /// Transition probabilities `c_0..c_n`.
    pub c: Vec<CoeffExpr>,
    /// Open interval of admissible times (lo, hi).
    pub domain: (f64, f64),
    /// Set when `c_0` is the literal constant 1 (reflecting boundary).
    pub c0_identically_one: bool,
}

impl RandomWalkSpec {
    /// Validate lengths and domain and compute the structural boundary flag.
    pub fn new(n: usize, c: Vec<CoeffExpr>, domain: (f64, f64)) -> Result<Self> {
        if c.len() != n + 1 {
            return Err(Error::Input(format!(
                "coefficient list c has {} entries, expected n+1 = {}",
                c.len(),
                n + 1
            )));
        }
        check_domain(domain)?;
        let c0_identically_one = c[0].is_literal_one();
        Ok(RandomWalkSpec {
            n,
            c,
            domain,
            c0_identically_one,
        })
    }

    /// Matrix size n+1.
    #[must_use]
    pub fn size(&self) -> usize {
        self.n + 1
    }

    /// Evaluate all probabilities at `t` and enforce `0 < c_0 ≤ 1` and
    /// `0 < c_j < 1` for j ≥ 1.
    pub fn probabilities(&self, t: f64) -> Result<Vec<Dual>> {
        let mut c = Vec::with_capacity(self.size());
        for (j, expr) in self.c.iter().enumerate() {
            let d = expr.eval_dual(t)?;
            let bad = if j == 0 {
                d.value <= 0.0 || d.value > 1.0
            } else {
                d.value <= 0.0 || d.value >= 1.0
            };
            if bad {
                return Err(Error::Range {
                    j,
                    value: d.value,
                    t,
                });
            }
            c.push(d);
        }
        Ok(c)
    }
}

fn check_domain(domain: (f64, f64)) -> Result<()> {
    if !domain.0.is_finite() || !domain.1.is_finite() || domain.0 >= domain.1 {
        return Err(Error::Input(format!(
            "domain ({}, {}) must be a finite interval with lo < hi",
            domain.0, domain.1
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Matrix containers
// ---------------------------------------------------------------------------

/// Symmetric tridiagonal matrix: `diag` of length m, `off` of length m-1.
#[derive(Debug, Clone, PartialEq)]
pub struct TriSym {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl TriSym {
    #[must_use]
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Maximum absolute row sum.
    #[must_use]
    pub fn norm_inf(&self) -> f64 {
        let m = self.size();
        let mut best: f64 = 0.0;
        for j in 0..m {
            let mut row = self.diag[j].abs();
            if j > 0 {
                row += self.off[j - 1].abs();
            }
            if j + 1 < m {
                row += self.off[j].abs();
            }
            best = best.max(row);
        }
        best
    }
}

/// General (unsymmetric) tridiagonal matrix: `diag` length m, `sup`/`sub`
/// length m-1; `sup[j]` sits at (j, j+1) and `sub[j]` at (j+1, j).
#[derive(Debug, Clone, PartialEq)]
pub struct TriGeneral {
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub sub: Vec<f64>,
}

impl TriGeneral {
    #[must_use]
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Maximum absolute row sum.
    #[must_use]
    pub fn norm_inf(&self) -> f64 {
        let m = self.size();
        let mut best: f64 = 0.0;
        for j in 0..m {
            let mut row = self.diag[j].abs();
            if j > 0 {
                row += self.sub[j - 1].abs();
            }
            if j + 1 < m {
                row += self.sup[j].abs();
            }
            best = best.max(row);
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Assemblies
// ---------------------------------------------------------------------------

/// Assemble the birth-death matrix at `t` in general tridiagonal form.
pub fn assemble_a(spec: &BirthDeathSpec, t: f64) -> Result<TriGeneral> {
    let co = spec.coefficients(t)?;
    let n = spec.n;
    let diag: Vec<f64> = (0..=n).map(|j| co.a[j].value + co.b[j].value).collect();
    let sup: Vec<f64> = (0..n).map(|j| co.a[j].value).collect();
    let sub: Vec<f64> = (0..n).map(|j| co.b[j + 1].value).collect();
    Ok(TriGeneral { diag, sup, sub })
}

/// Assemble the symmetrized birth-death matrix at `t`: same diagonal,
/// off-diagonal entries `sqrt(a_j b_{j+1})`.
pub fn assemble_s(spec: &BirthDeathSpec, t: f64) -> Result<TriSym> {
    let co = spec.coefficients(t)?;
    Ok(symmetrize(&co))
}

/// Symmetrized matrix from already-evaluated coefficients.
#[must_use]
pub fn symmetrize(co: &Coefficients) -> TriSym {
    let n = co.a.len() - 1;
    let diag: Vec<f64> = (0..=n).map(|j| co.a[j].value + co.b[j].value).collect();
    let off: Vec<f64> = (0..n)
        .map(|j| (co.a[j].value * co.b[j + 1].value).sqrt())
        .collect();
    TriSym { diag, off }
}

/// The diagonal similarity scaling `d` with `d_0 = 1` and
/// `d_j = sqrt((a_0 ⋯ a_{j-1}) / (b_1 ⋯ b_j))`, so that conjugating the
/// general form by diag(d) yields the symmetric form.
pub fn assemble_d(spec: &BirthDeathSpec, t: f64) -> Result<Vec<f64>> {
    let co = spec.coefficients(t)?;
    let mut d = Vec::with_capacity(spec.size());
    d.push(1.0);
    for j in 1..=spec.n {
        let prev = d[j - 1];
        d.push(prev * (co.a[j - 1].value / co.b[j].value).sqrt());
    }
    Ok(d)
}

/// Assemble the random-walk matrix at `t`: zero diagonal, superdiagonal
/// `c_j`, subdiagonal `1 - c_{j+1}`.
pub fn assemble_b(spec: &RandomWalkSpec, t: f64) -> Result<TriGeneral> {
    let c = spec.probabilities(t)?;
    let n = spec.n;
    let diag = vec![0.0; n + 1];
    let sup: Vec<f64> = (0..n).map(|j| c[j].value).collect();
    let sub: Vec<f64> = (0..n).map(|j| 1.0 - c[j + 1].value).collect();
    Ok(TriGeneral { diag, sup, sub })
}

/// Assemble the symmetrized walk matrix: zero diagonal, off-diagonal entries
/// `sqrt(δ_j)` with `δ_j = c_j (1 - c_{j+1})`.
pub fn assemble_s_walk(spec: &RandomWalkSpec, t: f64) -> Result<TriSym> {
    let c = spec.probabilities(t)?;
    let n = spec.n;
    let diag = vec![0.0; n + 1];
    let off: Vec<f64> = (0..n)
        .map(|j| (c[j].value * (1.0 - c[j + 1].value)).sqrt())
        .collect();
    Ok(TriSym { diag, off })
}

/// The identity-shift companion of a walk spec: a birth-death spec with
/// `â_j = c_j` and `b̂_j = 1 - c_j`. Every eigenvalue of the walk matrix is
/// the corresponding eigenvalue of this companion minus 1, and eigenvalue
/// derivatives coincide. When `c_0` is the literal 1 the companion's `b̂_0`
/// is emitted as the literal 0, so the structural boundary flag carries over.
#[must_use]
pub fn rw_to_bd_hat(spec: &RandomWalkSpec) -> BirthDeathSpec {
    let a: Vec<CoeffExpr> = spec.c.clone();
    let b: Vec<CoeffExpr> = spec
        .c
        .iter()
        .map(|c| {
            if c.is_literal_one() {
                CoeffExpr::from_root(Expr::Num(0.0))
            } else {
                CoeffExpr::from_root(Expr::Sub(
                    Box::new(Expr::Num(1.0)),
                    Box::new(c.root().clone()),
                ))
            }
        })
        .collect();
    BirthDeathSpec::new(spec.n, a, b, spec.domain).expect("companion spec inherits validated shape")
}

/// Even-size square-root reduction of a walk spec.
///
/// For size n+1 = 2(m+1) the squared walk eigenvalues are the eigenvalues of
/// the half-size birth-death matrix with `a_j = δ_{2j}` (j = 0..m),
/// `b_0 = 0`, `b_j = δ_{2j-1}` (j = 1..m), where `δ_j = c_j (1 - c_{j+1})`.
/// The walk spectrum is exactly `±sqrt(ν)` over the reduced spectrum.
/// Fails with `OddOrder` when the size is odd.
pub fn golub_kahan_reduce(spec: &RandomWalkSpec) -> Result<BirthDeathSpec> {
    let size = spec.size();
    if !size.is_multiple_of(2) {
        return Err(Error::OddOrder { size });
    }
    let m = (spec.n - 1) / 2;
    let delta = |j: usize| -> CoeffExpr {
        CoeffExpr::from_root(Expr::Mul(
            Box::new(spec.c[j].root().clone()),
            Box::new(Expr::Sub(
                Box::new(Expr::Num(1.0)),
                Box::new(spec.c[j + 1].root().clone()),
            )),
        ))
    };
    let a: Vec<CoeffExpr> = (0..=m).map(|j| delta(2 * j)).collect();
    let mut b: Vec<CoeffExpr> = Vec::with_capacity(m + 1);
    b.push(CoeffExpr::from_root(Expr::Num(0.0)));
    for j in 1..=m {
        b.push(delta(2 * j - 1));
    }
    BirthDeathSpec::new(m, a, b, spec.domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exprs(srcs: &[&str]) -> Vec<CoeffExpr> {
        srcs.iter().map(|s| CoeffExpr::parse(s).unwrap()).collect()
    }

    /// Size-3 fixture with reciprocal end coefficients; at t = 1/2 the
    /// symmetrized form has diagonal [4, 1, 4] and off-diagonal [1, 1].
    fn reciprocal_spec() -> BirthDeathSpec {
        BirthDeathSpec::new(
            2,
            exprs(&["1/t", "1-t", "1/t"]),
            exprs(&["1/(1-t)", "t", "1/(1-t)"]),
            (0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn assembly_matches_hand_values() {
        let spec = reciprocal_spec();
        let a = assemble_a(&spec, 0.5).unwrap();
        assert_eq!(a.diag, vec![4.0, 1.0, 4.0]);
        assert_eq!(a.sup, vec![2.0, 0.5]);
        assert_eq!(a.sub, vec![0.5, 2.0]);

        let s = assemble_s(&spec, 0.5).unwrap();
        assert_eq!(s.diag, vec![4.0, 1.0, 4.0]);
        assert_relative_eq!(s.off[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.off[1], 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.norm_inf(), 5.0, max_relative = 1e-15);
    }

    #[test]
    fn diagonal_similarity_carries_a_to_s() {
        let spec = reciprocal_spec();
        for &t in &[0.2, 0.5, 0.77] {
            let a = assemble_a(&spec, t).unwrap();
            let s = assemble_s(&spec, t).unwrap();
            let d = assemble_d(&spec, t).unwrap();
            assert_eq!(d[0], 1.0);
            for j in 0..spec.n {
                // (D A D^-1)_{j,j+1} = d_j * sup_j / d_{j+1} must equal off_j,
                // and the transposed entry must match symmetrically.
                let upper = d[j] * a.sup[j] / d[j + 1];
                let lower = d[j + 1] * a.sub[j] / d[j];
                assert_relative_eq!(upper, s.off[j], max_relative = 1e-12);
                assert_relative_eq!(lower, s.off[j], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn positivity_violation_names_index_and_time() {
        // a_1 = 1 - t turns non-positive at t = 1 and beyond.
        let spec =
            BirthDeathSpec::new(1, exprs(&["t", "1-t"]), exprs(&["t", "t"]), (0.0, 2.0)).unwrap();
        match spec.coefficients(1.5) {
            Err(Error::Positivity { j, which, value, t }) => {
                assert_eq!(j, 1);
                assert_eq!(which, CoeffKind::A);
                assert_relative_eq!(value, -0.5);
                assert_eq!(t, 1.5);
            }
            other => panic!("expected positivity violation, got {other:?}"),
        }
    }

    #[test]
    fn b0_flag_is_structural_not_numeric() {
        let literal =
            BirthDeathSpec::new(1, exprs(&["t", "t"]), exprs(&["0", "t"]), (0.0, 1.0)).unwrap();
        assert!(literal.b0_identically_zero);
        // t - t evaluates to zero everywhere but is not the literal 0, and in
        // fact fails the b_0 >= 0 check nowhere; the flag stays unset.
        let silent =
            BirthDeathSpec::new(1, exprs(&["t", "t"]), exprs(&["t-t", "t"]), (0.0, 1.0)).unwrap();
        assert!(!silent.b0_identically_zero);
    }

    /// Two-state walk fixture: c_0 = 1/(1+t), c_1 = 1/(1+2t).
    fn two_site_walk() -> RandomWalkSpec {
        RandomWalkSpec::new(1, exprs(&["1/(1+t)", "1/(1+2*t)"]), (0.0, 1.0)).unwrap()
    }

    #[test]
    fn walk_assembly_and_range_checks() {
        let rw = two_site_walk();
        let b = assemble_b(&rw, 0.5).unwrap();
        assert_eq!(b.diag, vec![0.0, 0.0]);
        assert_relative_eq!(b.sup[0], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(b.sub[0], 0.5, max_relative = 1e-15);

        let sw = assemble_s_walk(&rw, 0.5).unwrap();
        assert_relative_eq!(sw.off[0], (1.0 / 3.0f64).sqrt(), max_relative = 1e-15);

        let bad = RandomWalkSpec::new(1, exprs(&["1/(1+t)", "1+t"]), (0.0, 1.0)).unwrap();
        match bad.probabilities(0.5) {
            Err(Error::Range { j, value, t }) => {
                assert_eq!(j, 1);
                assert_relative_eq!(value, 1.5);
                assert_eq!(t, 0.5);
            }
            other => panic!("expected range violation, got {other:?}"),
        }
    }

    #[test]
    fn shift_companion_matches_walk_plus_identity() {
        let rw = two_site_walk();
        let hat = rw_to_bd_hat(&rw);
        assert!(!hat.b0_identically_zero);
        let t = 0.3;
        let b = assemble_b(&rw, t).unwrap();
        let a = assemble_a(&hat, t).unwrap();
        for j in 0..hat.size() {
            // â_j + b̂_j = 1, so the companion diagonal is the identity shift.
            assert_relative_eq!(a.diag[j], b.diag[j] + 1.0, max_relative = 1e-14);
        }
        assert_eq!(a.sup, b.sup);
        for j in 0..hat.n {
            assert_relative_eq!(a.sub[j], b.sub[j], max_relative = 1e-14);
        }
    }

    #[test]
    fn literal_one_probability_becomes_literal_zero_boundary() {
        let rw = RandomWalkSpec::new(1, exprs(&["1", "1/(1+t)"]), (0.0, 1.0)).unwrap();
        assert!(rw.c0_identically_one);
        let hat = rw_to_bd_hat(&rw);
        assert!(hat.b0_identically_zero);
        assert!(hat.b[0].is_literal_zero());
    }

    #[test]
    fn even_size_reduction_shapes_and_entries() {
        let rw = two_site_walk();
        let red = golub_kahan_reduce(&rw).unwrap();
        assert_eq!(red.n, 0);
        assert!(red.b0_identically_zero);
        // a_0 = δ_0 = c_0 (1 - c_1) = 2t / ((1+t)(1+2t)).
        let v = red.a[0].eval(0.5).unwrap();
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-14);

        let rw4 = RandomWalkSpec::new(
            3,
            exprs(&["1/(1+t)", "1/(1+2*t)", "1/(2+t)", "1/(3+t)"]),
            (0.0, 1.0),
        )
        .unwrap();
        let red4 = golub_kahan_reduce(&rw4).unwrap();
        assert_eq!(red4.n, 1);
        assert!(red4.b[0].is_literal_zero());
        let t = 0.4;
        let c = rw4.probabilities(t).unwrap();
        let d0 = c[0].value * (1.0 - c[1].value);
        let d1 = c[1].value * (1.0 - c[2].value);
        let d2 = c[2].value * (1.0 - c[3].value);
        assert_relative_eq!(red4.a[0].eval(t).unwrap(), d0, max_relative = 1e-14);
        assert_relative_eq!(red4.a[1].eval(t).unwrap(), d2, max_relative = 1e-14);
        assert_relative_eq!(red4.b[1].eval(t).unwrap(), d1, max_relative = 1e-14);
    }

    #[test]
    fn odd_size_reduction_rejected() {
        let rw = RandomWalkSpec::new(2, exprs(&["1/(1+t)", "1/(1+2*t)", "1/(2+t)"]), (0.0, 1.0))
            .unwrap();
        assert!(matches!(
            golub_kahan_reduce(&rw),
            Err(Error::OddOrder { size: 3 })
        ));
    }
}
