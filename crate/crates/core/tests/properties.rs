//! Randomized structural properties: identities that must hold for every
//! valid spec, exercised over generated coefficient families and the shared
//! corpus rather than hand-picked examples.

mod common;

use approx::assert_relative_eq;
use bd_spectra::calculus::{bounds, delta_minors, SpectralPoint};
use bd_spectra::eigen::{
    default_tol, eigenvalues_bisect, gershgorin_bracket, sign_changes, sturm_count,
};
use bd_spectra::expr::CoeffExpr;
use bd_spectra::model::{
    assemble_a, assemble_d, assemble_s, assemble_s_walk, symmetrize, BirthDeathSpec, RandomWalkSpec,
};
use bd_spectra::monotonicity::{classify, Criterion, ModelKind};
use bd_spectra::oracle::dense_eig_sym;
use bd_spectra::problem::ProblemSpec;
use common::*;
use proptest::prelude::*;

/// A coefficient source string that is strictly positive on (0, 1),
/// covering every operator and function the grammar can print.
fn positive_source() -> impl Strategy<Value = String> {
    let base = (0.3f64..2.0, 0.0f64..1.5, 0u8..8).prop_map(|(p, q, which)| match which {
        0 => format!("{p} + {q}*t"),
        // Slope bounded by 0.9p keeps the value above 0.1p on (0, 1).
        1 => format!("{p} - {}*t", 0.9 * p * q / 1.5),
        2 => format!("{p}/({} + t)", q + 0.2),
        3 => format!("{p}*exp({q}*t)"),
        4 => format!("{p}/exp({q}*t)"),
        5 => format!("{p} + {q}*t^2"),
        6 => format!("sqrt({p} + {q}*t)"),
        _ => format!("ln(2 + {q}*t)"),
    });
    (base, 0u8..3).prop_map(|(inner, wrap)| match wrap {
        0 => inner,
        1 => format!("sqrt({inner})"),
        _ => format!("1/({inner})"),
    })
}

/// One of the deterministic random birth-death specs plus an interior time.
fn bd_case() -> impl Strategy<Value = (BirthDeathSpec, f64)> {
    (0usize..20, 0.02f64..0.98).prop_map(|(i, t)| (random_bd_specs()[i].1.clone(), t))
}

/// One of the deterministic random walk specs plus an interior time.
fn rw_case() -> impl Strategy<Value = (RandomWalkSpec, f64)> {
    (0usize..6, 0.02f64..0.98).prop_map(|(i, t)| (random_rw_specs()[i].1.clone(), t))
}

proptest! {
    /// The canonical printer emits text that reparses to the identical tree
    /// and evaluates to the identical values and derivatives.
    #[test]
    fn printed_form_reparses_to_the_same_tree(src in positive_source()) {
        let parsed = CoeffExpr::parse(&src).unwrap();
        let printed = parsed.to_string();
        let reparsed = CoeffExpr::parse(&printed).unwrap();
        prop_assert_eq!(parsed.root(), reparsed.root(), "printed as {:?}", printed);
        for &t in &[0.1, 0.5, 0.9] {
            let x = parsed.eval_dual(t).unwrap();
            let y = reparsed.eval_dual(t).unwrap();
            assert_relative_eq!(x.value, y.value);
            assert_relative_eq!(x.deriv, y.deriv);
        }
    }

    /// The diagonal scaling D really conjugates the nonsymmetric matrix onto
    /// its symmetrized form: D A D⁻¹ = S entrywise.
    #[test]
    fn diagonal_scaling_symmetrizes_the_matrix((spec, t) in bd_case()) {
        let co = spec.coefficients(t).unwrap();
        let a = assemble_a(&spec, t).unwrap();
        let d = assemble_d(&spec, t).unwrap();
        let s = symmetrize(&co);
        for j in 0..spec.size() {
            assert_relative_eq!(a.diag[j], s.diag[j]);
        }
        for j in 0..spec.size() - 1 {
            let sup = d[j] * a.sup[j] / d[j + 1];
            let sub = d[j + 1] * a.sub[j] / d[j];
            assert_relative_eq!(sup, s.off[j], max_relative = 1e-12);
            assert_relative_eq!(sub, s.off[j], max_relative = 1e-12);
        }
    }

    /// Sturm bisection agrees with the dense rotation-based eigensolver.
    #[test]
    fn bisection_matches_the_dense_eigensolver((spec, t) in bd_case()) {
        let s = assemble_s(&spec, t).unwrap();
        let fast = eigenvalues_bisect(&s, default_tol(&s)).unwrap();
        let dense = dense_eig_sym(&s).unwrap();
        for (x, y) in fast.iter().zip(&dense) {
            assert_relative_eq!(x, y, max_relative = 1e-10, epsilon = 1e-10);
        }
    }

    /// Same agreement for the zero-diagonal walk matrices, whose spectra are
    /// symmetric around zero.
    #[test]
    fn walk_bisection_matches_the_dense_eigensolver((spec, t) in rw_case()) {
        let s = assemble_s_walk(&spec, t).unwrap();
        let fast = eigenvalues_bisect(&s, default_tol(&s)).unwrap();
        let dense = dense_eig_sym(&s).unwrap();
        for (x, y) in fast.iter().zip(&dense) {
            assert_relative_eq!(x, y, max_relative = 1e-10, epsilon = 1e-10);
        }
    }

    /// Every leading principal minor of a valid birth-death matrix is
    /// positive — the structural reason the whole spectrum is positive.
    #[test]
    fn leading_minors_are_positive((spec, t) in bd_case()) {
        let co = spec.coefficients(t).unwrap();
        for (k, minor) in delta_minors(&co).iter().enumerate() {
            prop_assert!(*minor > 0.0, "Δ_{k} = {minor}");
        }
    }

    /// Sturm counts at the padded bracket ends see no eigenvalue below the
    /// bracket and all of them above it.
    #[test]
    fn sturm_counts_cover_the_bracket((spec, t) in bd_case()) {
        let s = assemble_s(&spec, t).unwrap();
        let (lo, hi) = gershgorin_bracket(&s);
        prop_assert_eq!(sturm_count(&s, lo), 0);
        prop_assert_eq!(sturm_count(&s, hi), spec.size());
    }

    /// The k-th eigenvector (ascending eigenvalues) changes sign exactly
    /// n − k times.
    #[test]
    fn eigenvector_sign_changes_count_down_from_the_top((spec, t) in bd_case()) {
        let point = SpectralPoint::compute(&spec, t).unwrap();
        for (k, q) in point.spectrum.qvecs.iter().enumerate() {
            prop_assert_eq!(sign_changes(q).unwrap(), spec.n - k);
        }
    }

    /// The closed-form bounds really sandwich the extreme eigenvalues:
    /// m1 < λ_max ≤ m2 and 0 < λ_min < μ.
    #[test]
    fn bounds_sandwich_the_extreme_eigenvalues((spec, t) in bd_case()) {
        let point = SpectralPoint::compute(&spec, t).unwrap();
        let eigs = &point.spectrum.values;
        let bs = bounds(&spec, t).unwrap();
        let slack = 1e-12 * (1.0 + eigs[spec.n].abs());
        prop_assert!(bs.m1 < eigs[spec.n] + slack);
        prop_assert!(eigs[spec.n] <= bs.m2 + slack);
        prop_assert!(eigs[0] > 0.0);
        prop_assert!(eigs[0] < bs.mu + slack);
    }
}

/// Substitute the time variable by its reflection 1 − t, leaving function
/// names (whose spelling contains the letter t) untouched.
fn mirror_source(src: &str) -> String {
    let bytes = src.as_bytes();
    let mut out = String::new();
    for (i, &b) in bytes.iter().enumerate() {
        let standalone = b == b't'
            && !(i > 0 && bytes[i - 1].is_ascii_alphanumeric())
            && !(i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric());
        if standalone {
            out.push_str("(1-t)");
        } else {
            out.push(b as char);
        }
    }
    out
}

fn mirror_exprs(exprs: &[CoeffExpr]) -> Vec<CoeffExpr> {
    exprs
        .iter()
        .map(|e| CoeffExpr::parse(&mirror_source(e.source())).unwrap())
        .collect()
}

fn mirror_problem(problem: &ProblemSpec) -> ProblemSpec {
    match problem {
        ProblemSpec::BirthDeath(spec) => ProblemSpec::BirthDeath(
            BirthDeathSpec::new(
                spec.n,
                mirror_exprs(&spec.a),
                mirror_exprs(&spec.b),
                spec.domain,
            )
            .unwrap(),
        ),
        ProblemSpec::RandomWalk(spec) => ProblemSpec::RandomWalk(
            RandomWalkSpec::new(spec.n, mirror_exprs(&spec.c), spec.domain).unwrap(),
        ),
    }
}

fn flip_direction(c: Criterion) -> Criterion {
    let tag = c.tag();
    let flipped = if tag.contains('↑') {
        tag.replace('↑', "↓")
    } else {
        tag.replace('↓', "↑")
    };
    Criterion::parse(&flipped).unwrap()
}

/// Reversing time turns every increasing verdict into the matching
/// decreasing verdict at the reflected point, and vice versa. The criteria
/// depend on coefficient values (reflection-invariant) and derivatives
/// (sign-flipped), so membership must be exactly preserved under the swap.
#[test]
fn time_reversal_swaps_the_verdict_directions() {
    for (name, problem) in &corpus() {
        if problem.domain() != (0.0, 1.0) {
            continue;
        }
        let mirrored = mirror_problem(problem);
        let kind = match problem {
            ProblemSpec::BirthDeath(_) => ModelKind::BirthDeath,
            ProblemSpec::RandomWalk(_) => ModelKind::RandomWalk,
        };
        for &t in &sample_points(problem, 21) {
            let reflected = 1.0 - t;
            for criterion in Criterion::for_kind(kind) {
                let got = classify(&mirrored, criterion, t).unwrap().member;
                let want = classify(problem, flip_direction(criterion), reflected)
                    .unwrap()
                    .member;
                assert_eq!(
                    got,
                    want,
                    "{name}: {} at t = {t} vs {} at {reflected}",
                    criterion.tag(),
                    flip_direction(criterion).tag()
                );
            }
        }
    }
}
