//! Shared fixtures for the integration suites: the bundled reference
//! problems, and a deterministic randomized corpus of valid specs drawn from
//! four coefficient families (affine, reciprocal-affine, exponential,
//! quadratic). Every generated coefficient is strictly positive on the open
//! unit interval, so positivity validation never trips during sweeps.
#![allow(dead_code)]

use bd_spectra::expr::CoeffExpr;
use bd_spectra::model::{BirthDeathSpec, RandomWalkSpec};
use bd_spectra::problem::ProblemSpec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn exprs(srcs: &[&str]) -> Vec<CoeffExpr> {
    srcs.iter().map(|s| CoeffExpr::parse(s).unwrap()).collect()
}

fn owned_exprs(srcs: &[String]) -> Vec<CoeffExpr> {
    srcs.iter().map(|s| CoeffExpr::parse(s).unwrap()).collect()
}

/// Reciprocal reference spec: middle eigenvalue is exactly 1/t + 1/(1−t).
pub fn reciprocal_problem() -> ProblemSpec {
    ProblemSpec::BirthDeath(
        BirthDeathSpec::new(
            2,
            exprs(&["1/t", "1-t", "1/t"]),
            exprs(&["1/(1-t)", "t", "1/(1-t)"]),
            (0.0, 1.0),
        )
        .unwrap(),
    )
}

/// Mixed quadratic reference spec with non-monotone extreme eigenvalues.
pub fn mixed_quadratic_problem() -> ProblemSpec {
    ProblemSpec::BirthDeath(
        BirthDeathSpec::new(
            2,
            exprs(&["(1-t)*t", "1/t", "t"]),
            exprs(&["t^2", "1/(1-t)", "t^2"]),
            (0.0, 1.0),
        )
        .unwrap(),
    )
}

/// Two-site walk whose largest eigenvalue peaks at t = 1/√2.
pub fn two_site_walk_problem() -> ProblemSpec {
    ProblemSpec::RandomWalk(
        RandomWalkSpec::new(1, exprs(&["1/(1+t)", "1/(1+2*t)"]), (0.0, 1.0)).unwrap(),
    )
}

/// Proportional coefficients: A(t) = t·A(1), so every eigenvalue is linear
/// in t and A'(t) commutes with A(t).
pub fn proportional_problem() -> ProblemSpec {
    ProblemSpec::BirthDeath(
        BirthDeathSpec::new(
            3,
            exprs(&["t", "2*t", "3*t", "4*t"]),
            exprs(&["t", "2*t", "3*t", "4*t"]),
            (0.1, 2.0),
        )
        .unwrap(),
    )
}

/// Sticky left boundary (c_0 ≡ 1) with shrinking interior probabilities.
pub fn monotone_walk_problem() -> ProblemSpec {
    ProblemSpec::RandomWalk(
        RandomWalkSpec::new(2, exprs(&["1", "0.6 - 0.1*t", "0.8 - 0.5*t"]), (0.0, 1.0)).unwrap(),
    )
}

/// One random coefficient, strictly positive on (0, 1).
fn coeff(rng: &mut ChaCha8Rng) -> String {
    let p: f64 = rng.random_range(0.3..2.0);
    match rng.random_range(0..4u8) {
        0 => {
            // Affine p + q·t with q ≥ −0.9p, so the value stays above 0.1p.
            let q: f64 = rng.random_range(-0.9 * p..2.0);
            if q < 0.0 {
                format!("{p:.4} - {:.4}*t", -q)
            } else {
                format!("{p:.4} + {q:.4}*t")
            }
        }
        1 => {
            // Reciprocal-affine p/(q + t), decreasing and positive.
            let q: f64 = rng.random_range(0.2..1.5);
            format!("{p:.4}/({q:.4} + t)")
        }
        2 => {
            // Exponential growth or decay; decay written as a quotient
            // because the grammar has no unary minus.
            let q: f64 = rng.random_range(0.0..1.5);
            if rng.random_range(0..2u8) == 0 {
                format!("{p:.4}*exp({q:.4}*t)")
            } else {
                format!("{p:.4}/exp({q:.4}*t)")
            }
        }
        _ => {
            // Quadratic p + q·t² with the same positivity margin as affine.
            let q: f64 = rng.random_range(-0.9 * p..2.0);
            if q < 0.0 {
                format!("{p:.4} - {:.4}*t^2", -q)
            } else {
                format!("{p:.4} + {q:.4}*t^2")
            }
        }
    }
}

/// A random walk probability g + d·t whose endpoint values stay inside
/// (0.08, 0.92).
fn walk_coeff(rng: &mut ChaCha8Rng) -> String {
    let g: f64 = rng.random_range(0.08..0.92);
    let h: f64 = rng.random_range(0.08..0.92);
    let d = h - g;
    if d < 0.0 {
        format!("{g:.4} - {:.4}*t", -d)
    } else {
        format!("{g:.4} + {d:.4}*t")
    }
}

/// Twenty random birth-death specs with n cycling through 1..=6; every
/// fourth spec has a reflecting boundary (b_0 ≡ 0).
pub fn random_bd_specs() -> Vec<(String, BirthDeathSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CAFE);
    (0..20)
        .map(|i| {
            let n = 1 + i % 6;
            let a: Vec<String> = (0..=n).map(|_| coeff(&mut rng)).collect();
            let mut b: Vec<String> = (0..=n).map(|_| coeff(&mut rng)).collect();
            if i % 4 == 0 {
                b[0] = "0".to_string();
            }
            let spec =
                BirthDeathSpec::new(n, owned_exprs(&a), owned_exprs(&b), (0.0, 1.0)).unwrap();
            (format!("bd-rand-{i:02}"), spec)
        })
        .collect()
}

/// Six random walk specs covering sizes 2 through 7 (even and odd).
pub fn random_rw_specs() -> Vec<(String, RandomWalkSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA15E_5EED);
    (1..=6)
        .map(|n| {
            let c: Vec<String> = (0..=n).map(|_| walk_coeff(&mut rng)).collect();
            let spec = RandomWalkSpec::new(n, owned_exprs(&c), (0.0, 1.0)).unwrap();
            (format!("rw-rand-size-{}", n + 1), spec)
        })
        .collect()
}

/// The full labeled corpus: five bundled reference problems plus the
/// randomized specs.
pub fn corpus() -> Vec<(String, ProblemSpec)> {
    let mut out = vec![
        ("reciprocal".to_string(), reciprocal_problem()),
        ("mixed-quadratic".to_string(), mixed_quadratic_problem()),
        ("two-site-walk".to_string(), two_site_walk_problem()),
        ("proportional".to_string(), proportional_problem()),
        ("monotone-walk".to_string(), monotone_walk_problem()),
    ];
    for (name, spec) in random_bd_specs() {
        out.push((name, ProblemSpec::BirthDeath(spec)));
    }
    for (name, spec) in random_rw_specs() {
        out.push((name, ProblemSpec::RandomWalk(spec)));
    }
    out
}

/// Interior sample points of a problem's domain (midpoint grid, so samples
/// never touch the endpoints where reference specs blow up).
pub fn sample_points(problem: &ProblemSpec, count: usize) -> Vec<f64> {
    let (lo, hi) = problem.domain();
    let step = (hi - lo) / count as f64;
    (0..count).map(|i| lo + (i as f64 + 0.5) * step).collect()
}
