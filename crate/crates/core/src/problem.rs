//! Problem files: TOML descriptions of a matrix spec and its time domain.
//!
//! Schema:
//!
//! ```toml
//! kind = "birth_death"        # or "random_walk"
//! n = 2                       # matrix size is n + 1
//! domain = [0.0, 1.0]         # open interval of admissible t
//! a = ["1/t", "1-t", "1/t"]   # birth_death: n+1 expressions each for a and b
//! b = ["1/(1-t)", "t", "1/(1-t)"]
//! # random_walk instead takes: c = ["...", ...]
//! ```
//!
//! Unknown keys are rejected, list lengths must equal n+1, and every
//! expression must parse; error messages name the offending key and byte
//! offset so problems can be fixed without guesswork.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::model::{BirthDeathSpec, RandomWalkSpec};

/// A loaded problem: either matrix family, plus its domain.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    BirthDeath(BirthDeathSpec),
    RandomWalk(RandomWalkSpec),
}

impl ProblemSpec {
    /// Largest index n; the matrix has size n+1.
    #[must_use]
    pub fn n(&self) -> usize {
        match self {
            ProblemSpec::BirthDeath(s) => s.n,
            ProblemSpec::RandomWalk(s) => s.n,
        }
    }

    /// The open time domain (lo, hi).
    #[must_use]
    pub fn domain(&self) -> (f64, f64) {
        match self {
            ProblemSpec::BirthDeath(s) => s.domain,
            ProblemSpec::RandomWalk(s) => s.domain,
        }
    }

    /// "birth_death" or "random_walk".
    #[must_use]
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::BirthDeath(_) => "birth_death",
            ProblemSpec::RandomWalk(_) => "random_walk",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: String,
    n: usize,
    domain: [f64; 2],
    a: Option<Vec<String>>,
    b: Option<Vec<String>>,
    c: Option<Vec<String>>,
}

/// Parse one coefficient list, attributing errors to `key[index]`.
fn parse_list(key: &str, srcs: &[String]) -> Result<Vec<CoeffExpr>> {
    let mut out = Vec::with_capacity(srcs.len());
    for (i, src) in srcs.iter().enumerate() {
        let expr = CoeffExpr::parse(src)
            .map_err(|e| Error::Input(format!("{key}[{i}] = \"{src}\": {e}")))?;
        out.push(expr);
    }
    Ok(out)
}

/// Parse problem text (TOML) into a validated spec.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let raw: RawProblem =
        toml::from_str(text).map_err(|e| Error::Input(format!("problem file: {e}")))?;
    let domain = (raw.domain[0], raw.domain[1]);
    match raw.kind.as_str() {
        "birth_death" => {
            if raw.c.is_some() {
                return Err(Error::Input(
                    "key `c` is not allowed for kind = \"birth_death\"".into(),
                ));
            }
            let a = raw
                .a
                .ok_or_else(|| Error::Input("missing key `a` for kind = \"birth_death\"".into()))?;
            let b = raw
                .b
                .ok_or_else(|| Error::Input("missing key `b` for kind = \"birth_death\"".into()))?;
            let spec =
                BirthDeathSpec::new(raw.n, parse_list("a", &a)?, parse_list("b", &b)?, domain)?;
            Ok(ProblemSpec::BirthDeath(spec))
        }
        "random_walk" => {
            if raw.a.is_some() || raw.b.is_some() {
                return Err(Error::Input(
                    "keys `a`/`b` are not allowed for kind = \"random_walk\"".into(),
                ));
            }
            let c = raw
                .c
                .ok_or_else(|| Error::Input("missing key `c` for kind = \"random_walk\"".into()))?;
            let spec = RandomWalkSpec::new(raw.n, parse_list("c", &c)?, domain)?;
            Ok(ProblemSpec::RandomWalk(spec))
        }
        other => Err(Error::Input(format!(
            "unknown kind `{other}`; expected \"birth_death\" or \"random_walk\""
        ))),
    }
}

/// Load and parse a problem file from disk.
pub fn load_problem(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_birth_death_problem() {
        let text = r#"
kind = "birth_death"
n = 2
domain = [0.0, 1.0]
a = ["1/t", "1-t", "1/t"]
b = ["1/(1-t)", "t", "1/(1-t)"]
"#;
        match parse_problem(text).unwrap() {
            ProblemSpec::BirthDeath(spec) => {
                assert_eq!(spec.n, 2);
                assert_eq!(spec.domain, (0.0, 1.0));
                assert!(!spec.b0_identically_zero);
            }
            other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn loads_random_walk_problem() {
        let text = r#"
kind = "random_walk"
n = 1
domain = [0.0, 1.0]
c = ["1/(1+t)", "1/(1+2*t)"]
"#;
        match parse_problem(text).unwrap() {
            ProblemSpec::RandomWalk(spec) => {
                assert_eq!(spec.n, 1);
                assert!(!spec.c0_identically_one);
            }
            other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"
kind = "birth_death"
n = 0
domain = [0.0, 1.0]
a = ["t"]
b = ["t"]
extra = 1
"#;
        let err = parse_problem(text).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn expression_errors_name_key_and_offset() {
        let text = r#"
kind = "birth_death"
n = 1
domain = [0.0, 1.0]
a = ["t", "1/+t"]
b = ["t", "t"]
"#;
        match parse_problem(text).unwrap_err() {
            Error::Input(msg) => {
                assert!(msg.contains("a[1]"), "message was: {msg}");
                assert!(msg.contains("offset 2"), "message was: {msg}");
            }
            other => panic!("expected input error, got {other:?}"),
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let text = r#"
kind = "random_walk"
n = 2
domain = [0.0, 1.0]
c = ["1/(1+t)", "1/(1+2*t)"]
"#;
        let err = parse_problem(text).unwrap_err();
        assert!(err.to_string().contains("expected n+1"), "{err}");
    }

    #[test]
    fn inverted_domain_rejected() {
        let text = r#"
kind = "random_walk"
n = 0
domain = [1.0, 0.0]
c = ["1/(1+t)"]
"#;
        assert!(parse_problem(text).is_err());
    }

    #[test]
    fn mismatched_coefficient_keys_rejected() {
        let text = r#"
kind = "birth_death"
n = 0
domain = [0.0, 1.0]
c = ["t"]
"#;
        let err = parse_problem(text).unwrap_err();
        assert!(
            err.to_string().contains("missing key `a`") || err.to_string().contains("not allowed")
        );
    }
}
