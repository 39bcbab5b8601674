//! Coefficient expressions in the single variable `t`.
//!
//! Matrix coefficients are given as closed-form expressions built from
//! numbers, `t`, the binary operators `+ - * / ^`, unary minus, and the
//! functions `sqrt`, `exp`, `ln`. This module provides:
//!
//! * a recursive-descent parser with byte-offset error reporting,
//! * a canonical serialization (`Display`) that re-parses to the same tree,
//! * exact value/derivative evaluation via dual numbers, with structured
//!   domain errors naming the offending subexpression and the time `t`.
//!
//! Operator precedence, loosest to tightest: `+ -` (binary), `* /`, unary
//! minus, `^`. So `-t^2` means `-(t^2)`, and `^` is right-associative
//! (`t^2^3` means `t^(2^3)`). Power is evaluated as `exp(y*ln(x))` and hence
//! requires a positive base.

use std::fmt;
use std::str::FromStr;

use crate::dual::Dual;
use crate::error::{DomainOp, Error, Result};

/// Abstract syntax tree of a coefficient expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Numeric literal (always non-negative and finite; signs come from `Neg`).
    Num(f64),
    /// The independent variable `t`.
    Var,
    /// Unary negation.
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `base ^ exponent`, right-associative.
    Pow(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

/// Tokenize `src` into (token, byte offset of token start) pairs.
fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    if i + 1 >= bytes.len() || !bytes[i + 1].is_ascii_digit() {
                        return Err(Error::Syntax {
                            offset: i,
                            detail: "expected digit after decimal point".into(),
                        });
                    }
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                    // An `e` not followed by digits is left for the identifier
                    // lexer, which will reject it with a clearer message.
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    detail: format!("invalid numeric literal `{text}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Syntax {
                        offset: start,
                        detail: format!("numeric literal `{text}` overflows"),
                    });
                }
                toks.push((Tok::Num(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Syntax {
                    offset: i,
                    detail: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    eof: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    /// term := factor (('*' | '/') factor)*
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            match tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    /// factor := '-' factor | power  (unary minus binds looser than `^`)
    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some((Tok::Minus, _))) {
            self.bump();
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    /// power := atom ('^' factor)?  (right-associative via the factor recursion)
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some((Tok::Caret, _))) {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    /// atom := number | 't' | func '(' expr ')' | '(' expr ')'
    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some((Tok::Num(v), _)) => Ok(Expr::Num(v)),
            Some((Tok::Ident(name), off)) => match name.as_str() {
                "t" => Ok(Expr::Var),
                "sqrt" | "exp" | "ln" => {
                    match self.bump() {
                        Some((Tok::LParen, _)) => {}
                        other => {
                            let offset = other.map_or(self.eof, |(_, o)| o);
                            return Err(Error::Syntax {
                                offset,
                                detail: format!("expected `(` after `{name}`"),
                            });
                        }
                    }
                    let arg = self.expr()?;
                    match self.bump() {
                        Some((Tok::RParen, _)) => {}
                        other => {
                            let offset = other.map_or(self.eof, |(_, o)| o);
                            return Err(Error::Syntax {
                                offset,
                                detail: "expected `)`".into(),
                            });
                        }
                    }
                    let arg = Box::new(arg);
                    Ok(match name.as_str() {
                        "sqrt" => Expr::Sqrt(arg),
                        "exp" => Expr::Exp(arg),
                        _ => Expr::Ln(arg),
                    })
                }
                _ => Err(Error::UnknownIdentifier { name, offset: off }),
            },
            Some((Tok::LParen, open)) => {
                if self.peek().is_none() {
                    // A lone `(` with nothing after it: point at the paren.
                    return Err(Error::Syntax {
                        offset: open,
                        detail: "unclosed parenthesis".into(),
                    });
                }
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    other => {
                        let offset = other.map_or(self.eof, |(_, o)| o);
                        Err(Error::Syntax {
                            offset,
                            detail: "expected `)`".into(),
                        })
                    }
                }
            }
            Some((_, off)) => Err(Error::Syntax {
                offset: off,
                detail: "expected a number, `t`, function call, or `(`".into(),
            }),
            None => Err(Error::Syntax {
                offset: self.eof,
                detail: "unexpected end of expression".into(),
            }),
        }
    }
}

/// Parse a complete expression; trailing tokens are an error.
fn parse_tree(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        eof: src.len(),
    };
    let tree = p.expr()?;
    if let Some((_, off)) = p.peek() {
        return Err(Error::Syntax {
            offset: *off,
            detail: "unexpected trailing input".into(),
        });
    }
    Ok(tree)
}

// ---------------------------------------------------------------------------
// Canonical display
// ---------------------------------------------------------------------------

/// Precedence levels used for minimal parenthesization. Higher binds tighter.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(_) | Expr::Var | Expr::Sqrt(_) | Expr::Exp(_) | Expr::Ln(_) => 5,
    }
}

/// Write `e`, parenthesizing when its level is below what the context needs.
fn fmt_prec(e: &Expr, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
    let me = level(e);
    if me < min_level {
        write!(f, "(")?;
        fmt_node(e, f)?;
        write!(f, ")")
    } else {
        fmt_node(e, f)
    }
}

fn fmt_node(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var => write!(f, "t"),
        Expr::Neg(x) => {
            write!(f, "-")?;
            fmt_prec(x, f, 3)
        }
        Expr::Add(l, r) => {
            fmt_prec(l, f, 1)?;
            write!(f, "+")?;
            fmt_prec(r, f, 2)
        }
        Expr::Sub(l, r) => {
            fmt_prec(l, f, 1)?;
            write!(f, "-")?;
            fmt_prec(r, f, 2)
        }
        Expr::Mul(l, r) => {
            fmt_prec(l, f, 2)?;
            write!(f, "*")?;
            fmt_prec(r, f, 3)
        }
        Expr::Div(l, r) => {
            fmt_prec(l, f, 2)?;
            write!(f, "/")?;
            fmt_prec(r, f, 3)
        }
        Expr::Pow(b, x) => {
            fmt_prec(b, f, 5)?;
            write!(f, "^")?;
            fmt_prec(x, f, 3)
        }
        Expr::Sqrt(x) => {
            write!(f, "sqrt(")?;
            fmt_prec(x, f, 1)?;
            write!(f, ")")
        }
        Expr::Exp(x) => {
            write!(f, "exp(")?;
            fmt_prec(x, f, 1)?;
            write!(f, ")")
        }
        Expr::Ln(x) => {
            write!(f, "ln(")?;
            fmt_prec(x, f, 1)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, f, 0)
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

fn eval_node(e: &Expr, t: f64) -> Result<Dual> {
    match e {
        Expr::Num(v) => Ok(Dual::constant(*v)),
        Expr::Var => Ok(Dual::variable(t)),
        Expr::Neg(x) => Ok(-eval_node(x, t)?),
        Expr::Add(l, r) => Ok(eval_node(l, t)? + eval_node(r, t)?),
        Expr::Sub(l, r) => Ok(eval_node(l, t)? - eval_node(r, t)?),
        Expr::Mul(l, r) => Ok(eval_node(l, t)? * eval_node(r, t)?),
        Expr::Div(l, r) => {
            let lv = eval_node(l, t)?;
            let rv = eval_node(r, t)?;
            if rv.value == 0.0 {
                return Err(Error::Domain {
                    op: DomainOp::Division,
                    subexpr: e.to_string(),
                    t,
                });
            }
            Ok(lv / rv)
        }
        Expr::Pow(b, x) => {
            let bv = eval_node(b, t)?;
            let xv = eval_node(x, t)?;
            if bv.value <= 0.0 {
                return Err(Error::Domain {
                    op: DomainOp::Pow,
                    subexpr: e.to_string(),
                    t,
                });
            }
            Ok(bv.pow(xv))
        }
        Expr::Sqrt(x) => {
            let xv = eval_node(x, t)?;
            if xv.value <= 0.0 {
                return Err(Error::Domain {
                    op: DomainOp::Sqrt,
                    subexpr: e.to_string(),
                    t,
                });
            }
            Ok(xv.sqrt())
        }
        Expr::Exp(x) => Ok(eval_node(x, t)?.exp()),
        Expr::Ln(x) => {
            let xv = eval_node(x, t)?;
            if xv.value <= 0.0 {
                return Err(Error::Domain {
                    op: DomainOp::Ln,
                    subexpr: e.to_string(),
                    t,
                });
            }
            Ok(xv.ln())
        }
    }
}

// ---------------------------------------------------------------------------
// Public wrapper type
// ---------------------------------------------------------------------------

/// A parsed coefficient expression together with its original source text.
///
/// Equality compares the syntax trees, so two texts that parse to the same
/// tree are equal regardless of spacing. `Display` prints the canonical form,
/// which re-parses to the identical tree.
#[derive(Debug, Clone)]
pub struct CoeffExpr {
    root: Expr,
    source: String,
}

impl CoeffExpr {
    /// Parse source text into an expression.
    pub fn parse(src: &str) -> Result<Self> {
        let root = parse_tree(src)?;
        Ok(CoeffExpr {
            root,
            source: src.to_string(),
        })
    }

    /// Build an expression from an already-constructed tree; the stored source
    /// is the canonical rendering.
    #[must_use]
    pub fn from_root(root: Expr) -> Self {
        let source = root.to_string();
        CoeffExpr { root, source }
    }

    /// The syntax tree.
    #[must_use]
    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// The original source text as given.
    #[must_use]
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluate value and derivative at `t`, with domain checks.
    pub fn eval_dual(&self, t: f64) -> Result<Dual> {
        let d = eval_node(&self.root, t)?;
        if !d.value.is_finite() || !d.deriv.is_finite() {
            return Err(Error::Domain {
                op: DomainOp::Pow,
                subexpr: format!("{} (non-finite result)", self.root),
                t,
            });
        }
        Ok(d)
    }

    /// Evaluate just the value at `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_dual(t)?.value)
    }

    /// True when the expression is the literal number 0 (used for structural
    /// boundary flags, which must not depend on numerical evaluation).
    #[must_use]
    pub fn is_literal_zero(&self) -> bool {
        matches!(self.root, Expr::Num(v) if v == 0.0)
    }

    /// True when the expression is the literal number 1.
    #[must_use]
    pub fn is_literal_one(&self) -> bool {
        matches!(self.root, Expr::Num(v) if v == 1.0)
    }
}

impl PartialEq for CoeffExpr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl FromStr for CoeffExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CoeffExpr::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eval(src: &str, t: f64) -> Dual {
        CoeffExpr::parse(src).unwrap().eval_dual(t).unwrap()
    }

    #[test]
    fn arithmetic_and_derivative() {
        let d = eval("1/t + 1/(1-t)", 0.5);
        assert_relative_eq!(d.value, 4.0, max_relative = 1e-15);
        // d/dt [1/t + 1/(1-t)] = -1/t^2 + 1/(1-t)^2 = 0 at t = 1/2.
        assert_relative_eq!(d.deriv, 0.0, epsilon = 1e-14);

        let d = eval("1/t + 1/(1-t)", 0.25);
        assert_relative_eq!(d.deriv, -16.0 + 16.0 / 9.0, max_relative = 1e-13);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        // -t^2 is -(t^2), not (-t)^2.
        let d = eval("-t^2", 3.0);
        assert_relative_eq!(d.value, -9.0, max_relative = 1e-14);
        assert_relative_eq!(d.deriv, -6.0, max_relative = 1e-14);
    }

    #[test]
    fn power_is_right_associative() {
        let d = eval("t^2^3", 2.0);
        assert_relative_eq!(d.value, 256.0, max_relative = 1e-12);
    }

    #[test]
    fn negative_exponent_is_legal() {
        let d = eval("2^-1", 0.3);
        assert_relative_eq!(d.value, 0.5, max_relative = 1e-14);
        assert_eq!(d.deriv, 0.0);
    }

    #[test]
    fn functions_compose() {
        let d = eval("sqrt(exp(2*ln(t)))", 0.8);
        assert_relative_eq!(d.value, 0.8, max_relative = 1e-13);
        assert_relative_eq!(d.deriv, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn lone_open_paren_reports_offset_zero() {
        match CoeffExpr::parse("(") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_sum_reports_inner_offset() {
        match CoeffExpr::parse("(1+") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn misplaced_operator_offset() {
        match CoeffExpr::parse("1/+t") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_named_with_offset() {
        match CoeffExpr::parse("2*foo(t)") {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 2);
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
    }

    #[test]
    fn overflowing_literal_rejected() {
        assert!(matches!(
            CoeffExpr::parse("1e999"),
            Err(Error::Syntax { offset: 0, .. })
        ));
    }

    #[test]
    fn trailing_input_rejected() {
        match CoeffExpr::parse("t t") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn domain_errors_name_subexpression_and_t() {
        match CoeffExpr::parse("1/(1-t)").unwrap().eval_dual(1.0) {
            Err(Error::Domain { op, subexpr, t }) => {
                assert_eq!(op, DomainOp::Division);
                assert!(subexpr.contains("1-t"), "got {subexpr}");
                assert_eq!(t, 1.0);
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(matches!(
            CoeffExpr::parse("sqrt(t-2)").unwrap().eval_dual(1.0),
            Err(Error::Domain {
                op: DomainOp::Sqrt,
                ..
            })
        ));
        assert!(matches!(
            CoeffExpr::parse("ln(t)").unwrap().eval_dual(-1.0),
            Err(Error::Domain {
                op: DomainOp::Ln,
                ..
            })
        ));
        assert!(matches!(
            CoeffExpr::parse("(t-5)^2").unwrap().eval_dual(1.0),
            Err(Error::Domain {
                op: DomainOp::Pow,
                ..
            })
        ));
    }

    #[test]
    fn literal_flags_are_structural() {
        assert!(CoeffExpr::parse("0").unwrap().is_literal_zero());
        assert!(CoeffExpr::parse("0.0").unwrap().is_literal_zero());
        assert!(!CoeffExpr::parse("t-t").unwrap().is_literal_zero());
        assert!(CoeffExpr::parse("1").unwrap().is_literal_one());
        assert!(!CoeffExpr::parse("1.5").unwrap().is_literal_one());
    }

    #[test]
    fn canonical_display_round_trips() {
        for src in [
            "1/t+1/(1-t)",
            "-t^2",
            "(t+1)*(t-1)",
            "t^2^3",
            "(t^2)^3",
            "2^-1",
            "-(2*t)",
            "t--t",
            "t*-t",
            "(-t)^2",
            "sqrt(t*(1-t))",
            "exp(-(t^2))",
            "ln(1+t)/ln(2+t)",
            "1-(2-t)",
            "1-2-t",
            "8/(2*t)",
            "8/2*t",
        ] {
            let first = CoeffExpr::parse(src).unwrap();
            let canon = first.to_string();
            let second = CoeffExpr::parse(&canon).unwrap();
            assert_eq!(first, second, "round trip failed: {src} -> {canon}");
            // Canonical form is a fixed point of the printer.
            assert_eq!(canon, second.to_string());
        }
    }

    #[test]
    fn display_distinguishes_grouping() {
        let grouped = CoeffExpr::parse("1-(2-t)").unwrap();
        let flat = CoeffExpr::parse("1-2-t").unwrap();
        assert_ne!(grouped, flat);
        assert_ne!(grouped.to_string(), flat.to_string());
    }
}
