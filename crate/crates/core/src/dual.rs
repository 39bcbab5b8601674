//! Forward-mode first-order dual numbers.
//!
//! A [`Dual`] carries a value together with its derivative with respect to the
//! single scalar parameter `t`. Arithmetic propagates derivatives exactly
//! (product, quotient, and chain rules), so every coefficient evaluation in
//! this crate yields the pair (f(t), f′(t)) in one pass with no truncation
//! error beyond ordinary rounding.
//!
//! The operations here are total: domain checking (zero divisors, non-positive
//! arguments to `sqrt`/`ln`/`pow`) is the caller's responsibility — the
//! expression evaluator performs those checks before applying an operation and
//! reports a structured error naming the offending subexpression.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value/derivative pair for forward-mode differentiation in one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    /// f(t).
    pub value: f64,
    /// df/dt at the same t.
    pub deriv: f64,
}

impl Dual {
    /// A constant: value `c`, derivative 0.
    #[must_use]
    pub const fn constant(c: f64) -> Self {
        Dual {
            value: c,
            deriv: 0.0,
        }
    }

    /// The independent variable itself: value `t`, derivative 1.
    #[must_use]
    pub const fn variable(t: f64) -> Self {
        Dual {
            value: t,
            deriv: 1.0,
        }
    }

    /// Square root; requires `self.value > 0` for a finite derivative.
    #[must_use]
    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        Dual {
            value: r,
            deriv: self.deriv / (2.0 * r),
        }
    }

    /// Exponential.
    #[must_use]
    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Dual {
            value: e,
            deriv: self.deriv * e,
        }
    }

    /// Natural logarithm; requires `self.value > 0`.
    #[must_use]
    pub fn ln(self) -> Self {
        Dual {
            value: self.value.ln(),
            deriv: self.deriv / self.value,
        }
    }

    /// General power x^y computed as exp(y·ln x); requires `self.value > 0`.
    #[must_use]
    pub fn pow(self, exponent: Dual) -> Self {
        (exponent * self.ln()).exp()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            deriv: self.deriv + rhs.deriv,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value - rhs.value,
            deriv: self.deriv - rhs.deriv,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            deriv: self.deriv * rhs.value + self.value * rhs.deriv,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value / rhs.value,
            deriv: (self.deriv * rhs.value - self.value * rhs.deriv) / (rhs.value * rhs.value),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            deriv: -self.deriv,
        }
    }
}
