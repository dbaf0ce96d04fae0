//! Univariate real expressions: AST, point evaluation, formatting, parsing,
//! symbolic differentiation and interval enclosures.
//!
//! Trees are evaluated exactly as written. The parser never folds constants,
//! with two exceptions that are part of the grammar rather than
//! simplification: a `-` immediately followed by a numeric literal lexes as a
//! negative literal, and a `^` exponent must be a constant expression and is
//! stored as its value.

mod diff;
mod interval;
mod parse;

use std::fmt;

use thiserror::Error;

pub use interval::{Interval, IntervalError, IntervalValue};
pub use parse::{parse, parse_constant, ParseError};

/// Exponent of a [`Expr::Pow`] node.
///
/// Integer exponents are defined for negative bases; real exponents require a
/// nonnegative base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i32),
    Real(f64),
}

impl Exponent {
    /// Chooses the integer representation whenever the value is integral.
    pub fn from_value(value: f64) -> Exponent {
        if value.fract() == 0.0 && value.abs() <= i32::MAX as f64 {
            Exponent::Int(value as i32)
        } else {
            Exponent::Real(value)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Int(n) => n as f64,
            Exponent::Real(r) => r,
        }
    }
}

/// Unary elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree over the single real variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Max(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{node}` at x = {x}")]
    Domain { node: String, x: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("`{node}` is not differentiable")]
    NonDifferentiable { node: String },
}

// Builders named after the node they create, not the operator traits.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn powi(base: Expr, n: i32) -> Expr {
        Expr::Pow(Box::new(base), Exponent::Int(n))
    }

    pub fn powf(base: Expr, r: f64) -> Expr {
        Expr::Pow(Box::new(base), Exponent::Real(r))
    }

    pub fn max(a: Expr, b: Expr) -> Expr {
        Expr::Max(Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// `self * self` as a product node, the form the squaring lemma talks about.
    pub fn squared(&self) -> Expr {
        Expr::mul(self.clone(), self.clone())
    }

    /// True when the tree contains no `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Max(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// True when every node has a classical derivative (no `max`, no `abs`).
    pub fn is_differentiable(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => true,
            Expr::Max(..) | Expr::Call(Func::Abs, _) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_differentiable(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_differentiable() && b.is_differentiable()
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.node_count(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Max(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// Evaluates the tree at `x` in plain `f64` arithmetic.
    ///
    /// Any non-finite intermediate (division by zero, `log` of a nonpositive
    /// number, overflow) is reported as a domain error naming the node.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let den = b.eval(x)?;
                if den == 0.0 {
                    return Err(self.domain_error(x));
                }
                a.eval(x)? / den
            }
            Expr::Pow(base, exp) => {
                let b = base.eval(x)?;
                match *exp {
                    Exponent::Int(n) => {
                        if n < 0 && b == 0.0 {
                            return Err(self.domain_error(x));
                        }
                        b.powi(n)
                    }
                    Exponent::Real(r) => {
                        if b < 0.0 || (r < 0.0 && b == 0.0) {
                            return Err(self.domain_error(x));
                        }
                        b.powf(r)
                    }
                }
            }
            Expr::Max(a, b) => a.eval(x)?.max(b.eval(x)?),
            Expr::Call(f, a) => {
                let v = a.eval(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(self.domain_error(x));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(self.domain_error(x));
                        }
                        v.sqrt()
                    }
                    Func::Abs => v.abs(),
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(self.domain_error(x))
        }
    }

    fn domain_error(&self, x: f64) -> EvalError {
        EvalError::Domain { node: self.to_string(), x }
    }

    /// Exact symbolic derivative with respect to `x`.
    pub fn differentiate(&self) -> Result<Expr, DiffError> {
        diff::derivative(self)
    }

    /// Sound enclosure of the range of the expression over `iv`.
    pub fn eval_interval(&self, iv: Interval) -> Result<IntervalValue, IntervalError> {
        interval::enclose(self, IntervalValue::from(iv))
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c < 0.0 || (c == 0.0 && c.is_sign_negative()) {
        write!(f, "({c})")
    } else {
        write!(f, "{c}")
    }
}

/// Fully parenthesized text that parses back to a structurally equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_number(f, *c),
            Expr::Var => write!(f, "x"),
            // `-` before a literal would lex as a negative literal
            Expr::Neg(a) if matches!(**a, Expr::Const(_)) => write!(f, "(-({a}))"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, exp) => {
                write!(f, "({a}^")?;
                match *exp {
                    Exponent::Int(n) => write_number(f, n as f64)?,
                    Exponent::Real(r) => write_number(f, r)?,
                }
                write!(f, ")")
            }
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn eval_example_product() {
        assert_eq!(e("x^2*(1-x)^2").eval(0.5).unwrap(), 0.0625);
    }

    #[test]
    fn eval_sin_plus_eight_at_pi() {
        let v = e("sin(x)+8").eval(std::f64::consts::PI).unwrap();
        assert!((v - 8.0).abs() < 1e-15);
    }

    #[test]
    fn eval_division_by_zero() {
        let err = e("1/x").eval(0.0).unwrap_err();
        let EvalError::Domain { node, x } = err;
        assert_eq!(node, "(1 / x)");
        assert_eq!(x, 0.0);
    }

    #[test]
    fn eval_domain_errors() {
        assert!(e("log(x)").eval(0.0).is_err());
        assert!(e("sqrt(x)").eval(-1.0).is_err());
        assert!(e("x^0.5").eval(-1.0).is_err());
        assert!(e("x^(-1)").eval(0.0).is_err());
        assert!(e("exp(x)").eval(1000.0).is_err());
    }

    #[test]
    fn integer_power_of_negative_base() {
        assert_eq!(e("(1-x)^2").eval(3.0).unwrap(), 4.0);
        assert_eq!(e("x^3").eval(-2.0).unwrap(), -8.0);
    }

    #[test]
    fn format_basic() {
        assert_eq!(Expr::Var.to_string(), "x");
        assert_eq!(Expr::Const(0.5).to_string(), "0.5");
        assert_eq!(Expr::Const(-2.0).to_string(), "(-2)");
        assert_eq!(Expr::neg(Expr::Const(2.0)).to_string(), "(-(2))");
        assert_eq!(parse("(-(2))").unwrap(), Expr::neg(Expr::Const(2.0)));
    }

    #[test]
    fn format_round_trips_example() {
        let tree = e("x^2*(1-x)^2");
        assert_eq!(parse(&tree.to_string()).unwrap(), tree);
    }

    #[test]
    fn differentiability() {
        assert!(e("sin(x)*exp(x)").is_differentiable());
        assert!(!e("max(x, 1-x)").is_differentiable());
        assert!(!e("abs(x)+1").is_differentiable());
    }
}
