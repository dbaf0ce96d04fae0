//! Syntax-directed convexity and sign rules.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::expr::{Exponent, Expr, Func, Interval};

use super::enclosure_nonnegative;

/// Name of the structural rule that closed a proof at the root of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    // convexity
    Affine,
    SquareOfAffine,
    EvenPowerOfAffine,
    SquareOfNonnegativeConvex,
    PowerOfNonnegativeConvex,
    MaxOfConvex,
    NonnegativeSum,
    NonnegativeScale,
    ExpOfAffine,
    AbsOfAffine,
    // sign
    NonnegativeConstant,
    EvenPower,
    Square,
    NonnegativePower,
    AbsValue,
    Exponential,
    SquareRoot,
    NonnegativeProduct,
    MaxWithNonnegative,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Affine => "affine",
            Rule::SquareOfAffine => "square-of-affine",
            Rule::EvenPowerOfAffine => "even-power-of-affine",
            Rule::SquareOfNonnegativeConvex => "square-of-nonnegative-convex",
            Rule::PowerOfNonnegativeConvex => "power-of-nonnegative-convex",
            Rule::MaxOfConvex => "max-of-convex",
            Rule::NonnegativeSum => "nonnegative-sum",
            Rule::NonnegativeScale => "nonnegative-scale",
            Rule::ExpOfAffine => "exp-of-affine",
            Rule::AbsOfAffine => "abs-of-affine",
            Rule::NonnegativeConstant => "nonnegative-constant",
            Rule::EvenPower => "even-power",
            Rule::Square => "square",
            Rule::NonnegativePower => "nonnegative-power",
            Rule::AbsValue => "abs",
            Rule::Exponential => "exp",
            Rule::SquareRoot => "sqrt",
            Rule::NonnegativeProduct => "nonnegative-product",
            Rule::MaxWithNonnegative => "max-with-nonnegative",
        }
    }
}

fn is_affine(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Var => true,
        Expr::Neg(a) => is_affine(a),
        Expr::Add(a, b) | Expr::Sub(a, b) => is_affine(a) && is_affine(b),
        Expr::Mul(a, b) => (a.is_constant() && is_affine(b)) || (is_affine(a) && b.is_constant()),
        Expr::Div(a, b) => is_affine(a) && b.is_constant(),
        _ => e.is_constant(),
    }
}

fn constant_value(e: &Expr) -> Option<f64> {
    if e.is_constant() {
        e.eval(0.0).ok()
    } else {
        None
    }
}

/// `Some(base)` when `e` is `base^2` or `base * base`.
fn square_base(e: &Expr) -> Option<&Expr> {
    match e {
        Expr::Pow(b, Exponent::Int(2)) => Some(b),
        Expr::Mul(a, b) if a == b => Some(a),
        _ => None,
    }
}

/// Per-call memo of structural facts, keyed by subtree address.
pub(super) struct Analyzer<'a> {
    iv: Interval,
    convex: HashMap<*const Expr, Option<Rule>>,
    nonneg: HashMap<*const Expr, bool>,
    _root: std::marker::PhantomData<&'a Expr>,
}

impl<'a> Analyzer<'a> {
    pub(super) fn new(iv: Interval) -> Self {
        Analyzer { iv, convex: HashMap::new(), nonneg: HashMap::new(), _root: std::marker::PhantomData }
    }

    /// Structural convexity proof.
    ///
    /// Rule order: affine, square, max, nonnegative sum/scale, exp of affine.
    pub(super) fn convex(&mut self, e: &'a Expr) -> Option<Rule> {
        let key = e as *const Expr;
        if let Some(hit) = self.convex.get(&key) {
            return *hit;
        }
        let rule = self.convex_uncached(e);
        self.convex.insert(key, rule);
        rule
    }

    fn convex_uncached(&mut self, e: &'a Expr) -> Option<Rule> {
        if is_affine(e) {
            return Some(Rule::Affine);
        }
        if let Some(base) = square_base(e) {
            if is_affine(base) {
                return Some(Rule::SquareOfAffine);
            }
            if self.convex(base).is_some() && self.nonnegative(base) {
                return Some(Rule::SquareOfNonnegativeConvex);
            }
        }
        if let Expr::Pow(base, exp) = e {
            match *exp {
                Exponent::Int(n) if n >= 2 && n % 2 == 0 && is_affine(base) => {
                    return Some(Rule::EvenPowerOfAffine)
                }
                p if p.value() >= 1.0 && self.convex(base).is_some() && self.nonnegative(base) => {
                    return Some(Rule::PowerOfNonnegativeConvex)
                }
                _ => {}
            }
        }
        match e {
            Expr::Max(a, b) if self.convex(a).is_some() && self.convex(b).is_some() => Some(Rule::MaxOfConvex),
            Expr::Add(a, b) if self.convex(a).is_some() && self.convex(b).is_some() => Some(Rule::NonnegativeSum),
            Expr::Sub(a, b) if is_affine(b) && self.convex(a).is_some() => Some(Rule::NonnegativeSum),
            Expr::Mul(a, b) => {
                let (c, f) = if a.is_constant() { (a, b) } else { (b, a) };
                match constant_value(c) {
                    Some(w) if w >= 0.0 && self.convex(f).is_some() => Some(Rule::NonnegativeScale),
                    _ => None,
                }
            }
            Expr::Div(a, b) => match constant_value(b) {
                Some(w) if w > 0.0 && self.convex(a).is_some() => Some(Rule::NonnegativeScale),
                _ => None,
            },
            Expr::Call(Func::Exp, a) if is_affine(a) => Some(Rule::ExpOfAffine),
            Expr::Call(Func::Abs, a) if is_affine(a) => Some(Rule::AbsOfAffine),
            _ => None,
        }
    }

    /// Structural sign proof only.
    pub(super) fn nonnegative_rule(&mut self, e: &'a Expr) -> Option<Rule> {
        match e {
            Expr::Const(c) if *c >= 0.0 => Some(Rule::NonnegativeConstant),
            Expr::Pow(_, Exponent::Int(n)) if *n % 2 == 0 => Some(Rule::EvenPower),
            Expr::Pow(_, Exponent::Real(_)) => Some(Rule::NonnegativePower),
            Expr::Pow(b, Exponent::Int(_)) if self.nonnegative(b) => Some(Rule::NonnegativePower),
            Expr::Mul(a, b) if a == b => Some(Rule::Square),
            Expr::Call(Func::Abs, _) => Some(Rule::AbsValue),
            Expr::Call(Func::Exp, _) => Some(Rule::Exponential),
            Expr::Call(Func::Sqrt, _) => Some(Rule::SquareRoot),
            Expr::Add(a, b) if self.nonnegative(a) && self.nonnegative(b) => Some(Rule::NonnegativeSum),
            Expr::Mul(a, b) | Expr::Div(a, b) if self.nonnegative(a) && self.nonnegative(b) => {
                Some(Rule::NonnegativeProduct)
            }
            Expr::Max(a, b) if self.nonnegative(a) || self.nonnegative(b) => Some(Rule::MaxWithNonnegative),
            _ => None,
        }
    }

    /// Sign fact for a subtree: a structural rule or, failing that, an
    /// interval enclosure over a subdivision of the domain.
    pub(super) fn nonnegative(&mut self, e: &'a Expr) -> bool {
        let key = e as *const Expr;
        if let Some(hit) = self.nonneg.get(&key) {
            return *hit;
        }
        let ok = self.nonnegative_rule(e).is_some() || enclosure_nonnegative(e, self.iv, 1 << 10);
        self.nonneg.insert(key, ok);
        ok
    }
}
