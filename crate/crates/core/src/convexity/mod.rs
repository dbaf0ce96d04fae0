//! Convexity and nonnegativity certificates for expressions on an interval.
//!
//! A [`Certificate`] is `Proved` only by sound methods: structural rules or
//! outward-rounded interval enclosures. Sampling can only disprove, and every
//! disproof carries a [`Witness`] that replays through [`Expr::eval`].
//!
//! Interval proofs accept a piece once its enclosure is above
//! `-tolerance(v)`, with `v` the value at the piece midpoint. Interval
//! endpoints such as `fl(pi)` are not the real numbers they stand for, so an
//! exact zero threshold would reject functions that are convex on the
//! intended domain.

mod rules;
mod sampling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::expr::{EvalError, Expr, Interval};
use crate::tolerance;

pub use rules::Rule;
pub use sampling::{check_lemma_pointwise, check_lemma_pointwise_with, falsify_convexity, falsify_convexity_with, LemmaSlack, LemmaSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Proved,
    Disproved,
    Unknown,
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    StructuralRule(Rule),
    /// Second-derivative enclosure is nonnegative on every piece of a subdivision.
    IntervalSecondDerivative,
    /// Value enclosure is nonnegative on every piece of a subdivision.
    IntervalEnclosure,
    SamplingFalsified,
    /// No method succeeded within its budget.
    Inconclusive,
}

/// Concrete evidence that a property fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Witness {
    /// `e(kx + (1-k)y) = lhs > rhs = k e(x) + (1-k) e(y)`.
    MidpointViolation { x: f64, y: f64, k: f64, lhs: f64, rhs: f64 },
    NegativeSecondDerivative { x: f64, value: f64 },
    NegativeValue { x: f64, value: f64 },
}

impl Witness {
    /// Recomputes the violated inequality and returns `(excess, tol)`; the
    /// witness is genuine when `excess > tol / 2`.
    pub fn excess(&self, e: &Expr) -> Result<(f64, f64), WitnessError> {
        match *self {
            Witness::MidpointViolation { x, y, k, .. } => {
                let (lhs, rhs) = midpoint_sides(e, x, y, k)?;
                Ok((lhs - rhs, tolerance(lhs.abs().max(rhs.abs()))))
            }
            Witness::NegativeSecondDerivative { x, .. } => {
                let d2 = e.differentiate()?.differentiate()?;
                let v = d2.eval(x)?;
                Ok((-v, tolerance(v)))
            }
            Witness::NegativeValue { x, .. } => {
                let v = e.eval(x)?;
                Ok((-v, tolerance(v)))
            }
        }
    }

    pub fn replays(&self, e: &Expr) -> bool {
        matches!(self.excess(e), Ok((excess, tol)) if excess > tol / 2.0)
    }

    pub fn point(&self) -> f64 {
        match *self {
            Witness::MidpointViolation { x, y, k, .. } => k * x + (1.0 - k) * y,
            Witness::NegativeSecondDerivative { x, .. } | Witness::NegativeValue { x, .. } => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Diff(#[from] crate::expr::DiffError),
}

pub(crate) fn midpoint_sides(e: &Expr, x: f64, y: f64, k: f64) -> Result<(f64, f64), EvalError> {
    let z = k * x + (1.0 - k) * y;
    let z = z.clamp(x.min(y), x.max(y));
    let lhs = e.eval(z)?;
    let rhs = k * e.eval(x)? + (1.0 - k) * e.eval(y)?;
    Ok((lhs, rhs))
}

/// Verdict with provenance. The witness is present exactly when the verdict
/// is `Disproved`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    verdict: Verdict,
    method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
}

impl Certificate {
    pub fn proved(method: Method) -> Certificate {
        Certificate { verdict: Verdict::Proved, method, witness: None }
    }

    pub fn disproved(witness: Witness) -> Certificate {
        Certificate { verdict: Verdict::Disproved, method: Method::SamplingFalsified, witness: Some(witness) }
    }

    pub fn unknown() -> Certificate {
        Certificate { verdict: Verdict::Unknown, method: Method::Inconclusive, witness: None }
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn is_proved(&self) -> bool {
        self.verdict == Verdict::Proved
    }

    pub fn is_disproved(&self) -> bool {
        self.verdict == Verdict::Disproved
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvexityError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Knobs for the certifiers. The defaults are what the free functions use.
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Random triples drawn by the midpoint falsifier.
    pub samples: usize,
    pub seed: u64,
    /// Maximum number of pieces in an interval proof.
    pub max_pieces: usize,
    /// Points in the uniform scan used for second-derivative and sign disproofs.
    pub scan_points: usize,
    pub execution: Execution,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { samples: 1000, seed: 0, max_pieces: 1 << 14, scan_points: 1025, execution: Execution::default() }
    }
}

/// Bisects `iv` until `accept` holds on every piece or the piece budget runs
/// out.
fn prove_by_bisection(iv: Interval, max_pieces: usize, accept: impl Fn(Interval) -> bool) -> bool {
    let mut stack = vec![iv];
    let mut pieces = 1usize;
    while let Some(piece) = stack.pop() {
        if accept(piece) {
            continue;
        }
        match piece.bisect() {
            Some((left, right)) if pieces < max_pieces => {
                pieces += 1;
                stack.push(right);
                stack.push(left);
            }
            _ => return false,
        }
    }
    true
}

fn enclosure_above_tolerance(e: &Expr, piece: Interval) -> bool {
    match e.eval_interval(piece) {
        Ok(enc) => {
            let scale = e.eval(piece.midpoint()).unwrap_or(1.0);
            enc.lo >= -tolerance(scale)
        }
        Err(_) => false,
    }
}

pub(crate) fn enclosure_nonnegative(e: &Expr, iv: Interval, max_pieces: usize) -> bool {
    prove_by_bisection(iv, max_pieces, |piece| enclosure_above_tolerance(e, piece))
}

/// Most negative value of `f` on a uniform grid of `points` points, if it is
/// below `-tolerance`. Grid points where `f` is undefined are skipped.
fn scan_for_negative(f: &Expr, iv: Interval, points: usize, execution: Execution) -> Option<(f64, f64)> {
    let n = points.max(2) - 1;
    let grid: Vec<f64> = (0..=n).map(|i| iv.lerp(i as f64 / n as f64)).collect();
    let values = execution.map(&grid, |&x| f.eval(x).ok().map(|v| (x, v)));
    values
        .into_iter()
        .flatten()
        .filter(|&(_, v)| v < -tolerance(v))
        .fold(None, |best: Option<(f64, f64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
}

pub fn certify_convex(e: &Expr, iv: Interval) -> Result<Certificate, ConvexityError> {
    certify_convex_with(e, iv, &CertifyOptions::default())
}

/// Structural rules, then a second-derivative scan for a disproof, then an
/// interval proof on the second derivative, then the midpoint falsifier.
pub fn certify_convex_with(e: &Expr, iv: Interval, opts: &CertifyOptions) -> Result<Certificate, ConvexityError> {
    // evaluability on the closed interval is a precondition
    e.eval(iv.lo())?;
    e.eval(iv.hi())?;

    if let Some(rule) = rules::Analyzer::new(iv).convex(e) {
        return Ok(Certificate::proved(Method::StructuralRule(rule)));
    }

    if let Some(d2) = second_derivative(e) {
        if let Some((x, value)) = scan_for_negative(&d2, iv, opts.scan_points, opts.execution) {
            return Ok(Certificate::disproved(Witness::NegativeSecondDerivative { x, value }));
        }
        if prove_by_bisection(iv, opts.max_pieces, |piece| enclosure_above_tolerance(&d2, piece)) {
            return Ok(Certificate::proved(Method::IntervalSecondDerivative));
        }
    }

    if let Some(w) = falsify_convexity_with(e, iv, opts.samples, opts.seed, opts.execution)? {
        return Ok(Certificate::disproved(w));
    }
    Ok(Certificate::unknown())
}

fn second_derivative(e: &Expr) -> Option<Expr> {
    e.differentiate().ok()?.differentiate().ok()
}

pub fn certify_nonnegative(e: &Expr, iv: Interval) -> Result<Certificate, ConvexityError> {
    certify_nonnegative_with(e, iv, &CertifyOptions::default())
}

/// Structural sign rules, then a value scan for a disproof, then an interval
/// enclosure proof.
pub fn certify_nonnegative_with(e: &Expr, iv: Interval, opts: &CertifyOptions) -> Result<Certificate, ConvexityError> {
    e.eval(iv.lo())?;
    e.eval(iv.hi())?;

    if let Some(rule) = rules::Analyzer::new(iv).nonnegative_rule(e) {
        return Ok(Certificate::proved(Method::StructuralRule(rule)));
    }
    if let Some((x, value)) = scan_for_negative(e, iv, opts.scan_points, opts.execution) {
        return Ok(Certificate::disproved(Witness::NegativeValue { x, value }));
    }
    if enclosure_nonnegative(e, iv, opts.max_pieces) {
        return Ok(Certificate::proved(Method::IntervalEnclosure));
    }
    Ok(Certificate::unknown())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use super::*;
    use crate::expr::parse;

    fn cert(text: &str, lo: f64, hi: f64) -> Certificate {
        certify_convex(&parse(text).unwrap(), Interval::new(lo, hi).unwrap()).unwrap()
    }

    fn nonneg(text: &str, lo: f64, hi: f64) -> Certificate {
        certify_nonnegative(&parse(text).unwrap(), Interval::new(lo, hi).unwrap()).unwrap()
    }

    #[test]
    fn square_is_convex() {
        let c = cert("x^2", 0.0, 1.0);
        assert_eq!(c.verdict(), Verdict::Proved);
        assert_eq!(c.method(), Method::StructuralRule(Rule::SquareOfAffine));
    }

    #[test]
    fn product_of_squares_is_not_convex() {
        let c = cert("x^2*(1-x)^2", 0.0, 1.0);
        assert_eq!(c.verdict(), Verdict::Disproved);
        match *c.witness().unwrap() {
            Witness::NegativeSecondDerivative { x, value } => {
                assert_eq!(x, 0.5);
                assert_eq!(value, -1.0);
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(c.witness().unwrap().replays(&parse("x^2*(1-x)^2").unwrap()));
    }

    #[test]
    fn shifted_sine_is_convex_on_pi_two_pi() {
        let c = cert("sin(x)+8", PI, TAU);
        assert_eq!(c.verdict(), Verdict::Proved);
        assert_eq!(c.method(), Method::IntervalSecondDerivative);
        assert_eq!(cert("1/x", PI, TAU).verdict(), Verdict::Proved);
    }

    #[test]
    fn kinked_functions_use_rules_or_sampling() {
        assert_eq!(cert("max(x, 1-x)", 0.0, 1.0).verdict(), Verdict::Proved);
        let c = cert("-abs(x)", -1.0, 1.0);
        assert_eq!(c.verdict(), Verdict::Disproved);
        assert!(matches!(c.witness(), Some(Witness::MidpointViolation { .. })));
        assert!(c.witness().unwrap().replays(&parse("-abs(x)").unwrap()));
    }

    #[test]
    fn concave_is_disproved() {
        let c = cert("sqrt(x)", 0.0, 1.0);
        assert_eq!(c.verdict(), Verdict::Disproved);
        assert!(c.witness().unwrap().replays(&parse("sqrt(x)").unwrap()));
    }

    #[test]
    fn nonnegativity() {
        let c = nonneg("sin(x)+8", PI, TAU);
        assert_eq!(c.verdict(), Verdict::Proved);
        assert_eq!(c.method(), Method::IntervalEnclosure);

        let c = nonneg("x", -1.0, 1.0);
        assert_eq!(c.verdict(), Verdict::Disproved);
        match *c.witness().unwrap() {
            Witness::NegativeValue { x, value } => {
                assert!(x < 0.0);
                assert_eq!(value, x);
            }
            other => panic!("unexpected witness {other:?}"),
        }

        let c = nonneg("(1-x)^2", 0.0, 1.0);
        assert_eq!(c.method(), Method::StructuralRule(Rule::EvenPower));
        assert_eq!(nonneg("1/x", PI, TAU).verdict(), Verdict::Proved);
    }

    #[test]
    fn domain_errors_propagate() {
        let e = parse("log(x)").unwrap();
        assert!(matches!(certify_convex(&e, Interval::unit()), Err(ConvexityError::Eval(_))));
        assert!(matches!(certify_nonnegative(&e, Interval::unit()), Err(ConvexityError::Eval(_))));
    }

    #[test]
    fn certificate_serialization() {
        let c = cert("x^2*(1-x)^2", 0.0, 1.0);
        let json = serde_json::to_value(c).unwrap();
        assert_eq!(json["verdict"], "Disproved");
        assert_eq!(json["method"], "SamplingFalsified");
        assert_eq!(json["witness"]["kind"], "NegativeSecondDerivative");
        let back: Certificate = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);

        let json = serde_json::to_value(cert("x^2", 0.0, 1.0)).unwrap();
        assert_eq!(json["method"]["StructuralRule"], "square-of-affine");
        assert!(json.get("witness").is_none());
    }
}
