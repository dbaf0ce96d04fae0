//! Hadamard-type bounds for a product `u * v` of functions on `[a, b]`.
//!
//! For convex `f` the mean `(1/(b-a)) ∫ f` lies between `f((a+b)/2)` and
//! `(f(a) + f(b))/2`. For a product of two convex functions the upper bound
//! can fail, because the product need not be convex. The endpoint
//! Cauchy–Schwarz bound
//!
//! ```text
//! sqrt(u(a)^2 + u(b)^2) * sqrt(v(a)^2 + v(b)^2) / 2
//! ```
//!
//! dominates the product endpoint bound and still bounds the mean whenever
//! `u` and `v` are nonnegative and convex. [`verify_theorem`] computes every
//! quantity involved and checks it numerically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexity::{certify_convex, certify_nonnegative, Certificate, ConvexityError, Verdict};
use crate::expr::{parse, EvalError, Expr, Interval, ParseError};
use crate::quadrature::{integrate, IntegralResult, QuadratureError, DEFAULT_TOL};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HadamardError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// `(f((a+b)/2), (f(a) + f(b))/2)`. No convexity check is made.
pub fn hadamard_bounds(f: &Expr, iv: Interval) -> Result<(f64, f64), EvalError> {
    let lower = f.eval(iv.midpoint())?;
    let upper = (f.eval(iv.lo())? + f.eval(iv.hi())?) / 2.0;
    Ok((lower, upper))
}

/// `(u(a)v(a) + u(b)v(b)) / 2`
pub fn product_endpoint_bound(u: &Expr, v: &Expr, iv: Interval) -> Result<f64, EvalError> {
    let (a, b) = (iv.lo(), iv.hi());
    Ok((u.eval(a)? * v.eval(a)? + u.eval(b)? * v.eval(b)?) / 2.0)
}

/// `sqrt(u(a)^2 + u(b)^2) * sqrt(v(a)^2 + v(b)^2) / 2`
pub fn cs_endpoint_bound(u: &Expr, v: &Expr, iv: Interval) -> Result<f64, EvalError> {
    let (a, b) = (iv.lo(), iv.hi());
    let (ua, ub, va, vb) = (u.eval(a)?, u.eval(b)?, v.eval(a)?, v.eval(b)?);
    Ok(ua.hypot(ub) * va.hypot(vb) / 2.0)
}

/// Integrates with absolute tolerance `tol`, raised for large integrands so
/// that they do not demand sub-roundoff accuracy.
fn integrate_scaled(e: &Expr, iv: Interval, tol: f64) -> Result<IntegralResult, HadamardError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidTolerance(tol).into());
    }
    let scale = [iv.lo(), iv.midpoint(), iv.hi()]
        .into_iter()
        .map(|x| e.eval(x).map(f64::abs))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    let tol = tol.max(1e-12 * scale * iv.width());
    Ok(integrate(e, iv, tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    /// `f((a+b)/2)` for `f = u v`
    pub midpoint_lower: f64,
    /// `(f(a) + f(b))/2` for `f = u v`
    pub endpoint_upper: f64,
    pub product_endpoint: f64,
    pub cs_endpoint: f64,
    pub mean_integral: f64,
}

/// Slack of each inequality, positive when it holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `mean - f((a+b)/2)`; guaranteed only for a convex product.
    pub hadamard_lower: f64,
    /// `(f(a) + f(b))/2 - mean`; guaranteed only for a convex product.
    pub hadamard_upper: f64,
    /// `product_endpoint - mean`; guaranteed only for a convex product.
    pub product_endpoint: f64,
    /// `cs_endpoint - product_endpoint`; always nonnegative.
    pub endpoint_cauchy_schwarz: f64,
    /// `cs_endpoint - mean`; nonnegative for nonnegative convex `u`, `v`.
    pub cs_endpoint: f64,
}

impl Margins {
    pub fn from_bounds(b: &BoundSet) -> Margins {
        Margins {
            hadamard_lower: b.mean_integral - b.midpoint_lower,
            hadamard_upper: b.endpoint_upper - b.mean_integral,
            product_endpoint: b.product_endpoint - b.mean_integral,
            endpoint_cauchy_schwarz: b.cs_endpoint - b.product_endpoint,
            cs_endpoint: b.cs_endpoint - b.mean_integral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub u_convex: Certificate,
    pub u_nonneg: Certificate,
    pub v_convex: Certificate,
    pub v_nonneg: Certificate,
    pub product_convex: Certificate,
}

impl Certificates {
    /// All four hypotheses on `u` and `v` are proved.
    pub fn premises_proved(&self) -> bool {
        [self.u_convex, self.u_nonneg, self.v_convex, self.v_nonneg].iter().all(Certificate::is_proved)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremVerdict {
    Holds,
    /// Premises proved but the bound failed numerically. Indicates a bug.
    Violated,
    UnverifiedPremises,
}

/// Everything computed for one `(u, v, [a, b])` instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub interval: Interval,
    pub u: String,
    pub v: String,
    pub certificates: Certificates,
    pub bounds: BoundSet,
    pub margins: Margins,
    pub theorem_holds: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn recompute_margins(&self) -> Margins {
        Margins::from_bounds(&self.bounds)
    }

    pub fn verdict(&self) -> TheoremVerdict {
        if !self.certificates.premises_proved() {
            TheoremVerdict::UnverifiedPremises
        } else if self.theorem_holds {
            TheoremVerdict::Holds
        } else {
            TheoremVerdict::Violated
        }
    }
}

fn verdict_name(c: &Certificate) -> &'static str {
    match c.verdict() {
        Verdict::Proved => "proved",
        Verdict::Disproved => "disproved",
        Verdict::Unknown => "unknown",
    }
}

/// Parses both expressions and runs [`verify_theorem`], keeping the source
/// text in the report.
pub fn verify_theorem_text(u: &str, v: &str, iv: Interval) -> Result<BoundReport, HadamardError> {
    let mut report = verify_theorem(&parse(u)?, &parse(v)?, iv)?;
    report.u = u.to_string();
    report.v = v.to_string();
    Ok(report)
}

/// Certifies the hypotheses, computes every bound and the mean of `u * v`,
/// and checks `mean <= cs_endpoint + tol`.
///
/// `theorem_holds` is only set when all four hypotheses are proved; otherwise
/// the comparison is still reported in the margins and the notes say the
/// premises are unverified.
pub fn verify_theorem(u: &Expr, v: &Expr, iv: Interval) -> Result<BoundReport, HadamardError> {
    verify_theorem_with(u, v, iv, DEFAULT_TOL)
}

/// [`verify_theorem`] with absolute quadrature tolerance `tol` for the mean.
pub fn verify_theorem_with(u: &Expr, v: &Expr, iv: Interval, tol: f64) -> Result<BoundReport, HadamardError> {
    let product = Expr::mul(u.clone(), v.clone());
    let certificates = Certificates {
        u_convex: certify_convex(u, iv)?,
        u_nonneg: certify_nonnegative(u, iv)?,
        v_convex: certify_convex(v, iv)?,
        v_nonneg: certify_nonnegative(v, iv)?,
        product_convex: certify_convex(&product, iv)?,
    };

    let (midpoint_lower, endpoint_upper) = hadamard_bounds(&product, iv)?;
    let integral = integrate_scaled(&product, iv, tol)?;
    let width = iv.width();
    let bounds = BoundSet {
        midpoint_lower,
        endpoint_upper,
        product_endpoint: product_endpoint_bound(u, v, iv)?,
        cs_endpoint: cs_endpoint_bound(u, v, iv)?,
        mean_integral: integral.value / width,
    };
    let margins = Margins::from_bounds(&bounds);
    let mean_err = integral.error_estimate / width;
    let tol_for = |bound: f64| tolerance(bound).max(tolerance(bounds.mean_integral)) + mean_err;

    let mut notes = Vec::new();
    let premises = certificates.premises_proved();
    let cs_ok = margins.cs_endpoint >= -tol_for(bounds.cs_endpoint);
    let theorem_holds = premises && cs_ok;

    if !certificates.product_convex.is_proved() {
        notes.push(format!(
            "product endpoint bound {} is valid only for a convex product; product convexity is {}",
            bounds.product_endpoint,
            verdict_name(&certificates.product_convex)
        ));
    }
    if margins.product_endpoint < -tol_for(bounds.product_endpoint) {
        notes.push(format!(
            "mean {} exceeds the product endpoint bound {}: the Hadamard upper bound fails for this product",
            bounds.mean_integral, bounds.product_endpoint
        ));
    }
    if !premises {
        let c = &certificates;
        notes.push(format!(
            "theorem not applicable: unverified premises (u convex {}, u nonnegative {}, v convex {}, v nonnegative {})",
            verdict_name(&c.u_convex),
            verdict_name(&c.u_nonneg),
            verdict_name(&c.v_convex),
            verdict_name(&c.v_nonneg)
        ));
        notes.push(format!(
            "numeric comparison only: mean {} {} cs endpoint bound {}",
            bounds.mean_integral,
            if cs_ok { "<=" } else { ">" },
            bounds.cs_endpoint
        ));
    } else if theorem_holds {
        notes.push(format!(
            "theorem holds: mean {} <= cs endpoint bound {} (margin {})",
            bounds.mean_integral, bounds.cs_endpoint, margins.cs_endpoint
        ));
    } else {
        notes.push(format!(
            "VIOLATION: mean {} > cs endpoint bound {} with proved premises",
            bounds.mean_integral, bounds.cs_endpoint
        ));
    }

    Ok(BoundReport {
        interval: iv,
        u: u.to_string(),
        v: v.to_string(),
        certificates,
        bounds,
        margins,
        theorem_holds,
        notes,
    })
}

/// A slack value together with the tolerance it is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    pub tol: f64,
}

impl Margin {
    pub fn holds(&self) -> bool {
        self.value >= -self.tol
    }
}

/// `∫u² ∫v² - (∫uv)²`, nonnegative by the integral Cauchy–Schwarz inequality.
pub fn check_integral_cs(u: &Expr, v: &Expr, iv: Interval) -> Result<Margin, HadamardError> {
    let uu = integrate_scaled(&u.squared(), iv, DEFAULT_TOL)?;
    let vv = integrate_scaled(&v.squared(), iv, DEFAULT_TOL)?;
    let uv = integrate_scaled(&Expr::mul(u.clone(), v.clone()), iv, DEFAULT_TOL)?;
    let lhs = uu.value * vv.value;
    let rhs = uv.value * uv.value;
    let tol = tolerance(lhs.abs().max(rhs))
        + uu.error_estimate * vv.value.abs()
        + vv.error_estimate * uu.value.abs()
        + uu.error_estimate * vv.error_estimate
        + 2.0 * uv.value.abs() * uv.error_estimate;
    Ok(Margin { value: lhs - rhs, tol })
}

/// Margins of the Hadamard upper bounds for `u²` and `v²` and of their
/// product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquaresChain {
    /// `(u(a)² + u(b)²)/2 - mean(u²)`
    pub u_squared: Margin,
    /// `(v(a)² + v(b)²)/2 - mean(v²)`
    pub v_squared: Margin,
    /// `(u(a)² + u(b)²)(v(a)² + v(b)²)/4 - mean(u²) mean(v²)`
    pub product: Margin,
    /// `(u(a)² + u(b)²)(v(a)² + v(b)²)/4`; its square root is the endpoint
    /// Cauchy–Schwarz bound.
    pub product_rhs: f64,
}

impl SquaresChain {
    pub fn holds(&self) -> bool {
        self.u_squared.holds() && self.v_squared.holds() && self.product.holds()
    }
}

/// Requires proved convexity and nonnegativity of both `u` and `v`, which
/// makes `u²` and `v²` convex.
pub fn check_squares_chain(u: &Expr, v: &Expr, iv: Interval) -> Result<SquaresChain, HadamardError> {
    for (name, e) in [("u", u), ("v", v)] {
        if !certify_convex(e, iv)?.is_proved() || !certify_nonnegative(e, iv)?.is_proved() {
            return Err(HadamardError::Precondition(format!(
                "{name} = {e} is not certified nonnegative and convex on {iv}"
            )));
        }
    }
    let width = iv.width();
    let (a, b) = (iv.lo(), iv.hi());
    let (ua, ub, va, vb) = (u.eval(a)?, u.eval(b)?, v.eval(a)?, v.eval(b)?);
    let u_end = (ua * ua + ub * ub) / 2.0;
    let v_end = (va * va + vb * vb) / 2.0;

    let uu = integrate_scaled(&u.squared(), iv, DEFAULT_TOL)?;
    let vv = integrate_scaled(&v.squared(), iv, DEFAULT_TOL)?;
    let (mu, mv) = (uu.value / width, vv.value / width);
    let (eu, ev) = (uu.error_estimate / width, vv.error_estimate / width);

    let product_rhs = u_end * v_end;
    Ok(SquaresChain {
        u_squared: Margin { value: u_end - mu, tol: tolerance(u_end.max(mu)) + eu },
        v_squared: Margin { value: v_end - mv, tol: tolerance(v_end.max(mv)) + ev },
        product: Margin {
            value: product_rhs - mu * mv,
            tol: tolerance(product_rhs.max(mu * mv)) + eu * mv.abs() + ev * mu.abs() + eu * ev,
        },
        product_rhs,
    })
}
