//! Adaptive Gauss–Kronrod (G7/K15) integration over a closed interval.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr, Interval};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default panel budget.
pub const DEFAULT_MAX_PANELS: usize = 1_000_000;

// Kronrod abscissae on [-1, 1]; the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Absolute error estimate, summed over panels.
    pub error_estimate: f64,
    /// Number of panels in the final partition.
    pub subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("panel budget of {max_panels} exceeded")]
    BudgetExceeded { max_panels: usize },
}

struct Panel {
    iv: Interval,
    value: f64,
    error: f64,
    abs_value: f64,
}

/// Barycentric weights of the 15 Kronrod nodes, ordered
/// `-XGK[0], ..., -XGK[6], 0, XGK[6], ..., XGK[0]`.
fn barycentric_weights() -> &'static [f64; 15] {
    static WEIGHTS: OnceLock<[f64; 15]> = OnceLock::new();
    WEIGHTS.get_or_init(|| {
        let t = node_positions();
        std::array::from_fn(|i| 1.0 / (0..15).filter(|&j| j != i).map(|j| t[i] - t[j]).product::<f64>())
    })
}

fn node_positions() -> [f64; 15] {
    std::array::from_fn(|i| if i < 7 { -XGK[i] } else if i == 7 { 0.0 } else { XGK[14 - i] })
}

/// Value at `s` of the polynomial through `(node_positions()[i], f[i])`.
fn extrapolate(f: &[f64; 15], s: f64) -> f64 {
    let (t, w) = (node_positions(), barycentric_weights());
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..15 {
        let c = w[i] / (s - t[i]);
        num += c * f[i];
        den += c;
    }
    num / den
}

/// Share of an endpoint mismatch charged to the integral. A kink at distance
/// `δ` outside the outermost node changes the integral by at most
/// `mismatch · δ / 2`, and `δ <= (1 - XGK[0]) · half`.
const ENDPOINT_CHARGE: f64 = 0.5 * (1.0 - XGK[0]);

fn kronrod(e: &Expr, iv: Interval) -> Result<Panel, EvalError> {
    let center = iv.midpoint();
    let half = 0.5 * iv.width();
    let mut f = [0.0; 15];
    f[7] = e.eval(center)?;
    for j in 0..7 {
        let dx = half * XGK[j];
        f[j] = e.eval(center - dx)?;
        f[14 - j] = e.eval(center + dx)?;
    }
    let mut k15 = WGK[7] * f[7];
    let mut g7 = WG[3] * f[7];
    let mut abs = WGK[7] * f[7].abs();
    for j in 0..7 {
        let (f1, f2) = (f[j], f[14 - j]);
        k15 += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g7 += WG[j / 2] * (f1 + f2);
        }
    }
    // every node may miss a feature that sits next to an endpoint
    let mismatch = (extrapolate(&f, -1.0) - e.eval(iv.lo())?).abs() + (extrapolate(&f, 1.0) - e.eval(iv.hi())?).abs();
    let error = ((k15 - g7) * half).abs().max(ENDPOINT_CHARGE * half * mismatch);
    Ok(Panel { iv, value: k15 * half, error, abs_value: abs * half })
}

pub fn integrate(e: &Expr, iv: Interval, tol: f64) -> Result<IntegralResult, QuadratureError> {
    integrate_with(e, iv, tol, DEFAULT_MAX_PANELS)
}

/// Bisects any panel whose error estimate exceeds its share of `tol`
/// (proportional to width). Panels are summed left to right.
///
/// A panel is judged by its two halves: the estimate is the larger of the
/// halves' own estimates and the change from the whole-panel K15 value. The
/// second term catches kinks where K15 and G7 agree by accident. A half's
/// estimate is `|K15 - G7|`, raised if the interpolant through the nodes
/// misses the function value at an endpoint.
///
/// A panel whose error is at the roundoff floor of its own absolute integral
/// is accepted even above its share; in that case `error_estimate` may exceed
/// `tol`.
pub fn integrate_with(e: &Expr, iv: Interval, tol: f64, max_panels: usize) -> Result<IntegralResult, QuadratureError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidTolerance(tol));
    }
    // closed interval: the integrand must be defined at both endpoints
    e.eval(iv.lo())?;
    e.eval(iv.hi())?;

    let total_width = iv.width();
    let mut stack = vec![kronrod(e, iv)?];
    let mut processed = 1usize;
    let (mut value, mut error, mut accepted) = (0.0, 0.0, 0usize);
    while let Some(parent) = stack.pop() {
        let Some((l, r)) = parent.iv.bisect() else {
            value += parent.value;
            error += parent.error;
            accepted += 1;
            continue;
        };
        processed += 2;
        if processed > max_panels {
            return Err(QuadratureError::BudgetExceeded { max_panels });
        }
        let (left, right) = (kronrod(e, l)?, kronrod(e, r)?);
        let refined = left.value + right.value;
        let err = (left.error + right.error).max((parent.value - refined).abs());
        let share = tol * parent.iv.width() / total_width;
        let roundoff = 50.0 * f64::EPSILON * (left.abs_value + right.abs_value);
        if err <= share.max(roundoff) {
            value += refined;
            error += err;
            accepted += 2;
        } else {
            stack.push(right);
            stack.push(left);
        }
    }
    Ok(IntegralResult { value, error_estimate: error, subdivisions: accepted })
}

/// `(1 / (b - a)) ∫_a^b e`, integrated to absolute tolerance `tol * (b - a)`.
pub fn mean_value(e: &Expr, iv: Interval, tol: f64) -> Result<f64, QuadratureError> {
    Ok(integrate(e, iv, tol * iv.width())?.value / iv.width())
}
