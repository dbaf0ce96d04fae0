//! Interval domains and outward-rounded interval evaluation.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Exponent, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval [{lo}, {hi}]: need finite lo < hi")]
    Invalid { lo: f64, hi: f64 },
    #[error("domain error in `{node}` over [{lo}, {hi}]")]
    Domain { node: String, lo: f64, hi: f64 },
}

/// Closed real interval `[lo, hi]` with finite `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = IntervalError;

    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::Invalid { lo, hi })
        }
    }

    /// `[0, 1]`
    pub fn unit() -> Interval {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Point at fraction `t ∈ [0, 1]` of the way from `lo` to `hi`, clamped
    /// into the interval.
    pub fn lerp(&self, t: f64) -> f64 {
        (self.lo + t * (self.hi - self.lo)).clamp(self.lo, self.hi)
    }

    /// Splits at the midpoint. `None` once the halves are no longer distinct
    /// floating-point intervals.
    pub fn bisect(&self) -> Option<(Interval, Interval)> {
        let m = self.midpoint();
        if m <= self.lo || m >= self.hi {
            return None;
        }
        Some((Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi }))
    }

    /// `n` equal-width pieces (the last one absorbs rounding).
    pub fn split(&self, n: usize) -> Vec<Interval> {
        let n = n.max(1);
        let mut pieces = Vec::with_capacity(n);
        let mut lo = self.lo;
        for i in 1..=n {
            let hi = if i == n { self.hi } else { self.lerp(i as f64 / n as f64) };
            if hi > lo {
                pieces.push(Interval { lo, hi });
                lo = hi;
            }
        }
        pieces
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Enclosure of a set of reals; `lo == hi` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalValue {
    pub lo: f64,
    pub hi: f64,
}

impl From<Interval> for IntervalValue {
    fn from(iv: Interval) -> Self {
        IntervalValue { lo: iv.lo, hi: iv.hi }
    }
}

impl IntervalValue {
    pub fn point(v: f64) -> IntervalValue {
        IntervalValue { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn hull(&self, other: &IntervalValue) -> IntervalValue {
        IntervalValue { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn magnitude(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    // a zero sum or a zero operand is exact
    if s == 0.0 || a == 0.0 || b == 0.0 {
        s
    } else {
        s.next_down()
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 || a == 0.0 || b == 0.0 {
        s
    } else {
        s.next_up()
    }
}

fn mul_bounds(a: f64, b: f64) -> (f64, f64) {
    if a == 0.0 || b == 0.0 {
        (0.0, 0.0)
    } else {
        let p = a * b;
        (p.next_down(), p.next_up())
    }
}

fn div_bounds(a: f64, b: f64) -> (f64, f64) {
    if a == 0.0 {
        (0.0, 0.0)
    } else {
        let q = a / b;
        (q.next_down(), q.next_up())
    }
}

/// Widens by `ulps` relative units of roundoff, for library functions that
/// are not correctly rounded.
fn widen(lo: f64, hi: f64, ulps: f64) -> (f64, f64) {
    let lo = if lo == 0.0 { lo } else { (lo - ulps * f64::EPSILON * lo.abs()).next_down() };
    let hi = if hi == 0.0 { hi } else { (hi + ulps * f64::EPSILON * hi.abs()).next_up() };
    (lo, hi)
}

fn mul(a: IntervalValue, b: IntervalValue) -> IntervalValue {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in [a.lo, a.hi] {
        for y in [b.lo, b.hi] {
            let (l, h) = mul_bounds(x, y);
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    IntervalValue { lo, hi }
}

/// Range of a 2π-periodic function with a single maximum at `max_phase` and
/// single minimum at `min_phase` per period. Endpoint values are combined
/// with every critical point inside the interval.
fn periodic_range(lo: f64, hi: f64, f: fn(f64) -> f64, max_phase: f64, min_phase: f64) -> IntervalValue {
    if hi - lo >= TAU {
        return IntervalValue { lo: -1.0, hi: 1.0 };
    }
    let (a, b) = (f(lo), f(hi));
    let mut out_lo = a.min(b);
    let mut out_hi = a.max(b);
    // critical points close to an endpoint are counted, which only loosens
    let slack = 8.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    let hits = |phase: f64| {
        let k = ((lo - slack - phase) / TAU).ceil();
        phase + k * TAU <= hi + slack
    };
    if hits(max_phase) {
        out_hi = 1.0;
    }
    if hits(min_phase) {
        out_lo = -1.0;
    }
    let (l, h) = widen(out_lo, out_hi, 2.0);
    IntervalValue { lo: l.max(-1.0), hi: h.min(1.0) }
}

fn powi_range(v: IntervalValue, n: i32) -> Option<IntervalValue> {
    let ulps = 2.0 + n.unsigned_abs() as f64;
    if n == 0 {
        return Some(IntervalValue::point(1.0));
    }
    if n < 0 {
        if v.contains_zero() {
            return None;
        }
        let pos = powi_range(v, -n)?;
        let (l1, _) = div_bounds(1.0, pos.hi);
        let (_, h2) = div_bounds(1.0, pos.lo);
        let (l, h) = widen(l1, h2, ulps);
        return Some(IntervalValue { lo: l, hi: h });
    }
    let (pl, ph) = (v.lo.powi(n), v.hi.powi(n));
    let (lo, hi) = if n % 2 == 1 || v.lo >= 0.0 {
        (pl, ph)
    } else if v.hi <= 0.0 {
        (ph, pl)
    } else {
        (0.0, pl.max(ph))
    };
    let (l, h) = widen(lo, hi, ulps);
    let l = if n % 2 == 0 { l.max(0.0) } else { l };
    Some(IntervalValue { lo: l, hi: h })
}

pub(super) fn enclose(e: &Expr, x: IntervalValue) -> Result<IntervalValue, IntervalError> {
    let domain = |e: &Expr, v: IntervalValue| IntervalError::Domain { node: e.to_string(), lo: v.lo, hi: v.hi };
    let out = match e {
        Expr::Const(c) => IntervalValue::point(*c),
        Expr::Var => x,
        Expr::Neg(a) => {
            let v = enclose(a, x)?;
            IntervalValue { lo: -v.hi, hi: -v.lo }
        }
        Expr::Add(a, b) => {
            let (u, v) = (enclose(a, x)?, enclose(b, x)?);
            IntervalValue { lo: add_down(u.lo, v.lo), hi: add_up(u.hi, v.hi) }
        }
        Expr::Sub(a, b) => {
            let (u, v) = (enclose(a, x)?, enclose(b, x)?);
            IntervalValue { lo: add_down(u.lo, -v.hi), hi: add_up(u.hi, -v.lo) }
        }
        Expr::Mul(a, b) => mul(enclose(a, x)?, enclose(b, x)?),
        Expr::Div(a, b) => {
            let (u, v) = (enclose(a, x)?, enclose(b, x)?);
            if v.contains_zero() {
                return Err(domain(e, x));
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for p in [u.lo, u.hi] {
                for q in [v.lo, v.hi] {
                    let (l, h) = div_bounds(p, q);
                    lo = lo.min(l);
                    hi = hi.max(h);
                }
            }
            IntervalValue { lo, hi }
        }
        Expr::Pow(base, exp) => {
            let v = enclose(base, x)?;
            match *exp {
                Exponent::Int(n) => powi_range(v, n).ok_or_else(|| domain(e, x))?,
                Exponent::Real(r) => {
                    if v.lo < 0.0 || (r < 0.0 && v.lo == 0.0) {
                        return Err(domain(e, x));
                    }
                    let (a, b) = (v.lo.powf(r), v.hi.powf(r));
                    let (l, h) = widen(a.min(b), a.max(b), 4.0);
                    IntervalValue { lo: l.max(0.0), hi: h }
                }
            }
        }
        Expr::Max(a, b) => {
            let (u, v) = (enclose(a, x)?, enclose(b, x)?);
            IntervalValue { lo: u.lo.max(v.lo), hi: u.hi.max(v.hi) }
        }
        Expr::Call(func, a) => {
            let v = enclose(a, x)?;
            match func {
                Func::Sin => periodic_range(v.lo, v.hi, f64::sin, FRAC_PI_2, -FRAC_PI_2),
                Func::Cos => periodic_range(v.lo, v.hi, f64::cos, 0.0, PI),
                Func::Exp => {
                    let (l, h) = widen(v.lo.exp(), v.hi.exp(), 2.0);
                    IntervalValue { lo: l.max(0.0), hi: h }
                }
                Func::Log => {
                    if v.lo <= 0.0 {
                        return Err(domain(e, x));
                    }
                    let (l, h) = widen(v.lo.ln(), v.hi.ln(), 2.0);
                    IntervalValue { lo: l, hi: h }
                }
                Func::Sqrt => {
                    if v.lo < 0.0 {
                        return Err(domain(e, x));
                    }
                    let (l, h) = widen(v.lo.sqrt(), v.hi.sqrt(), 1.0);
                    IntervalValue { lo: l.max(0.0), hi: h }
                }
                Func::Abs => {
                    if v.lo >= 0.0 {
                        v
                    } else if v.hi <= 0.0 {
                        IntervalValue { lo: -v.hi, hi: -v.lo }
                    } else {
                        IntervalValue { lo: 0.0, hi: (-v.lo).max(v.hi) }
                    }
                }
            }
        }
    };
    if out.lo.is_nan() || out.hi.is_nan() || out.lo.is_infinite() || out.hi.is_infinite() {
        return Err(domain(e, x));
    }
    Ok(out)
}
