//! Seeded sampling: the midpoint-convexity falsifier and the pointwise check
//! of the squaring lemma.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{certify_convex, certify_nonnegative, midpoint_sides, ConvexityError, Witness};
use crate::exec::Execution;
use crate::expr::{EvalError, Expr, Interval};
use crate::tolerance;

#[derive(Debug, Clone, Copy)]
struct Triple {
    x: f64,
    y: f64,
    k: f64,
}

/// The endpoint pair at `k = 1/2` first, then a 9-point grid with
/// `k ∈ {1/4, 1/2, 3/4}`.
fn fixed_triples(iv: Interval) -> Vec<Triple> {
    let mut out = vec![Triple { x: iv.lo(), y: iv.hi(), k: 0.5 }];
    let grid: Vec<f64> = (0..=8).map(|i| iv.lerp(i as f64 / 8.0)).collect();
    for (i, &x) in grid.iter().enumerate() {
        for &y in &grid[i + 1..] {
            for k in [0.5, 0.25, 0.75] {
                out.push(Triple { x, y, k });
            }
        }
    }
    out
}

fn random_triples(iv: Interval, count: usize, seed: u64) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Triple { x: iv.lerp(rng.gen::<f64>()), y: iv.lerp(rng.gen::<f64>()), k: rng.gen::<f64>() })
        .collect()
}

pub fn falsify_convexity(e: &Expr, iv: Interval, samples: usize, seed: u64) -> Result<Option<Witness>, EvalError> {
    falsify_convexity_with(e, iv, samples, seed, Execution::default())
}

/// First triple (fixed grid, then `samples` seeded random draws) on which
/// `e(kx + (1-k)y) > k e(x) + (1-k) e(y) + tol`.
pub fn falsify_convexity_with(
    e: &Expr,
    iv: Interval,
    samples: usize,
    seed: u64,
    execution: Execution,
) -> Result<Option<Witness>, EvalError> {
    let mut triples = fixed_triples(iv);
    triples.extend(random_triples(iv, samples, seed));
    let first = execution.find_map_first(&triples, |t| match midpoint_sides(e, t.x, t.y, t.k) {
        Ok((lhs, rhs)) => (lhs - rhs > tolerance(lhs.abs().max(rhs.abs()))).then_some(Ok(Witness::MidpointViolation {
            x: t.x,
            y: t.y,
            k: t.k,
            lhs,
            rhs,
        })),
        Err(err) => Some(Err(err)),
    });
    first.transpose()
}

/// Largest observed `rhs - lhs` for each of the three lemma inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaSlack {
    /// `2 u(x) u(y) <= u(x)^2 + u(y)^2`
    pub cross_term: f64,
    /// `(k u(x) + (1-k) u(y))^2 <= k u(x)^2 + (1-k) u(y)^2`
    pub squared_combination: f64,
    /// `u(kx + (1-k)y)^2 <= k u(x)^2 + (1-k) u(y)^2`
    pub square_convexity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaSummary {
    pub trials: usize,
    /// Total number of violated inequalities over all trials.
    pub violations: usize,
    pub max_slack: LemmaSlack,
}

struct LemmaTrial {
    slack: [f64; 3],
    violations: usize,
}

fn lemma_trial(u: &Expr, t: &Triple) -> Result<LemmaTrial, EvalError> {
    let (ux, uy) = (u.eval(t.x)?, u.eval(t.y)?);
    let z = (t.k * t.x + (1.0 - t.k) * t.y).clamp(t.x.min(t.y), t.x.max(t.y));
    let uz = u.eval(z)?;
    let k = t.k;

    let sum_sq = ux * ux + uy * uy;
    let mixed = k * ux * ux + (1.0 - k) * uy * uy;
    let comb = k * ux + (1.0 - k) * uy;
    let sides = [(2.0 * ux * uy, sum_sq), (comb * comb, mixed), (uz * uz, mixed)];

    let mut slack = [0.0; 3];
    let mut violations = 0;
    for (i, (lhs, rhs)) in sides.into_iter().enumerate() {
        slack[i] = rhs - lhs;
        if lhs > rhs + tolerance(lhs.abs().max(rhs.abs())) {
            violations += 1;
        }
    }
    Ok(LemmaTrial { slack, violations })
}

pub fn check_lemma_pointwise(u: &Expr, iv: Interval, trials: usize, seed: u64) -> Result<LemmaSummary, ConvexityError> {
    check_lemma_pointwise_with(u, iv, trials, seed, Execution::default())
}

/// Checks the three steps showing that the square of a nonnegative convex
/// function is convex, on `trials` seeded random triples.
///
/// Requires proved convexity and nonnegativity certificates for `u`.
pub fn check_lemma_pointwise_with(
    u: &Expr,
    iv: Interval,
    trials: usize,
    seed: u64,
    execution: Execution,
) -> Result<LemmaSummary, ConvexityError> {
    if !certify_nonnegative(u, iv)?.is_proved() {
        return Err(ConvexityError::Precondition(format!("{u} is not certified nonnegative on {iv}")));
    }
    if !certify_convex(u, iv)?.is_proved() {
        return Err(ConvexityError::Precondition(format!("{u} is not certified convex on {iv}")));
    }
    let triples = random_triples(iv, trials, seed);
    let results = execution.map(&triples, |t| lemma_trial(u, t));

    let mut max = [f64::NEG_INFINITY; 3];
    let mut violations = 0;
    for r in results {
        let r = r?;
        violations += r.violations;
        for (m, s) in max.iter_mut().zip(r.slack) {
            *m = m.max(s);
        }
    }
    if trials == 0 {
        max = [0.0; 3];
    }
    Ok(LemmaSummary {
        trials,
        violations,
        max_slack: LemmaSlack { cross_term: max[0], squared_combination: max[1], square_convexity: max[2] },
    })
}
