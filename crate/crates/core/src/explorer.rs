//! Seeded generators of nonnegative convex functions and the campaigns built
//! on them: a stress test of the endpoint Cauchy–Schwarz bound, and searches
//! for non-convex products and for failures of the product endpoint bound.
//!
//! Every trial draws from its own `ChaCha8` stream seeded by
//! [`trial_seed`]`(campaign_seed, index)`, so trials can run on any number of
//! workers and results are merged in trial order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexity::{certify_convex, check_lemma_pointwise_with, ConvexityError, Witness};
use crate::exec::Execution;
use crate::expr::{parse, Expr, Interval};
use crate::hadamard::{check_integral_cs, check_squares_chain, verify_theorem, HadamardError, TheoremVerdict};
use crate::tolerance;

/// Largest magnitude a generated function may reach on its interval.
pub const MAX_MAGNITUDE: f64 = 1e6;
const MAX_ATTEMPTS: usize = 32;
/// Pointwise lemma triples per generated function in a stress trial.
const LEMMA_TRIALS_PER_FUNCTION: usize = 64;
/// Witnesses kept in a campaign summary.
const MAX_STORED_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConvexFamily {
    /// `α(x - c)² + β` with `α > 0`, `β ≥ 0`
    NonnegQuadratic,
    /// `max(p₁x + q₁, p₂x + q₂) + offset`, offset = minus the smallest
    /// endpoint value of the two pieces
    MaxAffinePlusOffset,
    /// `(px + q)²`
    SquaredAffine,
    /// `exp(px + q)`
    ExpAffine,
    /// `w₁g₁ + w₂g₂` with positive weights and `g` from the families above
    ScaledSum,
}

impl ConvexFamily {
    pub const ALL: [ConvexFamily; 5] = [
        ConvexFamily::NonnegQuadratic,
        ConvexFamily::MaxAffinePlusOffset,
        ConvexFamily::SquaredAffine,
        ConvexFamily::ExpAffine,
        ConvexFamily::ScaledSum,
    ];
    const BASIC: [ConvexFamily; 4] = [
        ConvexFamily::NonnegQuadratic,
        ConvexFamily::MaxAffinePlusOffset,
        ConvexFamily::SquaredAffine,
        ConvexFamily::ExpAffine,
    ];
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplorerError {
    #[error("could not generate a certified {family:?} function on {interval} from seed {seed}")]
    RetryExhausted { family: ConvexFamily, interval: Interval, seed: u64 },
    #[error("campaigns need at least one trial")]
    NoTrials,
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
}

/// SplitMix64 finalizer over the campaign seed and trial index.
pub fn trial_seed(campaign_seed: u64, index: u64) -> u64 {
    let mut z = campaign_seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-4.0..=4.0)
}

fn affine(p: f64, q: f64) -> Expr {
    Expr::add(Expr::mul(Expr::Const(p), Expr::Var), Expr::Const(q))
}

fn candidate(family: ConvexFamily, iv: Interval, rng: &mut ChaCha8Rng) -> Expr {
    match family {
        ConvexFamily::NonnegQuadratic => {
            let alpha = rng.gen_range(0.05..=4.0);
            let center = iv.lo() + rng.gen_range(-0.25..=1.25) * iv.width();
            let beta = rng.gen_range(0.0..=4.0);
            Expr::add(
                Expr::mul(Expr::Const(alpha), Expr::powi(Expr::sub(Expr::Var, Expr::Const(center)), 2)),
                Expr::Const(beta),
            )
        }
        ConvexFamily::MaxAffinePlusOffset => {
            let (p1, q1, p2, q2) = (coefficient(rng), coefficient(rng), coefficient(rng), coefficient(rng));
            let offset = -max_affine_floor(p1, q1, p2, q2, iv);
            Expr::add(Expr::max(affine(p1, q1), affine(p2, q2)), Expr::Const(offset))
        }
        ConvexFamily::SquaredAffine => Expr::powi(affine(coefficient(rng), coefficient(rng)), 2),
        ConvexFamily::ExpAffine => {
            // keeps |px + q| <= 8 on the interval
            let reach = iv.lo().abs().max(iv.hi().abs()).max(1.0);
            Expr::call(crate::expr::Func::Exp, affine(coefficient(rng) / reach, coefficient(rng)))
        }
        ConvexFamily::ScaledSum => {
            let term = |rng: &mut ChaCha8Rng| {
                let family = ConvexFamily::BASIC[rng.gen_range(0..ConvexFamily::BASIC.len())];
                let weight = rng.gen_range(0.1..=2.0);
                Expr::mul(Expr::Const(weight), candidate(family, iv, rng))
            };
            let first = term(rng);
            Expr::add(first, term(rng))
        }
    }
}

/// Smallest endpoint value of the two affine pieces.
pub fn max_affine_floor(p1: f64, q1: f64, p2: f64, q2: f64, iv: Interval) -> f64 {
    [iv.lo(), iv.hi()]
        .into_iter()
        .flat_map(|x| [p1 * x + q1, p2 * x + q2])
        .fold(f64::INFINITY, f64::min)
}

fn within_magnitude(e: &Expr, iv: Interval) -> bool {
    (0..=8).all(|i| matches!(e.eval(iv.lerp(i as f64 / 8.0)), Ok(v) if v.abs() < MAX_MAGNITUDE))
}

/// A function from `family` with proved convexity and nonnegativity
/// certificates on `iv`. Deterministic in `seed`.
pub fn gen_convex(family: ConvexFamily, iv: Interval, seed: u64) -> Result<Expr, ExplorerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let e = candidate(family, iv, &mut rng);
        if !within_magnitude(&e, iv) {
            continue;
        }
        if certify_convex(&e, iv)?.is_proved() && crate::convexity::certify_nonnegative(&e, iv)?.is_proved() {
            return Ok(e);
        }
    }
    Err(ExplorerError::RetryExhausted { family, interval: iv, seed })
}

/// The pair `(x², (1-x)²)`: both convex, product not convex on `[0, 1]`.
pub fn squares_pair() -> (Expr, Expr) {
    (parse("x^2").expect("literal"), parse("(1-x)^2").expect("literal"))
}

fn random_pair(iv: Interval, seed: u64) -> Result<(Expr, Expr), ExplorerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fu = ConvexFamily::ALL[rng.gen_range(0..ConvexFamily::ALL.len())];
    let fv = ConvexFamily::ALL[rng.gen_range(0..ConvexFamily::ALL.len())];
    let (su, sv) = (rng.gen::<u64>(), rng.gen::<u64>());
    Ok((gen_convex(fu, iv, su)?, gen_convex(fv, iv, sv)?))
}

/// The `(u, v)` pairs of a campaign: the squares pair at index zero, then
/// `trials - 1` random nonnegative convex pairs.
pub fn campaign_pairs(trials: usize, iv: Interval, seed: u64) -> Result<Vec<(Expr, Expr)>, ExplorerError> {
    campaign_pairs_with(trials, iv, seed, Execution::default())
}

pub fn campaign_pairs_with(
    trials: usize,
    iv: Interval,
    seed: u64,
    execution: Execution,
) -> Result<Vec<(Expr, Expr)>, ExplorerError> {
    if trials == 0 {
        return Err(ExplorerError::NoTrials);
    }
    execution
        .map_range(trials, |i| if i == 0 { Ok(squares_pair()) } else { random_pair(iv, trial_seed(seed, i as u64)) })
        .into_iter()
        .collect()
}

/// A disproof of convexity of `u * v`, replayable from the stored text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub trial: usize,
    pub interval: Interval,
    pub u: String,
    pub v: String,
    pub witness: Witness,
}

impl WitnessRecord {
    pub fn product(&self) -> Option<Expr> {
        Some(Expr::mul(parse(&self.u).ok()?, parse(&self.v).ok()?))
    }

    pub fn replays(&self) -> bool {
        self.product().is_some_and(|p| self.witness.replays(&p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub seed: u64,
    pub interval: Interval,
    pub trials: usize,
    /// Trials with proved premises whose mean exceeded the Cauchy–Schwarz
    /// endpoint bound. Expected to be zero.
    pub theorem_violations: usize,
    /// Trials where a premise could not be proved.
    pub unverified_premises: usize,
    /// Trials where the mean exceeded the product endpoint bound.
    pub product_endpoint_failures: usize,
    pub nonconvex_products_found: usize,
    /// Smallest `cs_endpoint - mean` over all trials.
    pub worst_margin: f64,
    pub integral_cs_violations: usize,
    /// Smallest `∫u² ∫v² - (∫uv)²` over all trials.
    pub integral_cs_min_margin: f64,
    pub squares_chain_violations: usize,
    pub lemma_violations: usize,
    pub example_witnesses: Vec<WitnessRecord>,
    pub errors: Vec<TrialError>,
}

struct TrialOutcome {
    verdict: TheoremVerdict,
    cs_margin: f64,
    product_endpoint_failed: bool,
    nonconvex_witness: Option<Witness>,
    integral_cs: crate::hadamard::Margin,
    squares_chain_ok: bool,
    lemma_violations: usize,
}

fn run_trial(u: &Expr, v: &Expr, iv: Interval, seed: u64) -> Result<TrialOutcome, HadamardError> {
    let report = verify_theorem(u, v, iv)?;
    let b = &report.bounds;
    let product_endpoint_failed =
        report.margins.product_endpoint < -tolerance(b.product_endpoint.abs().max(b.mean_integral.abs()));
    let integral_cs = check_integral_cs(u, v, iv)?;

    let (mut squares_chain_ok, mut lemma_violations) = (true, 0);
    if report.certificates.premises_proved() {
        squares_chain_ok = check_squares_chain(u, v, iv)?.holds();
        for (k, e) in [u, v].into_iter().enumerate() {
            let s = check_lemma_pointwise_with(
                e,
                iv,
                LEMMA_TRIALS_PER_FUNCTION,
                trial_seed(seed, k as u64),
                Execution::Sequential,
            )?;
            lemma_violations += s.violations;
        }
    }
    Ok(TrialOutcome {
        verdict: report.verdict(),
        cs_margin: report.margins.cs_endpoint,
        product_endpoint_failed,
        nonconvex_witness: report.certificates.product_convex.witness().copied(),
        integral_cs,
        squares_chain_ok,
        lemma_violations,
    })
}

/// Runs the full verification on each given pair.
pub fn stress_pairs(pairs: &[(Expr, Expr)], iv: Interval, seed: u64, execution: Execution) -> CampaignSummary {
    let indexed: Vec<(usize, &(Expr, Expr))> = pairs.iter().enumerate().collect();
    let outcomes = execution.map(&indexed, |&(i, (u, v))| run_trial(u, v, iv, trial_seed(seed, i as u64)));

    let mut s = CampaignSummary {
        seed,
        interval: iv,
        trials: pairs.len(),
        theorem_violations: 0,
        unverified_premises: 0,
        product_endpoint_failures: 0,
        nonconvex_products_found: 0,
        worst_margin: f64::INFINITY,
        integral_cs_violations: 0,
        integral_cs_min_margin: f64::INFINITY,
        squares_chain_violations: 0,
        lemma_violations: 0,
        example_witnesses: Vec::new(),
        errors: Vec::new(),
    };
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let o = match outcome {
            Ok(o) => o,
            Err(err) => {
                s.errors.push(TrialError { trial, message: err.to_string() });
                continue;
            }
        };
        match o.verdict {
            TheoremVerdict::Holds => {}
            TheoremVerdict::Violated => s.theorem_violations += 1,
            TheoremVerdict::UnverifiedPremises => s.unverified_premises += 1,
        }
        s.worst_margin = s.worst_margin.min(o.cs_margin);
        s.product_endpoint_failures += o.product_endpoint_failed as usize;
        if let Some(witness) = o.nonconvex_witness {
            s.nonconvex_products_found += 1;
            if s.example_witnesses.len() < MAX_STORED_WITNESSES {
                let (u, v) = &pairs[trial];
                s.example_witnesses.push(WitnessRecord {
                    trial,
                    interval: iv,
                    u: u.to_string(),
                    v: v.to_string(),
                    witness,
                });
            }
        }
        if !o.integral_cs.holds() {
            s.integral_cs_violations += 1;
        }
        s.integral_cs_min_margin = s.integral_cs_min_margin.min(o.integral_cs.value);
        s.squares_chain_violations += !o.squares_chain_ok as usize;
        s.lemma_violations += o.lemma_violations;
    }
    s
}

pub fn stress_theorem(trials: usize, iv: Interval, seed: u64) -> Result<CampaignSummary, ExplorerError> {
    stress_theorem_with(trials, iv, seed, Execution::default())
}

/// Generates `trials` nonnegative convex pairs (the squares pair first) and
/// verifies the endpoint Cauchy–Schwarz bound on each.
pub fn stress_theorem_with(
    trials: usize,
    iv: Interval,
    seed: u64,
    execution: Execution,
) -> Result<CampaignSummary, ExplorerError> {
    let pairs = campaign_pairs_with(trials, iv, seed, execution)?;
    Ok(stress_pairs(&pairs, iv, seed, execution))
}

/// Trial zero is always the squares pair on `[0, 1]`; the remaining trials
/// run on the campaign interval.
fn search_instances(trials: usize, iv: Interval, seed: u64) -> Result<Vec<(usize, Interval, Expr, Expr)>, ExplorerError> {
    let pairs = campaign_pairs(trials, iv, seed)?;
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| (i, if i == 0 { Interval::unit() } else { iv }, u, v))
        .collect())
}

/// Every pair whose product gets a disproved convexity certificate.
pub fn find_nonconvex_product(trials: usize, iv: Interval, seed: u64) -> Result<Vec<WitnessRecord>, ExplorerError> {
    let instances = search_instances(trials, iv, seed)?;
    let found = Execution::default().map(&instances, |(trial, iv, u, v)| {
        let product = Expr::mul(u.clone(), v.clone());
        Ok::<_, ExplorerError>(certify_convex(&product, *iv)?.witness().map(|w| WitnessRecord {
            trial: *trial,
            interval: *iv,
            u: u.to_string(),
            v: v.to_string(),
            witness: *w,
        }))
    });
    found.into_iter().filter_map(Result::transpose).collect()
}

/// An instance where the mean of `u * v` exceeds the product endpoint bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEndpointFailure {
    pub trial: usize,
    pub interval: Interval,
    pub u: String,
    pub v: String,
    pub mean: f64,
    pub product_endpoint: f64,
    pub cs_endpoint: f64,
    /// Cross-check: the mean still respects the Cauchy–Schwarz endpoint bound.
    pub cs_bound_holds: bool,
}

/// Among pairs with a non-convex product, those where the product endpoint
/// bound fails numerically.
pub fn falsify_product_endpoint_bound(
    trials: usize,
    iv: Interval,
    seed: u64,
) -> Result<Vec<ProductEndpointFailure>, ExplorerError> {
    let instances = search_instances(trials, iv, seed)?;
    let found = Execution::default().map(&instances, |(trial, iv, u, v)| -> Result<_, ExplorerError> {
        let product = Expr::mul(u.clone(), v.clone());
        if !certify_convex(&product, *iv)?.is_disproved() {
            return Ok(None);
        }
        let report = match verify_theorem(u, v, *iv) {
            Ok(r) => r,
            Err(_) => return Ok(None),
        };
        let b = report.bounds;
        if b.mean_integral - b.product_endpoint <= tolerance(b.product_endpoint.abs().max(b.mean_integral.abs())) {
            return Ok(None);
        }
        Ok(Some(ProductEndpointFailure {
            trial: *trial,
            interval: *iv,
            u: u.to_string(),
            v: v.to_string(),
            mean: b.mean_integral,
            product_endpoint: b.product_endpoint,
            cs_endpoint: b.cs_endpoint,
            cs_bound_holds: b.mean_integral <= b.cs_endpoint + tolerance(b.cs_endpoint),
        }))
    });
    found.into_iter().filter_map(Result::transpose).collect()
}
