use hadamard_core::convexity::{certify_convex, check_lemma_pointwise, falsify_convexity, Verdict};
use hadamard_core::explorer::{campaign_pairs_with, gen_convex, stress_theorem_with, ConvexFamily};
use hadamard_core::expr::{Exponent, Func};
use hadamard_core::hadamard::{
    check_squares_chain, cs_endpoint_bound, hadamard_bounds, product_endpoint_bound, verify_theorem,
};
use hadamard_core::quadrature::{integrate, DEFAULT_TOL};
use hadamard_core::{parse, structured, tolerance, Execution, Expr, Interval};
use proptest::prelude::*;

fn constant() -> impl Strategy<Value = f64> {
    prop_oneof![(-5i32..=5).prop_map(f64::from), -10.0f64..10.0]
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (-3i32..=4).prop_map(Exponent::Int),
        (0.1f64..3.0).prop_filter("non-integral", |r| r.fract() != 0.0).prop_map(Exponent::Real),
    ]
}

/// Any syntactically representable expression.
fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![constant().prop_map(Expr::Const), Just(Expr::Var)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::max(a, b)),
            (inner.clone(), exponent()).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
            (inner, prop::sample::select(vec![Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Abs]))
                .prop_map(|(a, f)| Expr::call(f, a)),
        ]
    })
}

/// Entire, moderately sized expressions.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-2.0f64..2.0).prop_map(Expr::Const), Just(Expr::Var)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), 0i32..=3).prop_map(|(a, n)| Expr::powi(a, n)),
            (inner, prop::sample::select(vec![Func::Sin, Func::Cos, Func::Exp])).prop_map(|(a, f)| Expr::call(f, a)),
        ]
    })
}

fn interval() -> impl Strategy<Value = Interval> {
    (-4.0f64..4.0, 0.01f64..4.0).prop_map(|(lo, w)| Interval::new(lo, lo + w).unwrap())
}

fn family() -> impl Strategy<Value = ConvexFamily> {
    prop::sample::select(ConvexFamily::ALL.to_vec())
}

proptest! {
    #[test]
    fn format_then_parse_is_identity(e in any_expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn derivative_matches_finite_difference(e in smooth_expr(), x in -1.0f64..1.0) {
        let d = e.differentiate().unwrap();
        let h = 1e-3 * x.abs().max(1.0);
        let stencil: Vec<f64> = [-2.0, -1.0, 1.0, 2.0].iter().map(|k| x + k * h).collect();
        // overflow is a domain error
        prop_assume!(d.eval(x).is_ok() && stencil.iter().all(|&t| e.eval(t).is_ok()));
        let exact = d.eval(x).unwrap();
        let f = |t: f64| e.eval(t).unwrap();
        // five-point stencil
        let approx = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
        let scale = [exact, f(x), f(x + 2.0 * h), f(x - 2.0 * h)].iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!((exact - approx).abs() <= 1e-5 * scale, "{}: {} vs {}", e, exact, approx);
    }

    #[test]
    fn interval_enclosure_contains_samples(e in any_expr(), iv in interval(), ts in prop::collection::vec(0.0f64..=1.0, 64)) {
        let Ok(enc) = e.eval_interval(iv) else { return Ok(()) };
        for x in ts.into_iter().map(|t| iv.lerp(t)).chain([iv.lo(), iv.hi()]) {
            if let Ok(v) = e.eval(x) {
                prop_assert!(enc.contains(v), "{} at {}: {} not in [{}, {}]", e, x, v, enc.lo, enc.hi);
            }
        }
    }

    #[test]
    fn endpoint_bounds_are_ordered(u in smooth_expr(), v in smooth_expr(), iv in interval()) {
        // overflow is a domain error
        let (Ok(pe), Ok(cs)) = (product_endpoint_bound(&u, &v, iv), cs_endpoint_bound(&u, &v, iv)) else {
            return Ok(());
        };
        prop_assert!(pe <= cs + tolerance(cs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificates_agree_with_sampling(e in smooth_expr(), iv in interval()) {
        let cert = certify_convex(&e, iv).unwrap();
        match cert.verdict() {
            Verdict::Disproved => prop_assert!(cert.witness().unwrap().replays(&e)),
            Verdict::Proved => prop_assert_eq!(falsify_convexity(&e, iv, 2000, 3).unwrap(), None),
            Verdict::Unknown => {}
        }
    }

    #[test]
    fn squaring_lemma_holds(f in family(), iv in interval(), seed: u64) {
        let u = gen_convex(f, iv, seed).unwrap();
        prop_assert_eq!(check_lemma_pointwise(&u, iv, 200, seed).unwrap().violations, 0);
    }

    #[test]
    fn self_product_of_nonnegative_convex_is_not_disproved(f in family(), iv in interval(), seed: u64) {
        let u = gen_convex(f, iv, seed).unwrap();
        prop_assert!(!certify_convex(&Expr::mul(u.clone(), u.clone()), iv).unwrap().is_disproved(), "{}", u);
    }

    #[test]
    fn squares_chain_reproduces_cs_bound(fu in family(), fv in family(), iv in interval(), seed: u64) {
        let u = gen_convex(fu, iv, seed).unwrap();
        let v = gen_convex(fv, iv, seed ^ 0x5555).unwrap();
        let chain = check_squares_chain(&u, &v, iv).unwrap();
        prop_assert!(chain.holds());
        let cs = cs_endpoint_bound(&u, &v, iv).unwrap();
        prop_assert!((chain.product_rhs.sqrt() - cs).abs() <= 1e-12 * cs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn hadamard_sandwich_for_generated(f in family(), iv in interval(), seed: u64) {
        let g = gen_convex(f, iv, seed).unwrap();
        let (lower, upper) = hadamard_bounds(&g, iv).unwrap();
        let r = integrate(&g, iv, DEFAULT_TOL * upper.abs().max(1.0) * iv.width()).unwrap();
        let mean = r.value / iv.width();
        let tol = tolerance(upper) + r.error_estimate / iv.width();
        prop_assert!(lower <= mean + tol && mean <= upper + tol, "{}: {} {} {}", g, lower, mean, upper);
    }

    #[test]
    fn theorem_holds_for_generated_pairs(fu in family(), fv in family(), iv in interval(), seed: u64) {
        let u = gen_convex(fu, iv, seed).unwrap();
        let v = gen_convex(fv, iv, seed.wrapping_add(1)).unwrap();
        let report = verify_theorem(&u, &v, iv).unwrap();
        prop_assert!(report.theorem_holds, "{:?}", report.notes);
    }

    #[test]
    fn reports_are_reproducible(fu in family(), fv in family(), iv in interval(), seed: u64) {
        let u = gen_convex(fu, iv, seed).unwrap();
        let v = gen_convex(fv, iv, !seed).unwrap();
        let first = structured::to_string(&verify_theorem(&u, &v, iv).unwrap()).unwrap();
        let second = structured::to_string(&verify_theorem(&u, &v, iv).unwrap()).unwrap();
        prop_assert_eq!(&first, &second);
        let back: hadamard_core::hadamard::BoundReport = serde_json::from_str(&first).unwrap();
        prop_assert_eq!(structured::to_string(&back).unwrap(), first);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn campaigns_are_seed_deterministic(iv in interval(), seed: u64) {
        let seq = campaign_pairs_with(6, iv, seed, Execution::Sequential).unwrap();
        let par = campaign_pairs_with(6, iv, seed, Execution::Parallel).unwrap();
        prop_assert_eq!(&seq, &par);
        let a = stress_theorem_with(6, iv, seed, Execution::Sequential).unwrap();
        let b = stress_theorem_with(6, iv, seed, Execution::Parallel).unwrap();
        let c = stress_theorem_with(6, iv, seed, Execution::Parallel).unwrap();
        prop_assert_eq!(structured::to_string(&a).unwrap(), structured::to_string(&b).unwrap());
        prop_assert_eq!(a, c);
    }
}
