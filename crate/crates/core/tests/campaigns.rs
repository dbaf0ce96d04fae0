use std::f64::consts::{PI, TAU};

use hadamard_core::convexity::{certify_convex, Witness};
use hadamard_core::explorer::{falsify_product_endpoint_bound, find_nonconvex_product, stress_theorem, stress_theorem_with};
use hadamard_core::{parse, structured, Execution, Expr, Interval};

#[test]
fn stress_on_unit_interval() {
    let s = stress_theorem(1000, Interval::unit(), 7).unwrap();
    assert_eq!(s.theorem_violations, 0);
    assert_eq!(s.seed, 7);
    assert!(s.errors.is_empty(), "{:?}", s.errors);
    assert!(s.example_witnesses.iter().all(|w| w.replays()));
}

#[test]
fn stress_on_shifted_interval() {
    let s = stress_theorem(1000, Interval::new(PI, TAU).unwrap(), 7).unwrap();
    assert_eq!(s.theorem_violations, 0);
    assert!(s.example_witnesses.iter().all(|w| w.replays()));
}

#[test]
fn summaries_serialize_identically() {
    let iv = Interval::new(2.0, 5.0).unwrap();
    let a = structured::to_string(&stress_theorem_with(50, iv, 3, Execution::Sequential).unwrap()).unwrap();
    let b = structured::to_string(&stress_theorem_with(50, iv, 3, Execution::Parallel).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 3"));
}

#[test]
fn nonconvex_search_finds_squares_pair() {
    let found = find_nonconvex_product(500, Interval::unit(), 11).unwrap();
    let first = &found[0];
    assert_eq!((first.trial, first.u.as_str(), first.v.as_str()), (0, "(x^2)", "((1 - x)^2)"));
    assert!(matches!(first.witness, Witness::NegativeSecondDerivative { x, .. } if (x - 0.5).abs() < 0.05));
    assert!(found.iter().all(|w| w.replays()));
}

#[test]
fn aligned_squared_affine_product_is_not_disproved() {
    // (2x - 1)^2 (2x - 1)^2 = (2x - 1)^4
    let g = parse("(2*x - 1)^2").unwrap();
    assert!(!certify_convex(&Expr::mul(g.clone(), g), Interval::unit()).unwrap().is_disproved());
}

#[test]
fn product_endpoint_failures_respect_cs_bound() {
    let hits = falsify_product_endpoint_bound(500, Interval::unit(), 13).unwrap();
    assert_eq!(hits[0].trial, 0);
    assert!((hits[0].mean - 1.0 / 30.0).abs() < 1e-12);
    assert!(hits.iter().all(|h| h.cs_bound_holds && h.mean <= h.cs_endpoint + 1e-9 * h.cs_endpoint.max(1.0)));
}
