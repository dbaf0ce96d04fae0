//! Independent reference routines for tests. Nothing here calls the adaptive
//! integrator.

#![allow(dead_code)]

use hadamard_core::Expr;

/// Composite Simpson rule on `n` (even) panels.
pub fn simpson(f: &Expr, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut sum = f.eval(a).unwrap() + f.eval(b).unwrap();
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f.eval(a + i as f64 * h).unwrap();
    }
    sum * h / 3.0
}

/// Fixed-grid high-order oracle: composite Simpson on 2^k panels for
/// k = 1..=levels, extrapolated with a Richardson (Romberg) table.
pub fn richardson_oracle(f: &Expr, a: f64, b: f64, levels: usize) -> f64 {
    let mut table: Vec<Vec<f64>> = Vec::new();
    for k in 0..levels {
        let mut row = vec![simpson(f, a, b, 2 << k)];
        for j in 1..=k {
            let factor = 4f64.powi(j as i32 + 1);
            let prev = &table[k - 1];
            row.push((factor * row[j - 1] - prev[j - 1]) / (factor - 1.0));
        }
        table.push(row);
    }
    *table.last().unwrap().last().unwrap()
}

/// `∫_π^{2π} (sin x + 8)/x dx = Si(2π) - Si(π) + 8 ln 2`, evaluated to 40
/// digits with an arbitrary-precision library.
pub const SINE_OVER_X_INTEGRAL: f64 = 5.111_391_968_629_725;

pub type CorpusEntry = (&'static str, f64, f64, f64);

/// Expressions with closed-form integrals: (text, lo, hi, exact).
pub fn antiderivative_corpus() -> Vec<CorpusEntry> {
    use std::f64::consts::{E, FRAC_PI_2, LN_2, PI};
    vec![
        ("x^4", 0.0, 1.0, 0.2),
        ("x^2*(1-x)^2", 0.0, 1.0, 1.0 / 30.0),
        ("exp(x)", 0.0, 1.0, E - 1.0),
        ("sin(x)", 0.0, PI, 2.0),
        ("cos(x)", 0.0, FRAC_PI_2, 1.0),
        ("1/x", 1.0, 2.0, LN_2),
        ("sqrt(x)", 0.0, 1.0, 2.0 / 3.0),
        ("log(x)", 1.0, E, 1.0),
        ("x*exp(-x)", 0.0, 1.0, 1.0 - 2.0 / E),
        ("x^3 - 2*x", -1.0, 2.0, 0.75),
        ("abs(x - 0.3)", 0.0, 1.0, 0.29),
    ]
}
