//! Text-mode rendering. Numbers print with 6 significant digits.

use std::fmt::Write;

use hadamard_core::convexity::{Certificate, Method, Verdict, Witness};
use hadamard_core::explorer::CampaignSummary;
use hadamard_core::hadamard::BoundReport;
use hadamard_core::{Expr, Interval};
use serde_json::Value;

/// `printf("%g")`: 6 significant digits, trailing zeros removed, exponent
/// form outside `[1e-4, 1e6)`.
pub fn g(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim(&format!("{v:.*}", (5 - exp) as usize)).to_string()
    } else {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn interval(iv: Interval) -> String {
    format!("[{}, {}]", g(iv.lo()), g(iv.hi()))
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Proved => "proved",
        Verdict::Disproved => "disproved",
        Verdict::Unknown => "unknown",
    }
}

fn certificate(c: &Certificate) -> String {
    let how = match c.method() {
        Method::StructuralRule(rule) => format!("structural rule {}", rule.name()),
        Method::IntervalSecondDerivative => "interval enclosure of the second derivative".into(),
        Method::IntervalEnclosure => "interval enclosure".into(),
        Method::SamplingFalsified => "counterexample".into(),
        Method::Inconclusive => "no method succeeded".into(),
    };
    let mut out = format!("{} ({how})", verdict(c.verdict()));
    if let Some(w) = c.witness() {
        out += &match *w {
            Witness::MidpointViolation { x, y, k, lhs, rhs } => format!(
                ": f(kx + (1-k)y) = {} > {} = k f(x) + (1-k) f(y) at x = {}, y = {}, k = {}",
                g(lhs),
                g(rhs),
                g(x),
                g(y),
                g(k)
            ),
            Witness::NegativeSecondDerivative { x, value } => format!(": f''({}) = {}", g(x), g(value)),
            Witness::NegativeValue { x, value } => format!(": f({}) = {}", g(x), g(value)),
        };
    }
    out
}

pub fn parsed(e: &Expr) -> String {
    format!("{e}\nnodes: {}\ndifferentiable: {}\n", e.node_count(), e.is_differentiable())
}

pub fn check(expr: &str, iv: Interval, convex: &Certificate, nonneg: &Certificate) -> String {
    format!(
        "expression: {expr}\ninterval: {}\nconvex: {}\nnonnegative: {}\n",
        interval(iv),
        certificate(convex),
        certificate(nonneg)
    )
}

pub fn bounds(doc: &Value) -> String {
    let mut out = String::new();
    for (key, value) in doc.as_object().expect("bounds document is an object") {
        let shown = match value {
            Value::Number(n) => g(n.as_f64().expect("finite")),
            Value::String(s) => s.clone(),
            Value::Object(o) => format!("[{}, {}]", g(o["lo"].as_f64().unwrap()), g(o["hi"].as_f64().unwrap())),
            other => other.to_string(),
        };
        let _ = writeln!(out, "{}: {shown}", key.replace('_', " "));
    }
    out
}

pub fn report(r: &BoundReport) -> String {
    let (c, b, m) = (&r.certificates, &r.bounds, &r.margins);
    let mut out = String::new();
    let _ = writeln!(out, "u: {}\nv: {}\ninterval: {}", r.u, r.v, interval(r.interval));
    for (name, cert) in [
        ("u convex", &c.u_convex),
        ("u nonnegative", &c.u_nonneg),
        ("v convex", &c.v_convex),
        ("v nonnegative", &c.v_nonneg),
        ("u*v convex", &c.product_convex),
    ] {
        let _ = writeln!(out, "{name}: {}", certificate(cert));
    }
    for (name, value) in [
        ("midpoint lower bound", b.midpoint_lower),
        ("endpoint upper bound", b.endpoint_upper),
        ("product endpoint bound", b.product_endpoint),
        ("cs endpoint bound", b.cs_endpoint),
        ("mean of u*v", b.mean_integral),
        ("margin hadamard lower", m.hadamard_lower),
        ("margin hadamard upper", m.hadamard_upper),
        ("margin product endpoint", m.product_endpoint),
        ("margin endpoint cauchy-schwarz", m.endpoint_cauchy_schwarz),
        ("margin cs endpoint", m.cs_endpoint),
    ] {
        let _ = writeln!(out, "{name}: {}", g(value));
    }
    let _ = writeln!(out, "theorem holds: {}", r.theorem_holds);
    for note in &r.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

pub fn summary(s: &CampaignSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed: {}\ninterval: {}\ntrials: {}", s.seed, interval(s.interval), s.trials);
    for (name, count) in [
        ("theorem violations", s.theorem_violations),
        ("unverified premises", s.unverified_premises),
        ("product endpoint failures", s.product_endpoint_failures),
        ("nonconvex products found", s.nonconvex_products_found),
        ("integral cs violations", s.integral_cs_violations),
        ("squares chain violations", s.squares_chain_violations),
        ("lemma violations", s.lemma_violations),
    ] {
        let _ = writeln!(out, "{name}: {count}");
    }
    let _ = writeln!(out, "worst margin: {}\nintegral cs min margin: {}", g(s.worst_margin), g(s.integral_cs_min_margin));
    for w in &s.example_witnesses {
        let _ = writeln!(out, "witness (trial {}): u = {}, v = {}, {:?}", w.trial, w.u, w.v, w.witness);
    }
    for e in &s.errors {
        let _ = writeln!(out, "error (trial {}): {}", e.trial, e.message);
    }
    out
}
