//! `hadamard`: parse expressions, certify convexity, compute and verify
//! Hadamard-type bounds, and run stress campaigns.
//!
//! Exit codes: 0 success, 1 input or numeric failure, 2 disproof or
//! violation, 3 unknown or unverified premises.

mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hadamard_core::convexity::{certify_convex_with, certify_nonnegative_with, CertifyOptions, Verdict};
use hadamard_core::expr::parse_constant;
use hadamard_core::explorer::stress_theorem;
use hadamard_core::hadamard::{
    cs_endpoint_bound, hadamard_bounds, product_endpoint_bound, verify_theorem_with, TheoremVerdict,
};
use hadamard_core::quadrature::{integrate, DEFAULT_TOL};
use hadamard_core::{parse, structured, Expr, Interval};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hadamard", version, about = "Hadamard-type bounds for products of convex functions")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// JSON with 17 significant digits
    #[value(alias = "json")]
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an expression and print its canonical form
    Parse {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Certify convexity and nonnegativity on an interval
    Check {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        interval: IntervalArg,
        /// Seed for the sampling falsifier
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hadamard bounds and mean of U, or of U*V when V is given
    Bounds {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: Option<String>,
        #[command(flatten)]
        interval: IntervalArg,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Verify the endpoint Cauchy-Schwarz bound for U*V
    Verify {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[command(flatten)]
        interval: IntervalArg,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Run a seeded stress campaign over random nonnegative convex pairs
    Stress {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        interval: IntervalArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct IntervalArg {
    /// Interval endpoints; constant expressions such as `2*pi` are accepted
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values = ["0", "1"])]
    interval: Vec<String>,
}

impl IntervalArg {
    fn parse(&self) -> Result<Interval, String> {
        let bound = |text: &str| parse_constant(text).map_err(|e| format!("interval endpoint `{text}`: {e}"));
        let (lo, hi) = (bound(&self.interval[0])?, bound(&self.interval[1])?);
        Interval::new(lo, hi).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct TolArg {
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = DEFAULT_TOL, allow_negative_numbers = true)]
    tol: f64,
}

impl TolArg {
    fn get(&self) -> Result<f64, String> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(self.tol)
        } else {
            Err(format!("tolerance must be positive and finite, got {}", self.tol))
        }
    }
}

struct Output {
    code: u8,
    text: String,
    structured: serde_json::Value,
}

fn parse_expr(text: &str) -> Result<Expr, String> {
    parse(text).map_err(|e| format!("cannot parse `{text}`: {e}"))
}

fn run(command: Command) -> Result<Output, String> {
    match command {
        Command::Parse { expr } => {
            let e = parse_expr(&expr)?;
            Ok(Output {
                code: 0,
                text: render::parsed(&e),
                structured: json!({
                    "input": expr,
                    "canonical": e.to_string(),
                    "node_count": e.node_count(),
                    "differentiable": e.is_differentiable(),
                }),
            })
        }
        Command::Check { expr, interval, seed } => {
            let (e, iv) = (parse_expr(&expr)?, interval.parse()?);
            let opts = CertifyOptions { seed, ..CertifyOptions::default() };
            let convex = certify_convex_with(&e, iv, &opts).map_err(|e| e.to_string())?;
            let nonneg = certify_nonnegative_with(&e, iv, &opts).map_err(|e| e.to_string())?;
            let verdicts = [convex.verdict(), nonneg.verdict()];
            let code = if verdicts.contains(&Verdict::Disproved) {
                2
            } else if verdicts.contains(&Verdict::Unknown) {
                3
            } else {
                0
            };
            Ok(Output {
                code,
                text: render::check(&expr, iv, &convex, &nonneg),
                structured: json!({ "expression": expr, "interval": iv, "convex": convex, "nonnegative": nonneg }),
            })
        }
        Command::Bounds { u, v, interval, tol } => {
            let iv = interval.parse()?;
            let tol = tol.get()?;
            let ue = parse_expr(&u)?;
            let ve = v.as_deref().map(parse_expr).transpose()?;
            let f = match &ve {
                Some(ve) => Expr::mul(ue.clone(), ve.clone()),
                None => ue.clone(),
            };
            let (midpoint_lower, endpoint_upper) = hadamard_bounds(&f, iv).map_err(|e| e.to_string())?;
            let integral = integrate(&f, iv, tol).map_err(|e| e.to_string())?;
            let mut doc = json!({ "interval": iv, "u": u });
            if let Some(v) = &v {
                doc["v"] = json!(v);
            }
            doc["midpoint_lower"] = json!(midpoint_lower);
            doc["endpoint_upper"] = json!(endpoint_upper);
            doc["mean"] = json!(integral.value / iv.width());
            doc["integral"] = json!(integral.value);
            doc["error_estimate"] = json!(integral.error_estimate);
            if let Some(ve) = &ve {
                doc["product_endpoint"] = json!(product_endpoint_bound(&ue, ve, iv).map_err(|e| e.to_string())?);
                doc["cs_endpoint"] = json!(cs_endpoint_bound(&ue, ve, iv).map_err(|e| e.to_string())?);
            }
            Ok(Output { code: 0, text: render::bounds(&doc), structured: doc })
        }
        Command::Verify { u, v, interval, tol } => {
            let iv = interval.parse()?;
            let tol = tol.get()?;
            let mut report = verify_theorem_with(&parse_expr(&u)?, &parse_expr(&v)?, iv, tol).map_err(|e| e.to_string())?;
            report.u = u;
            report.v = v;
            let code = match report.verdict() {
                TheoremVerdict::Holds => 0,
                TheoremVerdict::Violated => 2,
                TheoremVerdict::UnverifiedPremises => 3,
            };
            Ok(Output { code, text: render::report(&report), structured: serde_json::to_value(&report).map_err(|e| e.to_string())? })
        }
        Command::Stress { trials, interval, seed } => {
            let iv = interval.parse()?;
            let summary = stress_theorem(trials, iv, seed).map_err(|e| e.to_string())?;
            let code = if summary.theorem_violations == 0 { 0 } else { 2 };
            Ok(Output { code, text: render::summary(&summary), structured: serde_json::to_value(&summary).map_err(|e| e.to_string())? })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Structured => match structured::to_string(&out.structured) {
                    Ok(doc) => println!("{doc}"),
                    Err(err) => {
                        eprintln!("error: {err}");
                        return ExitCode::from(1);
                    }
                },
            }
            ExitCode::from(out.code)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
