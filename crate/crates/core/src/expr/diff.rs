use super::{DiffError, Exponent, Expr, Func};

// Derivative trees are built with a few zero/one shortcuts so that second
// derivatives stay small. User-written trees are never rewritten.

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::add(a, b)
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        neg(b)
    } else {
        Expr::sub(a, b)
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::neg(other),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Const(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::mul(a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        Expr::Const(0.0)
    } else if is_one(&b) {
        a
    } else {
        Expr::div(a, b)
    }
}

fn pow(base: Expr, exp: Exponent) -> Expr {
    match exp {
        Exponent::Int(0) => Expr::Const(1.0),
        Exponent::Int(1) => base,
        _ => Expr::Pow(Box::new(base), exp),
    }
}

pub(super) fn derivative(e: &Expr) -> Result<Expr, DiffError> {
    let d = match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var => Expr::Const(1.0),
        Expr::Neg(a) => neg(derivative(a)?),
        Expr::Add(a, b) => add(derivative(a)?, derivative(b)?),
        Expr::Sub(a, b) => sub(derivative(a)?, derivative(b)?),
        Expr::Mul(a, b) => add(
            mul(derivative(a)?, (**b).clone()),
            mul((**a).clone(), derivative(b)?),
        ),
        Expr::Div(a, b) => {
            let da = derivative(a)?;
            let db = derivative(b)?;
            if is_zero(&db) {
                div(da, (**b).clone())
            } else {
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), Exponent::Int(2)),
                )
            }
        }
        Expr::Pow(base, exp) => {
            let db = derivative(base)?;
            let lowered = match *exp {
                Exponent::Int(0) => return Ok(Expr::Const(0.0)),
                Exponent::Int(n) => pow((**base).clone(), Exponent::Int(n - 1)),
                Exponent::Real(r) => pow((**base).clone(), Exponent::Real(r - 1.0)),
            };
            mul(mul(Expr::Const(exp.value()), lowered), db)
        }
        Expr::Call(func, a) => {
            let da = derivative(a)?;
            let inner = (**a).clone();
            let outer = match func {
                Func::Sin => Expr::call(Func::Cos, inner),
                Func::Cos => neg(Expr::call(Func::Sin, inner)),
                Func::Exp => Expr::call(Func::Exp, inner),
                Func::Log => return Ok(div(da, inner)),
                Func::Sqrt => {
                    return Ok(div(da, Expr::mul(Expr::Const(2.0), Expr::call(Func::Sqrt, inner))))
                }
                Func::Abs => return Err(DiffError::NonDifferentiable { node: e.to_string() }),
            };
            mul(outer, da)
        }
        Expr::Max(..) => return Err(DiffError::NonDifferentiable { node: e.to_string() }),
    };
    Ok(d)
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn d_at(text: &str, x: f64) -> f64 {
        parse(text).unwrap().differentiate().unwrap().eval(x).unwrap()
    }

    #[test]
    fn power_rule() {
        assert_eq!(d_at("x^2", 3.0), 6.0);
        assert_eq!(d_at("x^(-1)", 2.0), -0.25);
        assert!((d_at("x^0.5", 4.0) - 0.25).abs() < 1e-15);
        assert_eq!(d_at("x^0", 4.0), 0.0);
    }

    #[test]
    fn product_second_derivative_at_half() {
        let f = parse("x^2*(1-x)^2").unwrap();
        let f2 = f.differentiate().unwrap().differentiate().unwrap();
        assert_eq!(f2.eval(0.5).unwrap(), -1.0);
        // closed form 2(2x-1)^2 + 4(x^2-x)
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let closed = 2.0 * (2.0 * x - 1.0).powi(2) + 4.0 * (x * x - x);
            assert!((f2.eval(x).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn first_derivative_closed_form() {
        let f1 = parse("x^2*(1-x)^2").unwrap().differentiate().unwrap();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let closed = 2.0 * (x * x - x) * (2.0 * x - 1.0);
            assert!((f1.eval(x).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn elementary_functions() {
        let x = 0.7_f64;
        assert!((d_at("sin(x)", x) - x.cos()).abs() < 1e-15);
        assert!((d_at("cos(x)", x) + x.sin()).abs() < 1e-15);
        assert!((d_at("exp(2*x)", x) - 2.0 * (2.0 * x).exp()).abs() < 1e-14);
        assert!((d_at("log(x)", x) - 1.0 / x).abs() < 1e-15);
        assert!((d_at("sqrt(x)", x) - 0.5 / x.sqrt()).abs() < 1e-15);
        assert!((d_at("1/x", x) + 1.0 / (x * x)).abs() < 1e-14);
    }

    #[test]
    fn kinks_are_rejected() {
        assert!(parse("max(x, 1-x)").unwrap().differentiate().is_err());
        assert!(parse("abs(x)").unwrap().differentiate().is_err());
    }
}
