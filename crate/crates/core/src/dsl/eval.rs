use crate::dsl::expr::{BinOp, Expr};
use crate::jet::{Jet, JetError, Variable};
use crate::scalar::Real;

/// Evaluates `e` as a jet at `base`; coefficients are the exact partial
/// derivatives of the expression up to `order`.
pub fn eval_jet<T: Real>(e: &Expr, base: (T, T), order: usize) -> Result<Jet<T>, JetError> {
    let u = Jet::variable(Variable::U, base.0, order);
    let v = Jet::variable(Variable::V, base.1, order);
    eval_jet_at(e, &u, &v)
}

/// Evaluates `e` with the given jets substituted for `u` and `v`.
pub fn eval_jet_at<T: Real>(e: &Expr, u: &Jet<T>, v: &Jet<T>) -> Result<Jet<T>, JetError> {
    let order = u.order().min(v.order());
    Ok(match e {
        Expr::Num(x) => Jet::constant(T::lit(*x), order),
        Expr::Const { value, .. } => Jet::constant(T::lit(*value), order),
        Expr::Var(Variable::U) => u.truncate(order),
        Expr::Var(Variable::V) => v.truncate(order),
        Expr::Neg(a) => -eval_jet_at(a, u, v)?,
        Expr::Binary(op, a, b) => {
            let a = eval_jet_at(a, u, v)?;
            let b = eval_jet_at(b, u, v)?;
            match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Mul => &a * &b,
                BinOp::Div => a.checked_div(&b)?,
            }
        }
        Expr::Pow(a, k) => eval_jet_at(a, u, v)?.try_powi(*k)?,
        Expr::Call(f, a) => eval_jet_at(a, u, v)?.apply(*f)?,
    })
}

/// Plain-number evaluator; out-of-domain calls produce NaN or infinities.
pub fn eval_plain<T: Real>(e: &Expr, u: T, v: T) -> T {
    match e {
        Expr::Num(x) => T::lit(*x),
        Expr::Const { value, .. } => T::lit(*value),
        Expr::Var(Variable::U) => u,
        Expr::Var(Variable::V) => v,
        Expr::Neg(a) => -eval_plain(a, u, v),
        Expr::Binary(op, a, b) => {
            let a = eval_plain(a, u, v);
            let b = eval_plain(b, u, v);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            }
        }
        Expr::Pow(a, k) => num_traits::Float::powi(eval_plain(a, u, v), *k),
        Expr::Call(f, a) => f.eval(eval_plain(a, u, v)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::expr::parse_expression;

    fn jet(src: &str, base: (f64, f64), order: usize) -> Result<Jet<f64>, JetError> {
        eval_jet(&parse_expression(src).unwrap(), base, order)
    }

    #[test]
    fn sinh_derivatives() {
        let j = jet("sinh(u)", (0.0, 0.0), 3).unwrap();
        let d: Vec<f64> = (0..4).map(|i| j.extract(i, 0).unwrap()).collect();
        assert_eq!(d, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn product_derivatives() {
        let j = jet("u*v", (1.0, 2.0), 2).unwrap();
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.extract(1, 0).unwrap(), 2.0);
        assert_eq!(j.extract(0, 1).unwrap(), 1.0);
        assert_eq!(j.extract(1, 1).unwrap(), 1.0);
        assert_eq!(j.extract(2, 0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors_propagate() {
        assert!(matches!(jet("sqrt(u-1)", (0.0, 0.0), 2), Err(JetError::Domain { .. })));
        assert!(matches!(jet("log(v)", (0.0, -1.0), 2), Err(JetError::Domain { .. })));
        assert_eq!(jet("1/u", (0.0, 1.0), 2).unwrap_err(), JetError::DivisionByZero);
        assert_eq!(jet("u^-1", (0.0, 1.0), 2).unwrap_err(), JetError::DivisionByZero);
    }

    #[test]
    fn negative_power_matches_reciprocal() {
        let a = jet("(1 + u*v)^-3", (0.4, -0.7), 5).unwrap();
        let b = jet("1/((1 + u*v)*(1 + u*v)*(1 + u*v))", (0.4, -0.7), 5).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn plain_matches_constant_term() {
        let e = parse_expression("exp(u)*cos(v) - log(2 + u^2)/sqrt(3 + v)").unwrap();
        let j = eval_jet(&e, (0.3, 0.8), 4).unwrap();
        assert!((j.value() - eval_plain(&e, 0.3_f64, 0.8)).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let e = parse_expression("cosh(u)^2 - sinh(u)^2").unwrap();
        let j = eval_jet::<f32>(&e, (0.5, 0.0), 3).unwrap();
        assert!((j.value() - 1.0).abs() < 1e-5);
        assert!(j.extract(1, 0).unwrap().abs() < 1e-5);
    }
}
