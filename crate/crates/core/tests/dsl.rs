mod common;

use lcsurf_core::dsl::{eval_jet, eval_plain, parse_chart, parse_expression, ChartErrorKind, ExprErrorKind};
use lcsurf_core::fixtures::catalog;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn print_parse_round_trip(e in common::arb_expr()) {
        let text = e.to_string();
        let back = parse_expression(&text).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn chart_text_round_trip(idx in 0usize..10, scale in 0.25f64..4.0) {
        let chart = catalog()[idx].chart.rescaled(scale);
        let text = chart.to_chart_text();
        let back = parse_chart(&text).unwrap();
        prop_assert_eq!(&back, &chart);
    }
}

#[test]
fn jet_value_matches_plain_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let e = common::random_expr(&mut rng, 5);
        let (u, v) = (rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let Ok(j) = eval_jet::<f64>(&e, (u, v), 3) else { continue };
        let p = eval_plain(&e, u, v);
        assert!(
            (j.value() - p).abs() <= 1e-12 * p.abs().max(1.0),
            "{e} at ({u}, {v}): jet {} plain {p}",
            j.value()
        );
        checked += 1;
    }
}

#[test]
fn expression_errors_carry_positions() {
    let err = parse_expression("sin(u) + cosh(w)").unwrap_err();
    assert_eq!(err.kind, ExprErrorKind::UnknownIdentifier("w".into()));
    assert_eq!(err.position, 15);
    assert!(matches!(parse_expression("u^1.5").unwrap_err().kind, ExprErrorKind::NonIntegerExponent));
    assert!(matches!(parse_expression("sin(u, v)").unwrap_err().kind, ExprErrorKind::WrongArity { got: 2, .. }));
    assert!(matches!(parse_expression("(u + v").unwrap_err().kind, ExprErrorKind::UnexpectedEnd | ExprErrorKind::UnexpectedToken { .. }));
}

#[test]
fn chart_errors() {
    let base = "name = t\nspace = R\nn = 3\nx1 = u\nx2 = v\nx3 = u*v\ndomain = 0 1 0 1\ngrid = 3 3\n";
    assert!(parse_chart(base).is_ok());
    let missing = base.replace("x3 = u*v\n", "");
    let e = parse_chart(&missing).unwrap_err();
    assert!(matches!(e.kind, ChartErrorKind::CoordinateCount { expected: 3, found: 2 }), "{e}");
    assert_eq!(e.line, Some(3));
    let e = parse_chart(&base.replace("grid = 3 3", "grid = 1 3")).unwrap_err();
    assert_eq!(e.kind, ChartErrorKind::GridTooSmall);
    let e = parse_chart(&base.replace("x2 = v", "x2 = w")).unwrap_err();
    assert!(matches!(e.kind, ChartErrorKind::Expr(_)), "{e}");
    assert_eq!(e.line, Some(5));
    let e = parse_chart(&base.replace("space = R", "space = Q")).unwrap_err();
    assert!(matches!(e.kind, ChartErrorKind::BadSpace(_)), "{e}");
}
