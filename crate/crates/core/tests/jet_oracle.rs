mod common;

use lcsurf_core::dsl::parse_expression;

#[test]
fn jets_match_finite_differences() {
    let (rel, what) = common::worst_fd_mismatch(101, 200, 4);
    assert!(rel <= 1e-6, "{rel:e}: {what}");
}

#[test]
fn higher_orders_match_too() {
    let (rel, what) = common::worst_fd_mismatch(202, 30, 6);
    assert!(rel <= 1e-6, "{rel:e}: {what}");
}

#[test]
fn known_expression() {
    let e = parse_expression("sinh(u)*cos(v) + log(2 + u^2*v)").unwrap();
    let jet = lcsurf_core::dsl::eval_jet::<f64>(&e, (0.3, -0.4), 4).unwrap();
    for (i, j) in [(0, 0), (1, 0), (2, 1), (0, 4), (3, 1)] {
        let fd = common::fd_partial(&e, (0.3, -0.4), i, j);
        assert!((jet.extract(i, j).unwrap() - fd).abs() < 1e-9 * fd.abs().max(1.0));
    }
}
