//! Chart language: coordinate expressions over `(u, v)` and the chart file format.

mod chart;
mod eval;
mod expr;

pub use chart::{parse_chart, ChartError, ChartErrorKind, ChartSpec, Domain, SpaceTag};
pub use eval::{eval_jet, eval_jet_at, eval_plain};
pub use expr::{parse_expression, parse_expression_with, BinOp, Expr, ExprError, ExprErrorKind};
