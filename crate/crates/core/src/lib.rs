//! Conformal invariants of space-like surfaces in Lorentzian space forms.

pub mod algebra;
pub mod analysis;
pub mod classifier;
pub mod dsl;
pub mod fixtures;
pub mod invariants;
pub mod jet;
pub mod pipeline;
pub mod scalar;

pub use algebra::{gram_schmidt_indefinite, inner, rank_of_span, AlgebraError, FrameVector, Ring, Signature, SpaceVector};
pub use dsl::{parse_chart, parse_expression, ChartSpec, Expr, SpaceTag};
pub use jet::{ElemFn, Jet, JetError, JetVector, Variable, Wirtinger};
pub use scalar::{Real, Scalar};

pub use num_complex::Complex;

/// Real `f64` jet.
pub type Jet64 = Jet<f64>;
/// Complex `f64` jet.
pub type CJet64 = Jet<Complex<f64>>;
