//! Scalar traits shared by every numeric layer of the crate.
//!
//! [`Real`] is the floating-point type the whole pipeline is generic over
//! (`f32` or `f64`). [`Scalar`] widens that to the coefficient types a jet can
//! carry: the reals themselves and `Complex<Real>`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Floating point: f32 or f64.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Display
    + Scalar<Real = Self>
{
    /// Lossy conversion from `f64`, used for literals and configuration values.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Elementary functions understood by the jet ring and the chart language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemFn {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl ElemFn {
    pub const ALL: [ElemFn; 7] = [
        ElemFn::Exp,
        ElemFn::Log,
        ElemFn::Sqrt,
        ElemFn::Sin,
        ElemFn::Cos,
        ElemFn::Sinh,
        ElemFn::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElemFn::Exp => "exp",
            ElemFn::Log => "log",
            ElemFn::Sqrt => "sqrt",
            ElemFn::Sin => "sin",
            ElemFn::Cos => "cos",
            ElemFn::Sinh => "sinh",
            ElemFn::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Plain-number evaluation.
    pub fn eval<S: Scalar>(self, x: S) -> S {
        x.apply_fn(self)
    }
}

/// A coefficient field for jets: a real type or its complexification.
///
/// Elementary functions go through [`Scalar::apply_fn`] so that the names do
/// not collide with `Float`'s inherent-looking methods on real types.
pub trait Scalar: Copy + Num + std::ops::Neg<Output = Self> + Debug + Send + Sync + 'static {
    type Real: Real;

    fn from_real(r: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    fn modulus(self) -> Self::Real;
    fn to_complex(self) -> Complex<Self::Real> {
        Complex::new(self.re(), self.im())
    }
    fn apply_fn(self, f: ElemFn) -> Self;
    fn int_pow(self, n: i32) -> Self;
    fn finite(self) -> bool {
        Float::is_finite(self.re()) && Float::is_finite(self.im())
    }
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            fn from_real(r: $t) -> Self {
                r
            }
            fn re(self) -> $t {
                self
            }
            fn im(self) -> $t {
                0.0
            }
            fn conj(self) -> Self {
                self
            }
            fn modulus(self) -> $t {
                <$t>::abs(self)
            }
            fn apply_fn(self, f: ElemFn) -> Self {
                match f {
                    ElemFn::Exp => <$t>::exp(self),
                    ElemFn::Log => <$t>::ln(self),
                    ElemFn::Sqrt => <$t>::sqrt(self),
                    ElemFn::Sin => <$t>::sin(self),
                    ElemFn::Cos => <$t>::cos(self),
                    ElemFn::Sinh => <$t>::sinh(self),
                    ElemFn::Cosh => <$t>::cosh(self),
                }
            }
            fn int_pow(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
        }
    };
}

real_scalar!(f32);
real_scalar!(f64);

impl<T: Real> Scalar for Complex<T> {
    type Real = T;
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn re(self) -> T {
        self.re
    }
    fn im(self) -> T {
        self.im
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn modulus(self) -> T {
        self.norm()
    }
    fn apply_fn(self, f: ElemFn) -> Self {
        match f {
            ElemFn::Exp => Complex::exp(self),
            ElemFn::Log => Complex::ln(self),
            ElemFn::Sqrt => Complex::sqrt(self),
            ElemFn::Sin => Complex::sin(self),
            ElemFn::Cos => Complex::cos(self),
            ElemFn::Sinh => Complex::sinh(self),
            ElemFn::Cosh => Complex::cosh(self),
        }
    }
    fn int_pow(self, n: i32) -> Self {
        Complex::powi(&self, n)
    }
}
