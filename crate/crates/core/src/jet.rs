//! Bivariate truncated Taylor arithmetic ("jets") in the coordinates `(u, v)`.
//!
//! # Storage convention
//!
//! A [`Jet`] of order `K` stores **raw partial derivatives**, not monomial
//! coefficients: the slot for the pair `(i, j)` holds
//! `∂^{i+j} f / ∂u^i ∂v^j` evaluated at the base point. Slots are laid out by
//! total degree `d = i + j`, then by the `v`-power `j`, so that slot
//! `d(d+1)/2 + j` holds `(d - j, j)`. Truncating to a lower order is therefore
//! a prefix of the coefficient vector. There are `(K+1)(K+2)/2` slots.
//!
//! Arithmetic converts to monomial coefficients internally (divide by
//! `i! j!`), multiplies as truncated polynomials and converts back, so every
//! stored derivative is exact up to round-off.
//!
//! Binary operations between jets of different orders truncate to the lower
//! order: the higher coefficients of the shorter operand are unknown.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex;
use thiserror::Error;

use crate::algebra::SpaceVector;
use num_traits::{Float, Zero};

use crate::scalar::{Real, Scalar};
pub use crate::scalar::ElemFn;

/// Number of stored coefficients for a jet of the given order.
pub const fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
const fn slot(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet with zero constant term")]
    DivisionByZero,
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("jet of order {0} cannot be differentiated")]
    OrderTooLow(usize),
    #[error("derivative ({i}, {k}) exceeds jet order {order}")]
    IndexBeyondOrder { i: usize, k: usize, order: usize },
}

/// Coordinate direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    U,
    V,
}

/// Wirtinger direction: `∂_z = ½(∂_u − i∂_v)` or `∂_z̄ = ½(∂_u + i∂_v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wirtinger {
    Z,
    ZBar,
}

/// Derivative tables for the elementary functions.
trait ElemDerivatives {
    fn derivatives<S: Scalar>(self, x: S, order: usize) -> Vec<S>;
    fn check_domain<S: Scalar>(self, x: S) -> Result<(), JetError>;
}

impl ElemDerivatives for ElemFn {
    /// `f^{(k)}(x)` for `k = 0..=order`.
    fn derivatives<S: Scalar>(self, x: S, order: usize) -> Vec<S> {
        let one = S::one();
        let mut out = Vec::with_capacity(order + 1);
        match self {
            ElemFn::Exp => {
                let e = x.apply_fn(ElemFn::Exp);
                out.resize(order + 1, e);
            }
            ElemFn::Sin | ElemFn::Cos => {
                let (s, c) = (x.apply_fn(ElemFn::Sin), x.apply_fn(ElemFn::Cos));
                let cycle = [s, c, -s, -c];
                let start = if self == ElemFn::Sin { 0 } else { 1 };
                out.extend((0..=order).map(|k| cycle[(start + k) % 4]));
            }
            ElemFn::Sinh | ElemFn::Cosh => {
                let (s, c) = (x.apply_fn(ElemFn::Sinh), x.apply_fn(ElemFn::Cosh));
                let start = if self == ElemFn::Sinh { 0 } else { 1 };
                out.extend((0..=order).map(|k| if (start + k) % 2 == 0 { s } else { c }));
            }
            ElemFn::Log => {
                out.push(x.apply_fn(ElemFn::Log));
                let inv = one / x;
                let mut p = inv;
                for k in 1..=order {
                    out.push(p);
                    // d/dx of (-1)^{k-1}(k-1)! x^{-k}
                    p = -p * inv * S::from_real(<S::Real as Real>::lit(k as f64));
                }
            }
            ElemFn::Sqrt => {
                let r = x.apply_fn(ElemFn::Sqrt);
                let inv = one / x;
                let mut p = r;
                for k in 0..=order {
                    out.push(p);
                    let e = 0.5 - k as f64;
                    p = p * inv * S::from_real(<S::Real as Real>::lit(e));
                }
            }
        }
        out
    }

    fn check_domain<S: Scalar>(self, x: S) -> Result<(), JetError> {
        let bad = match self {
            ElemFn::Log | ElemFn::Sqrt => {
                x.im() == S::Real::zero() && x.re() <= S::Real::zero() || !x.finite()
            }
            _ => !x.finite(),
        };
        if bad {
            Err(JetError::Domain {
                func: self.name(),
                value: x.re().as_f64(),
            })
        } else {
            Ok(())
        }
    }
}


/// Truncated bivariate Taylor expansion storing partial derivatives.
#[derive(Clone, PartialEq)]
pub struct Jet<S> {
    order: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

fn factorial<T: Real>(n: usize) -> T {
    let mut acc = T::one();
    for k in 2..=n {
        acc = acc * T::lit(k as f64);
    }
    acc
}

impl<S: Scalar> Jet<S> {
    pub fn constant(value: S, order: usize) -> Self {
        let mut coeffs = vec![S::zero(); coeff_count(order)];
        coeffs[0] = value;
        Jet { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(S::zero(), order)
    }

    /// The coordinate function `u` or `v` itself, expanded at `base`.
    pub fn variable(which: Variable, base: S, order: usize) -> Self {
        let mut j = Self::constant(base, order);
        if order >= 1 {
            let s = match which {
                Variable::U => slot(1, 0),
                Variable::V => slot(0, 1),
            };
            j.coeffs[s] = S::one();
        }
        j
    }

    /// Builds a jet from raw derivatives in the documented slot layout.
    ///
    /// Panics if the length is not a triangular count.
    pub fn from_derivatives(coeffs: Vec<S>) -> Self {
        let order = (0..)
            .find(|&k| coeff_count(k) >= coeffs.len())
            .expect("finite");
        assert_eq!(
            coeff_count(order),
            coeffs.len(),
            "coefficient count must be triangular"
        );
        Jet { order, coeffs }
    }

    /// Builds a jet from a closure returning `∂^{i+j}/∂u^i∂v^j`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut coeffs = Vec::with_capacity(coeff_count(order));
        for d in 0..=order {
            for j in 0..=d {
                coeffs.push(f(d - j, j));
            }
        }
        Jet { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Value at the base point.
    pub fn value(&self) -> S {
        self.coeffs[0]
    }

    /// `∂^{i+k} / ∂u^i ∂v^k` at the base point.
    pub fn extract(&self, i: usize, k: usize) -> Result<S, JetError> {
        if i + k > self.order {
            return Err(JetError::IndexBeyondOrder {
                i,
                k,
                order: self.order,
            });
        }
        Ok(self.coeffs[slot(i, k)])
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet {
            order,
            coeffs: self.coeffs[..coeff_count(order)].to_vec(),
        }
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn scale(&self, k: S) -> Self {
        self.map(|c| c * k)
    }

    pub fn scale_real(&self, k: S::Real) -> Self {
        self.scale(S::from_real(k))
    }

    pub fn conj(&self) -> Self {
        self.map(Scalar::conj)
    }

    pub fn to_complex(&self) -> Jet<Complex<S::Real>> {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.to_complex()).collect(),
        }
    }

    pub fn re(&self) -> Jet<S::Real> {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.re()).collect(),
        }
    }

    pub fn im(&self) -> Jet<S::Real> {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.im()).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> S::Real {
        self.coeffs
            .iter()
            .fold(S::Real::zero(), |m, c| m.max(c.modulus()))
    }

    /// Partial derivative in `u` or `v`; the result has one order less.
    pub fn partial(&self, which: Variable) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderTooLow(0));
        }
        Ok(Self::from_fn(self.order - 1, |i, j| match which {
            Variable::U => self.coeffs[slot(i + 1, j)],
            Variable::V => self.coeffs[slot(i, j + 1)],
        }))
    }

    /// `∂_u`; panics on an order-0 jet.
    pub fn du(&self) -> Self {
        self.partial(Variable::U).expect("jet order ≥ 1")
    }

    /// `∂_v`; panics on an order-0 jet.
    pub fn dv(&self) -> Self {
        self.partial(Variable::V).expect("jet order ≥ 1")
    }

    /// Flat Laplacian `∂_uu + ∂_vv = 4∂_z∂_z̄`; two orders are consumed.
    pub fn laplacian(&self) -> Self {
        assert!(self.order >= 2, "laplacian needs a jet of order ≥ 2");
        Self::from_fn(self.order - 2, |i, j| {
            self.coeffs[slot(i + 2, j)] + self.coeffs[slot(i, j + 2)]
        })
    }

    /// Applies `∂_z` or `∂_z̄`; the result is complex and one order lower.
    pub fn wirtinger(&self, which: Wirtinger) -> Result<Jet<Complex<S::Real>>, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderTooLow(0));
        }
        let half = <S::Real as Real>::lit(0.5);
        let i_unit = match which {
            Wirtinger::Z => Complex::new(S::Real::zero(), -half),
            Wirtinger::ZBar => Complex::new(S::Real::zero(), half),
        };
        let h = Complex::new(half, S::Real::zero());
        Ok(Jet::from_fn(self.order - 1, |i, j| {
            h * self.coeffs[slot(i + 1, j)].to_complex() + i_unit * self.coeffs[slot(i, j + 1)].to_complex()
        }))
    }

    /// `∂_z`; panics on an order-0 jet.
    pub fn dz(&self) -> Jet<Complex<S::Real>> {
        self.wirtinger(Wirtinger::Z).expect("jet order ≥ 1")
    }

    /// `∂_z̄`; panics on an order-0 jet.
    pub fn dzbar(&self) -> Jet<Complex<S::Real>> {
        self.wirtinger(Wirtinger::ZBar).expect("jet order ≥ 1")
    }

    fn to_taylor(&self) -> Vec<S> {
        let mut t = self.coeffs.clone();
        for d in 0..=self.order {
            for j in 0..=d {
                let f = factorial::<S::Real>(d - j) * factorial::<S::Real>(j);
                t[slot(d - j, j)] = t[slot(d - j, j)] / S::from_real(f);
            }
        }
        t
    }

    fn from_taylor(order: usize, mut t: Vec<S>) -> Self {
        for d in 0..=order {
            for j in 0..=d {
                let f = factorial::<S::Real>(d - j) * factorial::<S::Real>(j);
                t[slot(d - j, j)] = t[slot(d - j, j)] * S::from_real(f);
            }
        }
        Jet { order, coeffs: t }
    }

    /// Truncated product of two monomial-coefficient arrays of equal order.
    fn taylor_mul(order: usize, a: &[S], b: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); coeff_count(order)];
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let mut acc = S::zero();
                for q in 0..=j {
                    for p in 0..=i {
                        let x = a[slot(p, q)];
                        if x != S::zero() {
                            acc = acc + x * b[slot(i - p, j - q)];
                        }
                    }
                }
                out[slot(i, j)] = acc;
            }
        }
        out
    }

    /// Composes a univariate function with this jet given `f^{(k)}` at the
    /// constant term, `k = 0..=order`.
    pub fn compose(&self, derivs: &[S]) -> Self {
        let order = self.order;
        assert!(derivs.len() > order, "need derivatives up to the jet order");
        let mut h = self.to_taylor();
        h[0] = S::zero();
        let mut acc = vec![S::zero(); coeff_count(order)];
        acc[0] = derivs[order] / S::from_real(factorial::<S::Real>(order));
        for k in (0..order).rev() {
            acc = Self::taylor_mul(order, &acc, &h);
            acc[0] = acc[0] + derivs[k] / S::from_real(factorial::<S::Real>(k));
        }
        Self::from_taylor(order, acc)
    }

    /// Applies an elementary function, checking its domain at the constant term.
    pub fn apply(&self, f: ElemFn) -> Result<Self, JetError> {
        let x = self.value();
        f.check_domain(x)?;
        Ok(self.compose(&f.derivatives(x, self.order)))
    }

    pub fn try_recip(&self) -> Result<Self, JetError> {
        let x = self.value();
        if x.modulus() == S::Real::zero() || !x.finite() {
            return Err(JetError::DivisionByZero);
        }
        Ok(self.recip())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, JetError> {
        Ok(self * &rhs.try_recip()?)
    }

    /// `1/self` without checking the constant term.
    pub fn recip(&self) -> Self {
        let x = self.value();
        let inv = S::one() / x;
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut p = inv;
        for k in 0..=self.order {
            derivs.push(p);
            p = -p * inv * S::from_real(<S::Real as Real>::lit((k + 1) as f64));
        }
        self.compose(&derivs)
    }

    /// Integer power; non-negative exponents never divide, so a zero base is fine.
    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut result = Jet::constant(S::one(), self.order);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn try_powi(&self, n: i32) -> Result<Self, JetError> {
        if n < 0 {
            self.try_recip()?;
        }
        Ok(self.powi(n))
    }

    // Unchecked elementary functions: domain violations surface as NaN/inf.
    pub fn exp(&self) -> Self {
        self.compose(&ElemFn::Exp.derivatives(self.value(), self.order))
    }
    pub fn ln(&self) -> Self {
        self.compose(&ElemFn::Log.derivatives(self.value(), self.order))
    }
    pub fn sqrt(&self) -> Self {
        self.compose(&ElemFn::Sqrt.derivatives(self.value(), self.order))
    }
    pub fn sin(&self) -> Self {
        self.compose(&ElemFn::Sin.derivatives(self.value(), self.order))
    }
    pub fn cos(&self) -> Self {
        self.compose(&ElemFn::Cos.derivatives(self.value(), self.order))
    }
    pub fn sinh(&self) -> Self {
        self.compose(&ElemFn::Sinh.derivatives(self.value(), self.order))
    }
    pub fn cosh(&self) -> Self {
        self.compose(&ElemFn::Cosh.derivatives(self.value(), self.order))
    }
}

fn zip_with<S: Scalar>(a: &Jet<S>, b: &Jet<S>, f: impl Fn(S, S) -> S) -> Jet<S> {
    let order = a.order.min(b.order);
    let n = coeff_count(order);
    Jet {
        order,
        coeffs: a.coeffs[..n]
            .iter()
            .zip(&b.coeffs[..n])
            .map(|(&x, &y)| f(x, y))
            .collect(),
    }
}

impl<S: Scalar> Add<&Jet<S>> for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &Jet<S>) -> Jet<S> {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl<S: Scalar> Sub<&Jet<S>> for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl<S: Scalar> Mul<&Jet<S>> for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        let order = self.order.min(rhs.order);
        let a = self.truncate(order).to_taylor();
        let b = rhs.truncate(order).to_taylor();
        Jet::from_taylor(order, Jet::taylor_mul(order, &a, &b))
    }
}

impl<S: Scalar> Div<&Jet<S>> for &Jet<S> {
    type Output = Jet<S>;
    /// Unchecked; see [`Jet::checked_div`].
    fn div(self, rhs: &Jet<S>) -> Jet<S> {
        self * &rhs.recip()
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.map(|c| -c)
    }
}

macro_rules! owned_binops {
    ($($tr:ident $m:ident),*) => {$(
        impl<S: Scalar> $tr<Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> { (&self).$m(&rhs) }
        }
        impl<S: Scalar> $tr<&Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: &Jet<S>) -> Jet<S> { (&self).$m(rhs) }
        }
        impl<S: Scalar> $tr<Jet<S>> for &Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> { self.$m(&rhs) }
        }
    )*};
}
owned_binops!(Add add, Sub sub, Mul mul, Div div);

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        -&self
    }
}

impl<S: Scalar> AddAssign<&Jet<S>> for Jet<S> {
    fn add_assign(&mut self, rhs: &Jet<S>) {
        *self = &*self + rhs;
    }
}

impl<S: Scalar> Add<S> for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: S) -> Jet<S> {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + rhs;
        out
    }
}

impl<S: Scalar> Add<S> for Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: S) -> Jet<S> {
        &self + rhs
    }
}

impl<S: Scalar> Sub<S> for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: S) -> Jet<S> {
        self + (-rhs)
    }
}

impl<S: Scalar> Sub<S> for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: S) -> Jet<S> {
        &self + (-rhs)
    }
}

impl<S: Scalar> Mul<S> for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: S) -> Jet<S> {
        self.scale(rhs)
    }
}

impl<S: Scalar> Mul<S> for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: S) -> Jet<S> {
        self.scale(rhs)
    }
}

/// A vector of jets sharing one base point: an ambient vector field near it.
pub type JetVector<S> = SpaceVector<Jet<S>>;

impl<S: Scalar> SpaceVector<Jet<S>> {
    /// Constant terms.
    pub fn lead(&self) -> SpaceVector<S> {
        SpaceVector::new(self.iter().map(Jet::value).collect())
    }

    pub fn order(&self) -> usize {
        self.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    pub fn du(&self) -> Self {
        self.map(Jet::du)
    }

    pub fn dv(&self) -> Self {
        self.map(Jet::dv)
    }

    pub fn laplacian(&self) -> Self {
        self.map(Jet::laplacian)
    }

    pub fn dz(&self) -> JetVector<Complex<S::Real>> {
        SpaceVector::new(self.iter().map(Jet::dz).collect())
    }

    pub fn dzbar(&self) -> JetVector<Complex<S::Real>> {
        SpaceVector::new(self.iter().map(Jet::dzbar).collect())
    }

    pub fn conj(&self) -> Self {
        self.map(Jet::conj)
    }

    pub fn to_complex(&self) -> JetVector<Complex<S::Real>> {
        SpaceVector::new(self.iter().map(Jet::to_complex).collect())
    }

    /// Componentwise product with a scalar jet field.
    pub fn scale_by(&self, f: &Jet<S>) -> Self {
        self.map(|c| c * f)
    }

    pub fn scale_const(&self, k: S) -> Self {
        self.map(|c| c.scale(k))
    }

    /// Largest modulus among the constant terms.
    pub fn lead_max_abs(&self) -> S::Real {
        self.iter()
            .fold(S::Real::zero(), |m, c| m.max(c.value().modulus()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::close;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol * (1.0 + b.abs())
        }
    }

    fn u(base: f64, order: usize) -> Jet<f64> {
        Jet::variable(Variable::U, base, order)
    }
    fn v(base: f64, order: usize) -> Jet<f64> {
        Jet::variable(Variable::V, base, order)
    }

    #[test]
    fn variable_layout() {
        let j = u(0.0, 3);
        assert_eq!(j.coeffs().len(), 10);
        assert_eq!(j.extract(0, 0).unwrap(), 0.0);
        assert_eq!(j.extract(1, 0).unwrap(), 1.0);
        assert!(j.coeffs().iter().skip(2).all(|&c| c == 0.0));

        let j = v(2.0, 2);
        assert_eq!(j.extract(0, 0).unwrap(), 2.0);
        assert_eq!(j.extract(0, 1).unwrap(), 1.0);
        assert_eq!(j.extract(1, 0).unwrap(), 0.0);
        assert_eq!(j.coeffs().iter().filter(|&&c| c != 0.0).count(), 2);

        let j = u(1.0, 0);
        assert_eq!(j.coeffs(), &[1.0]);
    }

    #[test]
    fn sinh_of_u() {
        let s = u(0.0, 3).sinh();
        let d: Vec<f64> = (0..=3).map(|k| s.extract(k, 0).unwrap()).collect();
        assert_eq!(d, vec![0.0, 1.0, 0.0, 1.0]);
        assert_eq!(s.extract(3, 0).unwrap(), 1.0);
    }

    #[test]
    fn reciprocal_identity() {
        let a = (&u(0.3, 6) * &v(-0.7, 6)).exp() + 2.0;
        let one = &a * &(Jet::constant(1.0, 6) / &a);
        assert!(close(one.value(), 1.0, 1e-14));
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn sqrt_binomial() {
        let f = u(0.0, 2) + 1.0;
        let s = f.apply(ElemFn::Sqrt).unwrap();
        assert_eq!(s.extract(0, 0).unwrap(), 1.0);
        assert_eq!(s.extract(1, 0).unwrap(), 0.5);
        assert_eq!(s.extract(2, 0).unwrap(), -0.25);
    }

    #[test]
    fn extract_examples() {
        assert_eq!(Jet::constant(5.0, 4).extract(0, 0).unwrap(), 5.0);
        let uv = &u(0.0, 3) * &v(0.0, 3);
        assert_eq!(uv.extract(1, 1).unwrap(), 1.0);
        assert_eq!(
            uv.extract(3, 1),
            Err(JetError::IndexBeyondOrder { i: 3, k: 1, order: 3 })
        );
    }

    #[test]
    fn wirtinger_examples() {
        let dz_u = u(0.0, 2).dz();
        assert_eq!(dz_u.value(), Complex::new(0.5, 0.0));
        let dz_v = v(0.0, 2).dz();
        assert_eq!(dz_v.value(), Complex::new(0.0, -0.5));

        let r2 = u(0.4, 3).powi(2) + v(-1.1, 3).powi(2);
        let lap = r2.dz().wirtinger(Wirtinger::ZBar).unwrap().scale_real(4.0);
        assert!((lap.value() - Complex::new(4.0, 0.0)).norm() < 1e-14);
        assert_eq!(
            Jet::constant(1.0, 0).wirtinger(Wirtinger::Z),
            Err(JetError::OrderTooLow(0))
        );
    }

    #[test]
    fn laplacian_matches_wirtinger() {
        let f = (&u(0.2, 5) * &v(0.1, 5)).sin() + u(0.2, 5).exp();
        let a = f.laplacian().to_complex();
        let b = f.dz().dzbar().scale_real(4.0);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn domain_and_division_errors() {
        let x = u(0.0, 2) - 1.0;
        assert!(matches!(x.apply(ElemFn::Sqrt), Err(JetError::Domain { func: "sqrt", .. })));
        assert!(matches!(x.apply(ElemFn::Log), Err(JetError::Domain { func: "log", .. })));
        assert_eq!(u(0.0, 2).try_recip(), Err(JetError::DivisionByZero));
        assert!(Jet::constant(1.0, 2).checked_div(&u(0.0, 2)).is_err());
    }

    #[test]
    fn mixed_order_truncates() {
        let a = u(1.0, 5);
        let b = v(1.0, 3);
        assert_eq!((&a * &b).order(), 3);
        assert_eq!((&a + &b).order(), 3);
    }

    #[test]
    fn powi_zero_base_and_negative() {
        let p = u(0.0, 4).powi(3);
        assert_eq!(p.extract(3, 0).unwrap(), 6.0);
        assert_eq!(p.value(), 0.0);
        let q = (u(0.0, 3) + 2.0).powi(-1);
        assert!(close(q.extract(1, 0).unwrap(), -0.25, 1e-15));
    }

    #[test]
    fn complex_jet_conjugation_swaps_wirtinger() {
        let f = (&u(0.3, 4) * &v(0.5, 4)).cosh() + v(0.5, 4).sin();
        let a = f.dz().conj();
        let b = f.dzbar();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
        let zz = f.dz().dzbar();
        let zz2 = f.dzbar().dz();
        for (x, y) in zz.coeffs().iter().zip(zz2.coeffs()) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
