//! Pseudo-Euclidean linear algebra over a generic scalar ring.
//!
//! Everything here is written once against [`Ring`], which is implemented for
//! plain reals, complex numbers and jets. A Gram–Schmidt run over jets yields
//! a frame *field* whose derivatives are available, which is how the normal
//! frame of a surface is differentiated without a second code path.

use std::fmt::Debug;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet;
use crate::scalar::{Real, Scalar};

/// Default relative tolerance for frame construction and rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate span: no candidate has a projected norm above tolerance")]
    DegenerateSpan,
    #[error("empty input")]
    Empty,
}

/// Sign pattern of a pseudo-Euclidean inner product: the first `plus` slots
/// are positive, the last `minus` slots negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
}

impl Signature {
    pub const fn new(plus: usize, minus: usize) -> Self {
        Signature { plus, minus }
    }

    pub const fn dim(&self) -> usize {
        self.plus + self.minus
    }

    /// `+1` or `-1` for slot `i`.
    pub const fn sign(&self, i: usize) -> i8 {
        if i < self.plus {
            1
        } else {
            -1
        }
    }

    fn check(&self, len: usize) -> Result<(), AlgebraError> {
        if len != self.dim() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// `Σ_{i<p} u_i v_i − Σ_{i≥p} u_i v_i`. Bilinear even over complex scalars.
    pub fn inner<R: Ring>(&self, u: &SpaceVector<R>, v: &SpaceVector<R>) -> Result<R, AlgebraError> {
        self.check(u.len())?;
        self.check(v.len())?;
        let mut pos = u[0].zero_like();
        let mut neg = u[0].zero_like();
        for (i, (a, b)) in u.iter().zip(v.iter()).enumerate() {
            if i < self.plus {
                pos = pos + a.clone() * b.clone();
            } else {
                neg = neg + a.clone() * b.clone();
            }
        }
        Ok(pos - neg)
    }

    /// `⟨u, u⟩`.
    pub fn norm_sq<R: Ring>(&self, u: &SpaceVector<R>) -> Result<R, AlgebraError> {
        self.inner(u, u)
    }

    /// Diagonal metric as a dense matrix.
    pub fn metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                self.sign(i) as f64
            } else {
                0.0
            }
        })
    }
}

/// Free-function form of [`Signature::inner`].
pub fn inner<R: Ring>(u: &SpaceVector<R>, v: &SpaceVector<R>, s: Signature) -> Result<R, AlgebraError> {
    s.inner(u, v)
}

/// Scalar ring the algebra runs over: `+ − × ÷ √` and a view of the constant
/// term, which drives pivoting and tolerance decisions.
pub trait Ring:
    Clone + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    type Real: Real;

    fn zero_like(&self) -> Self;
    fn real_like(&self, r: Self::Real) -> Self;
    /// Real part of the constant term.
    fn lead_re(&self) -> Self::Real;
    /// Modulus of the constant term.
    fn lead_abs(&self) -> Self::Real;
    fn ring_sqrt(&self) -> Self;
    fn ring_div(&self, rhs: &Self) -> Self;
}

impl<S: Scalar> Ring for S {
    type Real = S::Real;
    fn zero_like(&self) -> Self {
        S::zero()
    }
    fn real_like(&self, r: S::Real) -> Self {
        S::from_real(r)
    }
    fn lead_re(&self) -> S::Real {
        self.re()
    }
    fn lead_abs(&self) -> S::Real {
        self.modulus()
    }
    fn ring_sqrt(&self) -> Self {
        self.apply_fn(crate::scalar::ElemFn::Sqrt)
    }
    fn ring_div(&self, rhs: &Self) -> Self {
        *self / *rhs
    }
}

impl<S: Scalar> Ring for Jet<S> {
    type Real = S::Real;
    fn zero_like(&self) -> Self {
        Jet::zero(self.order())
    }
    fn real_like(&self, r: S::Real) -> Self {
        Jet::constant(S::from_real(r), self.order())
    }
    fn lead_re(&self) -> S::Real {
        self.value().re()
    }
    fn lead_abs(&self) -> S::Real {
        self.value().modulus()
    }
    fn ring_sqrt(&self) -> Self {
        self.sqrt()
    }
    fn ring_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// Ambient vector with components in a scalar ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpaceVector<R> {
    components: Vec<R>,
}

impl<R> SpaceVector<R> {
    pub fn new(components: Vec<R>) -> Self {
        SpaceVector { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, R> {
        self.components.iter()
    }

    pub fn components(&self) -> &[R] {
        &self.components
    }

    pub fn into_components(self) -> Vec<R> {
        self.components
    }

    pub fn map<Q>(&self, f: impl FnMut(&R) -> Q) -> SpaceVector<Q> {
        SpaceVector::new(self.components.iter().map(f).collect())
    }
}

impl<R> Index<usize> for SpaceVector<R> {
    type Output = R;
    fn index(&self, i: usize) -> &R {
        &self.components[i]
    }
}

impl<R> FromIterator<R> for SpaceVector<R> {
    fn from_iter<I: IntoIterator<Item = R>>(iter: I) -> Self {
        SpaceVector::new(iter.into_iter().collect())
    }
}

impl<R: Ring> SpaceVector<R> {
    pub fn add(&self, other: &Self) -> Self {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.clone() + b.clone())
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.clone() - b.clone())
            .collect()
    }

    pub fn scale(&self, k: &R) -> Self {
        self.map(|a| a.clone() * k.clone())
    }

    pub fn scale_real(&self, k: R::Real) -> Self {
        self.map(|a| a.clone() * a.real_like(k))
    }

    /// `self + k·other`.
    pub fn axpy(&self, k: &R, other: &Self) -> Self {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.clone() + k.clone() * b.clone())
            .collect()
    }

    /// Euclidean length of the constant terms.
    pub fn lead_euclid(&self) -> R::Real {
        self.components
            .iter()
            .fold(R::Real::zero(), |acc, c| acc + c.lead_abs() * c.lead_abs())
            .sqrt()
    }
}

impl<T: Real> SpaceVector<T> {
    pub fn basis(dim: usize, k: usize) -> Self {
        (0..dim)
            .map(|i| if i == k { T::one() } else { T::zero() })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.as_f64()).collect()
    }
}

/// A member of an orthonormal frame with its sign `⟨E, E⟩ = ±1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameVector<R> {
    pub vector: SpaceVector<R>,
    pub sign: i8,
}

impl<R: Ring> FrameVector<R> {
    /// `|⟨E, E⟩ − sign|` at the constant term.
    pub fn defect(&self, s: Signature) -> Result<R::Real, AlgebraError> {
        let n = s.norm_sq(&self.vector)?;
        Ok((n.lead_re() - R::Real::lit(self.sign as f64)).abs())
    }
}

/// Orthonormalizes `candidates` in the given signature.
///
/// At every step the remaining candidate whose projected self-inner-product
/// has the largest constant-term modulus becomes the next pivot, so null
/// candidates are deferred rather than normalized. If every remaining
/// candidate is (numerically) null while some are still nonzero, pairwise
/// sums are tried, since a non-degenerate span always has a non-null
/// combination. Projections below `tol` (relative to the largest candidate)
/// count as exhausted.
pub fn gram_schmidt_indefinite<R: Ring>(
    candidates: &[SpaceVector<R>],
    s: Signature,
    tol: R::Real,
) -> Result<Vec<FrameVector<R>>, AlgebraError> {
    if candidates.is_empty() {
        return Err(AlgebraError::Empty);
    }
    for c in candidates {
        s.check(c.len())?;
    }
    let scale = candidates
        .iter()
        .map(SpaceVector::lead_euclid)
        .fold(R::Real::zero(), R::Real::max);
    if scale == R::Real::zero() {
        return Err(AlgebraError::DegenerateSpan);
    }
    let vec_tol = tol * scale;
    let norm_tol = tol * scale * scale;

    let mut remaining: Vec<SpaceVector<R>> = candidates.to_vec();
    let mut frame = Vec::new();
    while frame.len() < s.dim() {
        remaining.retain(|w| w.lead_euclid() > vec_tol);
        if remaining.is_empty() {
            break;
        }
        let norms: Vec<R> = remaining
            .iter()
            .map(|w| s.norm_sq(w))
            .collect::<Result<_, _>>()?;
        let (best, best_abs) = norms
            .iter()
            .enumerate()
            .map(|(k, n)| (k, n.lead_abs()))
            .fold((0, R::Real::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });

        let (pivot, norm, consumed) = if best_abs > norm_tol {
            (remaining[best].clone(), norms[best].clone(), best)
        } else {
            null_pair_pivot(&remaining, s, norm_tol)?.ok_or(AlgebraError::DegenerateSpan)?
        };

        let sign: i8 = if norm.lead_re() > R::Real::zero() { 1 } else { -1 };
        let signed = norm.clone() * norm.real_like(R::Real::lit(sign as f64));
        let len = signed.ring_sqrt();
        let e: SpaceVector<R> = pivot.map(|c| c.ring_div(&len));
        remaining.remove(consumed);
        let sign_r = e[0].real_like(R::Real::lit(sign as f64));
        for w in remaining.iter_mut() {
            let coeff = s.inner(w, &e)? * sign_r.clone();
            *w = w.axpy(&(-coeff), &e);
        }
        frame.push(FrameVector { vector: e, sign });
    }
    if frame.is_empty() {
        return Err(AlgebraError::DegenerateSpan);
    }
    Ok(frame)
}

type Pivot<R> = (SpaceVector<R>, R, usize);

fn null_pair_pivot<R: Ring>(
    remaining: &[SpaceVector<R>],
    s: Signature,
    norm_tol: R::Real,
) -> Result<Option<Pivot<R>>, AlgebraError> {
    let mut best: Option<(Pivot<R>, R::Real)> = None;
    for a in 0..remaining.len() {
        for b in (a + 1)..remaining.len() {
            for flip in [false, true] {
                let w = if flip {
                    remaining[a].sub(&remaining[b])
                } else {
                    remaining[a].add(&remaining[b])
                };
                let n = s.norm_sq(&w)?;
                let m = n.lead_abs();
                if m > norm_tol && best.as_ref().is_none_or(|(_, bm)| m > *bm) {
                    best = Some(((w, n, a), m));
                }
            }
        }
    }
    Ok(best.map(|(p, _)| p))
}

/// Numerical rank of the matrix whose rows are `vectors`: singular values
/// below `tol · σ_max` count as zero.
pub fn rank_of_span<T: Real>(vectors: &[SpaceVector<T>], tol: f64) -> Result<usize, AlgebraError> {
    let first = vectors.first().ok_or(AlgebraError::Empty)?;
    let cols = first.len();
    for v in vectors {
        if v.len() != cols {
            return Err(AlgebraError::DimensionMismatch {
                expected: cols,
                got: v.len(),
            });
        }
    }
    let m = DMatrix::from_fn(vectors.len(), cols, |i, j| vectors[i][j].as_f64());
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&x| x > tol * smax).count())
}

/// Inertia `(positive, negative)` of a small symmetric matrix; eigenvalues
/// within `tol · max|λ|` of zero are ignored.
pub fn inertia(gram: &DMatrix<f64>, tol: f64) -> (usize, usize) {
    let eig = nalgebra::SymmetricEigen::new(gram.clone()).eigenvalues;
    let emax = eig.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let pos = eig.iter().filter(|&&x| x > tol * emax).count();
    let neg = eig.iter().filter(|&&x| x < -tol * emax).count();
    (pos, neg)
}

/// Gram matrix `⟨a_i, a_j⟩` of real vectors.
pub fn gram_matrix<T: Real>(vectors: &[SpaceVector<T>], s: Signature) -> Result<DMatrix<f64>, AlgebraError> {
    let n = vectors.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = s.inner(&vectors[i], &vectors[j])?.as_f64();
        }
    }
    Ok(g)
}

impl<T: Real> Mul<T> for &SpaceVector<T> {
    type Output = SpaceVector<T>;
    fn mul(self, k: T) -> SpaceVector<T> {
        self.map(|&a| a * k)
    }
}
