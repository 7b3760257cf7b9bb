//! Light-cone lift, conformal factor and the moving frame `{Y, N, Y_z, Y_z̄, E_α}`.
//!
//! Jet orders shrink as the pipeline differentiates. Starting from a lift of
//! order `K`: `λ` has `K−1`, `Δy` has `K−2`, `κ`, `ρ²`, `ω` and `Y` have
//! `K−3`, and `ΔY`, `N`, `K` and the normal frame have `K−5`. The invariants
//! lose one more order and the fundamental equations differentiate them once
//! again, so `K ≥ 7` is the least order that leaves every residual a value.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{gram_schmidt_indefinite, AlgebraError, FrameVector, Signature, SpaceVector};
use crate::dsl::{eval_jet_at, ChartSpec, SpaceTag};
use crate::jet::{Jet, JetError, JetVector, Variable};
use crate::scalar::Real;

/// Least lift order for which every residual is defined.
pub const MIN_ORDER: usize = 7;

/// Default jet order.
pub const DEFAULT_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("expression evaluation failed: {0}")]
    Eval(#[from] JetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("not space-like: h11 = {h11:.3e}, h22 = {h22:.3e}, h12 = {h12:.3e}")]
    NotSpaceLike { h11: f64, h22: f64, h12: f64 },
    #[error("not isothermal: relative residual {residual:.3e} exceeds tolerance")]
    NotIsothermal { residual: f64 },
    #[error("conformally degenerate: e^(2w) = {e2omega:.3e}")]
    ConformallyDegenerate { e2omega: f64 },
    #[error("jet order {got} too low, {needed} required")]
    OrderTooLow { needed: usize, got: usize },
    #[error("normal frame has signs {signs:?}, expected {expected} vectors with exactly one negative")]
    NormalSignature { signs: Vec<i8>, expected: usize },
    #[error("frame identity {name} violated by {defect:.3e}")]
    FrameIdentity { name: &'static str, defect: f64 },
    #[error("gauge change does not preserve the normal metric (defect {defect:.3e})")]
    BadGauge { defect: f64 },
}

impl PipelineError {
    /// Whether this is a failure of the surface itself rather than of the input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            PipelineError::ConformallyDegenerate { .. } | PipelineError::NormalSignature { .. } | PipelineError::Algebra(_)
        )
    }
}

/// Ambient space form and its signatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFormModel {
    pub tag: SpaceTag,
    pub n: usize,
}

impl SpaceFormModel {
    pub fn new(tag: SpaceTag, n: usize) -> Self {
        SpaceFormModel { tag, n }
    }

    pub fn of(chart: &ChartSpec) -> Self {
        SpaceFormModel::new(chart.space, chart.n)
    }

    /// Signature of the model's own coordinates.
    pub fn model_signature(&self) -> Signature {
        match self.tag {
            SpaceTag::R => Signature::new(self.n - 1, 1),
            SpaceTag::S => Signature::new(self.n, 1),
            SpaceTag::H => Signature::new(self.n - 1, 2),
        }
    }

    /// Signature `(n, 2)` of the light-cone space.
    pub fn lift_signature(&self) -> Signature {
        Signature::new(self.n, 2)
    }
}

/// Lifts model coordinates to the light cone of `R^{n+2}_2`.
pub fn lift_coordinates<T: Real>(model: SpaceFormModel, x: Vec<Jet<T>>) -> Result<JetVector<T>, PipelineError> {
    let order = x.iter().map(Jet::order).min().unwrap_or(0);
    let one = Jet::constant(T::one(), order);
    let mut y = Vec::with_capacity(model.n + 2);
    match model.tag {
        SpaceTag::R => {
            let xv = SpaceVector::new(x);
            let q = model.model_signature().inner(&xv, &xv)?;
            let half = T::lit(0.5);
            y.push((&one - &q) * half);
            y.extend(xv.into_components());
            y.push((&one + &q) * half);
        }
        SpaceTag::S => {
            y.extend(x);
            y.push(one);
        }
        SpaceTag::H => {
            y.push(one);
            y.extend(x);
        }
    }
    Ok(SpaceVector::new(y))
}

/// Jet of the light-cone lift of `chart` at `base`.
pub fn lift_to_lightcone<T: Real>(chart: &ChartSpec, base: (T, T), order: usize) -> Result<JetVector<T>, PipelineError> {
    let u = Jet::variable(Variable::U, base.0, order);
    let v = Jet::variable(Variable::V, base.1, order);
    let x = chart
        .coords
        .iter()
        .map(|e| eval_jet_at(e, &u, &v))
        .collect::<Result<Vec<_>, _>>()?;
    lift_coordinates(SpaceFormModel::of(chart), x)
}

/// Induced metric of a lift.
#[derive(Debug, Clone)]
pub struct ChartCheck<T: Real> {
    pub h11: Jet<T>,
    pub h22: Jet<T>,
    pub h12: Jet<T>,
    /// `max(|h12|, |h11 − h22|) / h11` at the base point.
    pub isothermal_residual: f64,
}

impl<T: Real> ChartCheck<T> {
    /// `e^{2λ} = h11`.
    pub fn e2lambda(&self) -> &Jet<T> {
        &self.h11
    }
}

/// Requires a positive definite, isothermal induced metric `⟨dy, dy⟩`.
pub fn check_lift<T: Real>(y: &JetVector<T>, s: Signature, tol: f64) -> Result<ChartCheck<T>, PipelineError> {
    if y.order() < 1 {
        return Err(PipelineError::OrderTooLow { needed: 1, got: 0 });
    }
    let yu = y.du();
    let yv = y.dv();
    let h11 = s.inner(&yu, &yu)?;
    let h22 = s.inner(&yv, &yv)?;
    let h12 = s.inner(&yu, &yv)?;
    let (a, b, c) = (h11.value().as_f64(), h22.value().as_f64(), h12.value().as_f64());
    if !(a > 0.0 && b > 0.0 && a * b - c * c > 0.0) {
        return Err(PipelineError::NotSpaceLike { h11: a, h22: b, h12: c });
    }
    let residual = c.abs().max((a - b).abs()) / a;
    if residual.is_nan() || residual > tol {
        return Err(PipelineError::NotIsothermal { residual });
    }
    Ok(ChartCheck {
        h11,
        h22,
        h12,
        isothermal_residual: residual,
    })
}

/// `Δy = e^{−2λ}(y_uu + y_vv)` and `κ = −e^{−2λ}(λ_uu + λ_vv)`, with `λ = ½ log h11`.
pub fn laplacian_and_curvature<T: Real>(y: &JetVector<T>, e2lambda: &Jet<T>) -> Result<(JetVector<T>, Jet<T>, Jet<T>), PipelineError> {
    if y.order() < 3 {
        return Err(PipelineError::OrderTooLow {
            needed: 3,
            got: y.order(),
        });
    }
    let lambda = e2lambda.apply(crate::jet::ElemFn::Log)? * T::lit(0.5);
    let inv = e2lambda.try_recip()?;
    let delta_y = y.laplacian().scale_by(&inv);
    let kappa = -(lambda.laplacian() * inv);
    Ok((delta_y, kappa, lambda))
}

/// `ρ² = −(⟨Δy, Δy⟩ − 4κ)` and `ω = λ + ½ log ρ²`.
///
/// Degeneracy is judged on `e^{2ω} = ρ² h11`, which does not depend on the
/// scale of the lift.
pub fn conformal_factor<T: Real>(
    delta_y: &JetVector<T>,
    kappa: &Jet<T>,
    lambda: &Jet<T>,
    e2lambda: &Jet<T>,
    s: Signature,
) -> Result<(Jet<T>, Jet<T>), PipelineError> {
    let rho2 = -(s.inner(delta_y, delta_y)? - kappa * T::lit(4.0));
    let e2omega = (rho2.value() * e2lambda.value()).as_f64();
    if e2omega.is_nan() || e2omega <= 1e-12 {
        return Err(PipelineError::ConformallyDegenerate { e2omega });
    }
    let omega = lambda + &(rho2.apply(crate::jet::ElemFn::Log)? * T::lit(0.5));
    Ok((rho2, omega))
}

/// The canonical moving frame at one point.
#[derive(Debug, Clone)]
pub struct ConformalFrame<T: Real> {
    pub model: SpaceFormModel,
    pub signature: Signature,
    pub lambda: Jet<T>,
    pub rho2: Jet<T>,
    pub omega: Jet<T>,
    pub e2omega: Jet<T>,
    /// Gauss curvature `K` of `g = e^{2ω}|dz|²`.
    pub curvature: Jet<T>,
    /// Canonical lift `Y`.
    pub y: JetVector<T>,
    pub delta_y: JetVector<T>,
    /// Conformal Gauss map `N`.
    pub n: JetVector<T>,
    pub normals: Vec<FrameVector<Jet<T>>>,
}

/// Frame identity defects at the base point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FrameDefects {
    pub yy: f64,
    pub nn: f64,
    pub yn: f64,
    pub yz_yz: f64,
    pub yz_yzbar: f64,
    pub normal_orthogonality: f64,
    pub normal_metric: f64,
}

impl FrameDefects {
    pub fn worst(&self) -> (&'static str, f64) {
        [
            ("<Y,Y> = 0", self.yy),
            ("<N,N> = 0", self.nn),
            ("<Y,N> = 1", self.yn),
            ("<Y_z,Y_z> = 0", self.yz_yz),
            ("2<Y_z,Y_zbar> = e^(2w)", self.yz_yzbar),
            ("E orthogonal to Y, N, Y_z", self.normal_orthogonality),
            ("<E_a,E_b> = diag(+-1)", self.normal_metric),
        ]
        .into_iter()
        .fold(("", 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }
}

/// Runs the whole pipeline on a lift, with one tolerance for both the
/// isothermality check and the frame construction.
pub fn canonical_frame<T: Real>(
    model: SpaceFormModel,
    y0: &JetVector<T>,
    tol: f64,
) -> Result<ConformalFrame<T>, PipelineError> {
    canonical_frame_with(model, y0, tol, tol)
}

pub fn canonical_frame_with<T: Real>(
    model: SpaceFormModel,
    y0: &JetVector<T>,
    isothermal_tol: f64,
    frame_tol: f64,
) -> Result<ConformalFrame<T>, PipelineError> {
    let s = model.lift_signature();
    let check = check_lift(y0, s, isothermal_tol)?;
    frame_from_checked_lift(model, y0, &check, isothermal_tol, frame_tol)
}

pub(crate) fn frame_from_checked_lift<T: Real>(
    model: SpaceFormModel,
    y0: &JetVector<T>,
    check: &ChartCheck<T>,
    isothermal_tol: f64,
    tol: f64,
) -> Result<ConformalFrame<T>, PipelineError> {
    if y0.order() < 5 {
        return Err(PipelineError::OrderTooLow {
            needed: 5,
            got: y0.order(),
        });
    }
    let s = model.lift_signature();
    let e2lambda = check.e2lambda();
    let (delta_y0, kappa, lambda) = laplacian_and_curvature(y0, e2lambda)?;
    let (rho2, omega) = conformal_factor(&delta_y0, &kappa, &lambda, e2lambda, s)?;

    let rho = rho2.sqrt();
    let y = y0.scale_by(&rho);
    let e2omega = &rho2 * e2lambda;
    let em2omega = e2omega.try_recip()?;
    let delta_y = y.laplacian().scale_by(&em2omega);
    let dd = s.inner(&delta_y, &delta_y)?;
    let n = delta_y
        .scale_const(T::lit(-0.5))
        .sub(&y.scale_by(&(dd * T::lit(0.125))));
    let curvature = -(omega.laplacian() * &em2omega);

    let yu = y.du();
    let yv = y.dv();
    let candidates: Vec<JetVector<T>> = (0..s.dim())
        .map(|k| {
            // ⟨e_k, X⟩ = ε_k X_k
            let pick = |x: &JetVector<T>| x[k].scale_real(T::lit(s.sign(k) as f64));
            let order = n.order();
            let e = SpaceVector::new(
                (0..s.dim())
                    .map(|i| Jet::constant(if i == k { T::one() } else { T::zero() }, order))
                    .collect(),
            );
            let tangent = yu.scale_by(&pick(&yu)).add(&yv.scale_by(&pick(&yv)));
            e.sub(&y.scale_by(&pick(&n)))
                .sub(&n.scale_by(&pick(&y)))
                .sub(&tangent.scale_by(&em2omega))
        })
        .collect();
    // the projection above is exact only for isothermal charts; sweep out
    // what leaks through when the chart is isothermal just to tolerance
    let block = gram_schmidt_indefinite(&[y.add(&n), y.sub(&n), yu.clone(), yv.clone()], s, T::lit(tol))?;
    let candidates = candidates
        .into_iter()
        .map(|mut w| {
            for b in &block {
                let c = s.inner(&w, &b.vector)?.scale_real(T::lit(b.sign as f64));
                w = w.sub(&b.vector.scale_by(&c));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let normals = gram_schmidt_indefinite(&candidates, s, T::lit(tol))?;
    let expected = model.n - 2;
    let negatives = normals.iter().filter(|e| e.sign < 0).count();
    if normals.len() != expected || negatives != 1 {
        return Err(PipelineError::NormalSignature {
            signs: normals.iter().map(|e| e.sign).collect(),
            expected,
        });
    }

    let frame = ConformalFrame {
        model,
        signature: s,
        lambda,
        rho2,
        omega,
        e2omega,
        curvature,
        y,
        delta_y,
        n,
        normals,
    };
    let defects = frame.defects()?;
    let (name, defect) = defects.worst();
    // a chart that is isothermal only to tolerance carries that error into the identities
    if defect > 10.0 * tol.max(isothermal_tol) * frame.scale() {
        return Err(PipelineError::FrameIdentity { name, defect });
    }
    Ok(frame)
}

fn lead_abs<T: Real>(j: &Jet<T>) -> f64 {
    j.value().as_f64().abs()
}

impl<T: Real> ConformalFrame<T> {
    pub fn y_z(&self) -> JetVector<Complex<T>> {
        self.y.dz()
    }

    pub fn y_zbar(&self) -> JetVector<Complex<T>> {
        self.y.dzbar()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.normals.iter().map(|e| e.sign).collect()
    }

    /// Magnitude of the frame vectors, used to scale identity tolerances.
    pub fn scale(&self) -> f64 {
        let y = self.y.lead_max_abs().as_f64();
        let n = self.n.lead_max_abs().as_f64();
        1.0_f64.max(y * n).max(self.e2omega.value().as_f64())
    }

    /// Normal metric `g_{αβ} = ⟨E_α, E_β⟩` at the base point.
    pub fn normal_metric(&self) -> Result<DMatrix<f64>, PipelineError> {
        let m = self.normals.len();
        let mut g = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                g[(a, b)] = self
                    .signature
                    .inner(&self.normals[a].vector, &self.normals[b].vector)?
                    .value()
                    .as_f64();
            }
        }
        Ok(g)
    }

    pub fn defects(&self) -> Result<FrameDefects, PipelineError> {
        let s = self.signature;
        let yz = self.y_z();
        let yzb = self.y_zbar();
        let cabs = |z: Complex<T>| z.norm().as_f64();
        let mut d = FrameDefects {
            yy: lead_abs(&s.inner(&self.y, &self.y)?),
            nn: lead_abs(&s.inner(&self.n, &self.n)?),
            yn: (s.inner(&self.y, &self.n)?.value().as_f64() - 1.0).abs(),
            yz_yz: cabs(s.inner(&yz, &yz)?.value()),
            yz_yzbar: cabs(s.inner(&yz, &yzb)?.value() * T::lit(2.0) - Complex::from(self.e2omega.value())),
            ..Default::default()
        };
        for e in &self.normals {
            let ec = e.vector.to_complex();
            d.normal_orthogonality = d
                .normal_orthogonality
                .max(lead_abs(&s.inner(&e.vector, &self.y)?))
                .max(lead_abs(&s.inner(&e.vector, &self.n)?))
                .max(cabs(s.inner(&ec, &yz)?.value()));
        }
        let g = self.normal_metric()?;
        for a in 0..g.nrows() {
            for b in 0..g.ncols() {
                let want = if a == b { self.normals[a].sign as f64 } else { 0.0 };
                d.normal_metric = d.normal_metric.max((g[(a, b)] - want).abs());
            }
        }
        Ok(d)
    }

    /// Replaces `E_α` by `Σ_β M_{αβ} E_β`. `M` may vary over the surface but
    /// must preserve the normal metric.
    pub fn remix(&self, m: &[Vec<Jet<T>>]) -> Result<ConformalFrame<T>, PipelineError> {
        let k = self.normals.len();
        if m.len() != k || m.iter().any(|row| row.len() != k) {
            return Err(AlgebraError::DimensionMismatch {
                expected: k,
                got: m.len(),
            }
            .into());
        }
        let mut normals = Vec::with_capacity(k);
        for row in m {
            let mut acc: Option<JetVector<T>> = None;
            for (c, e) in row.iter().zip(&self.normals) {
                let term = e.vector.scale_by(c);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
            let v = acc.expect("non-empty row");
            let norm = self.signature.norm_sq(&v)?.value().as_f64();
            normals.push(FrameVector {
                vector: v,
                sign: if norm > 0.0 { 1 } else { -1 },
            });
        }
        let mut out = self.clone();
        out.normals = normals;
        if out.signs() != self.signs() {
            return Err(PipelineError::BadGauge { defect: f64::INFINITY });
        }
        let defect = out.defects()?.normal_metric;
        if defect > 1e-8 {
            return Err(PipelineError::BadGauge { defect });
        }
        Ok(out)
    }
}

/// Identity gauge matrix of size `k` at the given jet order.
pub fn gauge_identity<T: Real>(k: usize, order: usize) -> Vec<Vec<Jet<T>>> {
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| Jet::constant(if a == b { T::one() } else { T::zero() }, order))
                .collect()
        })
        .collect()
}

/// Gauge matrix rotating normals `i` and `j` by `theta`: a circular rotation
/// if their signs agree, a boost otherwise.
pub fn gauge_rotation<T: Real>(signs: &[i8], i: usize, j: usize, theta: &Jet<T>) -> Vec<Vec<Jet<T>>> {
    let mut m = gauge_identity(signs.len(), theta.order());
    if signs[i] == signs[j] {
        let (c, s) = (theta.cos(), theta.sin());
        m[i][i] = c.clone();
        m[i][j] = -s.clone();
        m[j][i] = s;
        m[j][j] = c;
    } else {
        let (c, s) = (theta.cosh(), theta.sinh());
        m[i][i] = c.clone();
        m[i][j] = s.clone();
        m[j][i] = s;
        m[j][j] = c;
    }
    m
}

/// Gauge matrix flipping the sign of normal `i`.
pub fn gauge_flip<T: Real>(k: usize, i: usize, order: usize) -> Vec<Vec<Jet<T>>> {
    let mut m = gauge_identity(k, order);
    m[i][i] = -m[i][i].clone();
    m
}

/// Matrix product of two gauge matrices.
pub fn gauge_compose<T: Real>(a: &[Vec<Jet<T>>], b: &[Vec<Jet<T>>]) -> Vec<Vec<Jet<T>>> {
    let k = a.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    (0..k)
                        .map(|l| &a[i][l] * &b[l][j])
                        .reduce(|x, y| x + y)
                        .expect("non-empty gauge")
                })
                .collect()
        })
        .collect()
}

/// A constant element of `O(n, 2)` acting on lifts.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftTransform {
    pub matrix: DMatrix<f64>,
}

impl LiftTransform {
    pub fn identity(dim: usize) -> Self {
        LiftTransform {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Rotation in the `(i, j)` plane by `t`: circular when the two slots
    /// have equal signs, hyperbolic otherwise.
    pub fn plane_rotation(s: Signature, i: usize, j: usize, t: f64) -> Self {
        let mut m = DMatrix::identity(s.dim(), s.dim());
        if s.sign(i) == s.sign(j) {
            m[(i, i)] = t.cos();
            m[(i, j)] = -t.sin();
            m[(j, i)] = t.sin();
            m[(j, j)] = t.cos();
        } else {
            m[(i, i)] = t.cosh();
            m[(i, j)] = t.sinh();
            m[(j, i)] = t.sinh();
            m[(j, j)] = t.cosh();
        }
        LiftTransform { matrix: m }
    }

    /// `self` after `other`.
    pub fn then(&self, other: &LiftTransform) -> Self {
        LiftTransform {
            matrix: &other.matrix * &self.matrix,
        }
    }

    /// `max |Tᵀ G T − G|`.
    pub fn metric_defect(&self, s: Signature) -> f64 {
        let g = s.metric_matrix();
        let d = self.matrix.transpose() * &g * &self.matrix - g;
        d.amax()
    }

    pub fn apply<T: Real>(&self, y: &JetVector<T>) -> JetVector<T> {
        let dim = self.matrix.nrows();
        let order = y.order();
        (0..dim)
            .map(|i| {
                (0..dim).fold(Jet::zero(order), |mut acc, j| {
                    let c = self.matrix[(i, j)];
                    if !c.is_zero() {
                        acc += &y[j].scale_real(T::lit(c));
                    }
                    acc
                })
            })
            .collect()
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * nalgebra::DVector::from_column_slice(v)).iter().copied().collect()
    }
}

/// Lift and frame for one chart point, optionally moved by an `O(n,2)` transform.
pub fn frame_at<T: Real>(
    chart: &ChartSpec,
    base: (T, T),
    order: usize,
    tol: f64,
    transform: Option<&LiftTransform>,
) -> Result<ConformalFrame<T>, PipelineError> {
    frame_at_with(chart, base, order, tol, tol, transform)
}

/// [`frame_at`] with separate isothermality and frame tolerances.
pub fn frame_at_with<T: Real>(
    chart: &ChartSpec,
    base: (T, T),
    order: usize,
    isothermal_tol: f64,
    frame_tol: f64,
    transform: Option<&LiftTransform>,
) -> Result<ConformalFrame<T>, PipelineError> {
    let mut y = lift_to_lightcone(chart, base, order)?;
    if let Some(t) = transform {
        y = t.apply(&y);
    }
    canonical_frame_with(SpaceFormModel::of(chart), &y, isothermal_tol, frame_tol)
}
