//! Pointwise invariants `ψ, φ_α, Ω_α, A_{αβ}` and the residuals of the
//! structure, fundamental and vanishing-form equations.
//!
//! Inner products are complex-bilinear; conjugates appear only where the
//! equations carry a bar. Raised indices use the frame signs:
//! `φ^α = ε_α φ_α`, `A^β_α = ε_β A_{αβ}`.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::jet::{Jet, JetVector};
use crate::pipeline::{ConformalFrame, PipelineError};
use crate::scalar::Real;

type CJet<T> = Jet<Complex<T>>;
type CVec<T> = JetVector<Complex<T>>;

/// Invariants as jets; index `α` runs over the frame's normals.
#[derive(Debug, Clone)]
pub struct InvariantSet<T: Real> {
    pub signs: Vec<i8>,
    pub psi: CJet<T>,
    pub phi: Vec<CJet<T>>,
    pub big_omega: Vec<CJet<T>>,
    /// `a[α][β] = A_{αβ}`.
    pub a: Vec<Vec<CJet<T>>>,
    pub omega: Jet<T>,
    pub e2omega: Jet<T>,
    pub curvature: Jet<T>,
}

fn cj<T: Real>(j: &Jet<T>) -> CJet<T> {
    j.to_complex()
}

fn sum<T: Real>(items: impl IntoIterator<Item = CJet<T>>, order: usize) -> CJet<T> {
    items.into_iter().fold(Jet::zero(order), |acc, x| acc + x)
}

pub fn compute_invariants<T: Real>(frame: &ConformalFrame<T>) -> Result<InvariantSet<T>, PipelineError> {
    let s = frame.signature;
    if frame.n.order() < 1 {
        return Err(PipelineError::OrderTooLow {
            needed: 1,
            got: frame.n.order(),
        });
    }
    let yz = frame.y_z();
    let yzz = yz.dz();
    let nz = frame.n.dz();
    let two = Complex::from(T::lit(2.0));
    let psi = s.inner(&nz, &yz)? * two;
    let mut phi = Vec::new();
    let mut big_omega = Vec::new();
    let mut a = Vec::new();
    let ec: Vec<CVec<T>> = frame.normals.iter().map(|e| e.vector.to_complex()).collect();
    for (alpha, e) in frame.normals.iter().enumerate() {
        phi.push(s.inner(&nz, &ec[alpha])?);
        big_omega.push(s.inner(&yzz, &ec[alpha])? * two);
        let ez = e.vector.dz();
        a.push(ec.iter().map(|eb| s.inner(&ez, eb)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(InvariantSet {
        signs: frame.signs(),
        psi,
        phi,
        big_omega,
        a,
        omega: frame.omega.clone(),
        e2omega: frame.e2omega.clone(),
        curvature: frame.curvature.clone(),
    })
}

impl<T: Real> InvariantSet<T> {
    fn eps(&self, alpha: usize) -> T {
        T::lit(self.signs[alpha] as f64)
    }

    fn raise(&self, alpha: usize, x: &CJet<T>) -> CJet<T> {
        x.scale_real(self.eps(alpha))
    }

    pub fn rank(&self) -> usize {
        self.signs.len()
    }

    /// `‖Φ‖² = Σ ε_α |φ_α|²`.
    pub fn phi_norm_sq(&self) -> f64 {
        (0..self.rank())
            .map(|a| self.signs[a] as f64 * self.phi[a].value().norm_sqr().as_f64())
            .sum()
    }

    /// `sqrt(Σ |φ_α|²)` in the frame at hand; zero exactly when `Φ` vanishes.
    pub fn phi_frame_norm(&self) -> f64 {
        self.phi
            .iter()
            .map(|p| p.value().norm_sqr().as_f64())
            .sum::<f64>()
            .sqrt()
    }

    /// The quartic `Σ Ω^α Ω_α` as a jet.
    pub fn quartic(&self) -> CJet<T> {
        let order = self.big_omega.iter().map(Jet::order).min().unwrap_or(0);
        sum((0..self.rank()).map(|a| &self.raise(a, &self.big_omega[a]) * &self.big_omega[a]), order)
    }

    /// `Σ Ω^α Ω̄_α`.
    pub fn omega_hermitian(&self) -> Complex<T> {
        (0..self.rank()).fold(Complex::new(T::zero(), T::zero()), |acc, a| {
            let w = self.big_omega[a].value();
            acc + w * w.conj() * self.eps(a)
        })
    }

    /// Plain values at the base point.
    pub fn values(&self) -> InvariantValues {
        let c = |z: Complex<T>| C64::from(z);
        InvariantValues {
            psi: c(self.psi.value()),
            phi: self.phi.iter().map(|p| c(p.value())).collect(),
            big_omega: self.big_omega.iter().map(|p| c(p.value())).collect(),
            a: self
                .a
                .iter()
                .map(|row| row.iter().map(|p| c(p.value())).collect())
                .collect(),
            signs: self.signs.clone(),
            omega: self.omega.value().as_f64(),
            curvature: self.curvature.value().as_f64(),
            phi_norm_sq: self.phi_norm_sq(),
            quartic: c(self.quartic().value()),
        }
    }
}

/// Serializable complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl<T: Real> From<Complex<T>> for C64 {
    fn from(z: Complex<T>) -> Self {
        C64 {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        }
    }
}

impl fmt::Display for C64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "{} {} {}i", self.re, sign, self.im.abs())
    }
}

/// Invariants at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantValues {
    pub psi: C64,
    pub phi: Vec<C64>,
    pub big_omega: Vec<C64>,
    pub a: Vec<Vec<C64>>,
    pub signs: Vec<i8>,
    pub omega: f64,
    pub curvature: f64,
    pub phi_norm_sq: f64,
    pub quartic: C64,
}

/// Equation keys of a residual report, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResidualKey {
    S2_2,
    S2_3a,
    S2_3b,
    S2_4,
    F2_5a,
    F2_5b,
    F2_5c,
    F2_6,
    F2_7,
    W2_8,
    R3_1a,
    R3_1b,
    R3_1c,
    R3_3,
    R3_4,
}

impl ResidualKey {
    pub const ALL: [ResidualKey; 15] = [
        ResidualKey::S2_2,
        ResidualKey::S2_3a,
        ResidualKey::S2_3b,
        ResidualKey::S2_4,
        ResidualKey::F2_5a,
        ResidualKey::F2_5b,
        ResidualKey::F2_5c,
        ResidualKey::F2_6,
        ResidualKey::F2_7,
        ResidualKey::W2_8,
        ResidualKey::R3_1a,
        ResidualKey::R3_1b,
        ResidualKey::R3_1c,
        ResidualKey::R3_3,
        ResidualKey::R3_4,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ResidualKey::S2_2 => "S2.2",
            ResidualKey::S2_3a => "S2.3a",
            ResidualKey::S2_3b => "S2.3b",
            ResidualKey::S2_4 => "S2.4",
            ResidualKey::F2_5a => "F2.5a",
            ResidualKey::F2_5b => "F2.5b",
            ResidualKey::F2_5c => "F2.5c",
            ResidualKey::F2_6 => "F2.6",
            ResidualKey::F2_7 => "F2.7",
            ResidualKey::W2_8 => "W2.8",
            ResidualKey::R3_1a => "R3.1a",
            ResidualKey::R3_1b => "R3.1b",
            ResidualKey::R3_1c => "R3.1c",
            ResidualKey::R3_3 => "R3.3",
            ResidualKey::R3_4 => "R3.4",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.label() == s)
    }

    pub fn is_structure(self) -> bool {
        matches!(self, ResidualKey::S2_2 | ResidualKey::S2_3a | ResidualKey::S2_3b | ResidualKey::S2_4)
    }

    pub fn is_fundamental(self) -> bool {
        matches!(
            self,
            ResidualKey::F2_5a | ResidualKey::F2_5b | ResidualKey::F2_5c | ResidualKey::F2_6 | ResidualKey::F2_7
        )
    }
}

impl fmt::Display for ResidualKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// All residuals at one point, indexed by [`ResidualKey`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointResiduals(pub [f64; 15]);

impl PointResiduals {
    pub fn get(&self, k: ResidualKey) -> f64 {
        self.0[k as usize]
    }

    fn set(&mut self, k: ResidualKey, x: f64) {
        self.0[k as usize] = x;
    }
}

fn vec_lead_max<T: Real>(v: &CVec<T>) -> f64 {
    v.iter().map(|c| c.value().norm().as_f64()).fold(0.0, f64::max)
}

fn lead_abs<T: Real>(j: &CJet<T>) -> f64 {
    j.value().norm().as_f64()
}

fn cconst<T: Real>(x: f64) -> Complex<T> {
    Complex::from(T::lit(x))
}

/// Residuals of the structure equations, keys S2.2 to S2.4.
pub fn residual_structure<T: Real>(frame: &ConformalFrame<T>, inv: &InvariantSet<T>) -> Result<Vec<(ResidualKey, f64)>, PipelineError> {
    let yz = frame.y_z();
    let yzb = frame.y_zbar();
    let yzz = yz.dz();
    let yzzb = yz.dzbar();
    let nz = frame.n.dz();
    let y = frame.y.to_complex();
    let n = frame.n.to_complex();
    let k = cj(&frame.curvature);
    let e2w = cj(&frame.e2omega);
    let em2w = e2w.recip();
    let ec: Vec<CVec<T>> = frame.normals.iter().map(|e| e.vector.to_complex()).collect();
    let combo = |coeffs: &[CJet<T>]| -> CVec<T> {
        let mut acc: Option<CVec<T>> = None;
        for (c, e) in coeffs.iter().zip(&ec) {
            let t = e.scale_by(c);
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t),
            });
        }
        acc.expect("at least one normal")
    };

    // N_z − ⅛(4K−1)Y_z − e^{−2ω}ψ Y_z̄ − Σ φ^α E_α
    let k41 = (&k * cconst(4.0)) - cconst(1.0);
    let phi_up: Vec<CJet<T>> = (0..inv.rank()).map(|a| inv.raise(a, &inv.phi[a])).collect();
    let r22 = nz
        .sub(&yz.scale_by(&(&k41 * cconst(0.125))))
        .sub(&yzb.scale_by(&(&em2w * &inv.psi)))
        .sub(&combo(&phi_up));

    // Y_zz + ½ψY − 2ω_z Y_z − ½ Σ Ω^α E_α
    let omega_z = frame.omega.dz();
    let om_up: Vec<CJet<T>> = (0..inv.rank())
        .map(|a| inv.raise(a, &inv.big_omega[a]) * cconst(0.5))
        .collect();
    let r23a = yzz
        .add(&y.scale_by(&(&inv.psi * cconst(0.5))))
        .sub(&yz.scale_by(&(omega_z * cconst(2.0))))
        .sub(&combo(&om_up));

    // Y_zz̄ + (1/16)e^{2ω}(4K−1)Y + ½e^{2ω}N
    let r23b = yzzb
        .add(&y.scale_by(&(&(&e2w * &k41) * cconst(1.0 / 16.0))))
        .add(&n.scale_by(&(&e2w * cconst(0.5))));

    // (E_α)_z + φ_α Y + e^{−2ω}Ω_α Y_z̄ − Σ_β A^β_α E_β
    let mut r24 = 0.0_f64;
    for (alpha, e) in frame.normals.iter().enumerate() {
        let a_up: Vec<CJet<T>> = (0..inv.rank()).map(|b| inv.raise(b, &inv.a[alpha][b])).collect();
        let r = e
            .vector
            .dz()
            .add(&y.scale_by(&inv.phi[alpha]))
            .add(&yzb.scale_by(&(&em2w * &inv.big_omega[alpha])))
            .sub(&combo(&a_up));
        r24 = r24.max(vec_lead_max(&r));
    }
    Ok(vec![
        (ResidualKey::S2_2, vec_lead_max(&r22)),
        (ResidualKey::S2_3a, vec_lead_max(&r23a)),
        (ResidualKey::S2_3b, vec_lead_max(&r23b)),
        (ResidualKey::S2_4, r24),
    ])
}

/// Both members of the (2.6)-type identity per normal: the left member `L_α`
/// and the right member, each assembled from its own jets.
pub fn phi_identity_members<T: Real>(inv: &InvariantSet<T>) -> Vec<(Complex<T>, Complex<T>)> {
    let em2w = cj(&inv.e2omega).recip();
    let psib = inv.psi.conj();
    let order = inv.phi.iter().map(Jet::order).min().unwrap_or(1).saturating_sub(1);
    (0..inv.rank())
        .map(|alpha| {
            let left = inv.phi[alpha].dzbar()
                - &(&(&em2w * &psib) * &inv.big_omega[alpha]) * cconst(0.5)
                + sum(
                    (0..inv.rank()).map(|b| &inv.raise(b, &inv.phi[b]) * &inv.a[b][alpha].conj()),
                    order,
                );
            let right = inv.phi[alpha].conj().dz()
                - &(&(&em2w * &inv.psi) * &inv.big_omega[alpha].conj()) * cconst(0.5)
                + sum(
                    (0..inv.rank()).map(|b| &inv.raise(b, &inv.phi[b]).conj() * &inv.a[b][alpha]),
                    order,
                );
            (left.value(), right.value())
        })
        .collect()
}

/// `|L_α|` per normal, the left member of (2.6) set to zero.
pub fn willmore_residual<T: Real>(inv: &InvariantSet<T>) -> Vec<f64> {
    phi_identity_members(inv)
        .into_iter()
        .map(|(l, _)| l.norm().as_f64())
        .collect()
}

/// Residuals of the fundamental equations and the Willmore equation.
pub fn residual_fundamental<T: Real>(inv: &InvariantSet<T>) -> Result<Vec<(ResidualKey, f64)>, PipelineError> {
    let order = inv.psi.order();
    if order < 1 {
        return Err(PipelineError::OrderTooLow { needed: 1, got: 0 });
    }
    let r = inv.rank();
    let e2w = cj(&inv.e2omega);
    let em2w = e2w.recip();
    let kz = inv.curvature.dz();

    // ψ_z̄ − ½e^{2ω}K_z + Σ Ω^α φ̄_α
    let cross = sum(
        (0..r).map(|a| &inv.raise(a, &inv.big_omega[a]) * &inv.phi[a].conj()),
        order,
    );
    let f25a = inv.psi.dzbar() - &(&e2w * &kz) * cconst(0.5) + cross;

    // Σ Ω^α Ω_α + ¼e^{4ω}
    let f25b = inv.quartic() + &(&e2w * &e2w) * cconst(0.25);

    // (Ω_α)_z̄ + Σ Ω^β Ā_{βα} + e^{2ω}φ_α
    let mut f25c = 0.0_f64;
    for alpha in 0..r {
        let x = inv.big_omega[alpha].dzbar()
            + sum(
                (0..r).map(|b| &inv.raise(b, &inv.big_omega[b]) * &inv.a[b][alpha].conj()),
                order,
            )
            + &e2w * &inv.phi[alpha];
        f25c = f25c.max(lead_abs(&x));
    }

    let members = phi_identity_members(inv);
    let f26 = members
        .iter()
        .map(|(l, rr)| (l - rr).norm().as_f64())
        .fold(0.0, f64::max);
    let w28 = members.iter().map(|(l, _)| l.norm().as_f64()).fold(0.0, f64::max);

    // (A_{αβ})_z̄ − (Ā_{αβ})_z − ½e^{−2ω}(Ω_α Ω̄_β − Ω̄_α Ω_β) − Σ_γ (Ā_{αγ}A^γ_β − A_{αγ}Ā^γ_β)
    let mut f27 = 0.0_f64;
    for alpha in 0..r {
        for beta in 0..r {
            let a_ab = &inv.a[alpha][beta];
            let om = &(&inv.big_omega[alpha] * &inv.big_omega[beta].conj())
                - &(&inv.big_omega[alpha].conj() * &inv.big_omega[beta]);
            let quad = sum(
                (0..r).map(|g| {
                    let a_up_gb = inv.raise(g, &inv.a[beta][g]);
                    &(&inv.a[alpha][g].conj() * &a_up_gb) - &(&inv.a[alpha][g] * &a_up_gb.conj())
                }),
                order,
            );
            let x = a_ab.dzbar() - a_ab.conj().dz() - &(&em2w * &om) * cconst(0.5) - quad;
            f27 = f27.max(lead_abs(&x));
        }
    }

    Ok(vec![
        (ResidualKey::F2_5a, lead_abs(&f25a)),
        (ResidualKey::F2_5b, lead_abs(&f25b)),
        (ResidualKey::F2_5c, f25c),
        (ResidualKey::F2_6, f26),
        (ResidualKey::F2_7, f27),
        (ResidualKey::W2_8, w28),
    ])
}

/// Residuals of the vanishing-form equations.
///
/// The last key compares `ψ̄ Σ Ω^α Ω_α`, `ψ Σ Ω^α Ω̄_α` and `−¼e^{4ω}ψ̄`,
/// which is what conjugating `ψ̄Ω_α = ψΩ̄_α` against `Ω^α` and substituting
/// the normalization gives.
pub fn section3_residuals<T: Real>(inv: &InvariantSet<T>) -> Result<Vec<(ResidualKey, f64)>, PipelineError> {
    if inv.psi.order() < 1 {
        return Err(PipelineError::OrderTooLow { needed: 1, got: 0 });
    }
    let e2w = cj(&inv.e2omega);
    let psi = inv.psi.value();
    let psib = psi.conj();
    let r31a = inv.psi.dzbar() - &(&e2w * &inv.curvature.dz()) * cconst(0.5);
    let r31b = inv
        .big_omega
        .iter()
        .map(|w| (psib * w.value() - psi * w.value().conj()).norm().as_f64())
        .fold(0.0, f64::max);
    let quartic = inv.quartic();
    let e4w = e2w.value() * e2w.value();
    let r31c = quartic.value() / e4w + cconst(0.25);
    let r33 = quartic.dzbar();
    let (m1, m2, m3) = section3_quartic_members(inv);
    let r34 = (m1 - m2).norm().max((m2 - m3).norm()).as_f64();
    Ok(vec![
        (ResidualKey::R3_1a, lead_abs(&r31a)),
        (ResidualKey::R3_1b, r31b),
        (ResidualKey::R3_1c, r31c.norm().as_f64()),
        (ResidualKey::R3_3, lead_abs(&r33)),
        (ResidualKey::R3_4, r34),
    ])
}

/// `(ψ̄ Σ Ω^α Ω_α, ψ Σ Ω^α Ω̄_α, −¼e^{4ω}ψ̄)`.
pub fn section3_quartic_members<T: Real>(inv: &InvariantSet<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
    let psi = inv.psi.value();
    let e2w = inv.e2omega.value();
    (
        psi.conj() * inv.quartic().value(),
        psi * inv.omega_hermitian(),
        psi.conj() * (e2w * e2w * T::lit(-0.25)),
    )
}

/// Every residual at one point.
pub fn all_residuals<T: Real>(frame: &ConformalFrame<T>, inv: &InvariantSet<T>) -> Result<PointResiduals, PipelineError> {
    let mut out = PointResiduals([0.0; 15]);
    for (k, x) in residual_structure(frame, inv)?
        .into_iter()
        .chain(residual_fundamental(inv)?)
        .chain(section3_residuals(inv)?)
    {
        out.set(k, x);
    }
    Ok(out)
}

/// Maximum of one residual over a grid with its location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub key: ResidualKey,
    pub max: f64,
    pub at: (f64, f64),
}

/// Per-equation maxima over a sample grid, in [`ResidualKey::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    /// Reduces point residuals in the given order; ties keep the earliest point.
    pub fn from_points<'a>(points: impl IntoIterator<Item = ((f64, f64), &'a PointResiduals)>) -> Self {
        let mut entries: Vec<ResidualEntry> = ResidualKey::ALL
            .iter()
            .map(|&key| ResidualEntry {
                key,
                max: 0.0,
                at: (f64::NAN, f64::NAN),
            })
            .collect();
        let mut first = true;
        for (at, r) in points {
            for e in entries.iter_mut() {
                let x = r.get(e.key);
                // NaN sticks once seen
                if first || (!e.max.is_nan() && (x.is_nan() || x > e.max)) {
                    e.max = x;
                    e.at = at;
                }
            }
            first = false;
        }
        ResidualReport { entries }
    }

    pub fn get(&self, key: ResidualKey) -> f64 {
        self.entries[key as usize].max
    }

    pub fn entry(&self, key: ResidualKey) -> &ResidualEntry {
        &self.entries[key as usize]
    }

    /// Largest structure and fundamental residual.
    pub fn worst_identity(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.key.is_structure() || e.key.is_fundamental())
            .map(|e| if e.max.is_nan() { f64::INFINITY } else { e.max })
            .fold(0.0, f64::max)
    }
}
