//! Branch decision for the vanishing-form classification from grid samples.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{rank_of_span, SpaceVector};
use crate::invariants::C64;

/// What the classifier needs from one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub at: (f64, f64),
    /// `sqrt(Σ|φ_α|²)` in the pipeline's frame.
    pub phi_norm: f64,
    /// Gauge-invariant `Σ ε_α |φ_α|²`.
    pub phi_norm_sq: f64,
    pub psi: C64,
    pub psi_zbar: f64,
    pub curvature: f64,
    pub y: Vec<f64>,
    pub n: Vec<f64>,
}

/// A grid point where the pipeline failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub at: (f64, f64),
    pub reason: String,
    /// True for regularity failures of the surface (as opposed to bad input).
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierTolerances {
    pub phi: f64,
    pub psi: f64,
    pub isotropy: f64,
    pub rank: f64,
}

impl Default for ClassifierTolerances {
    fn default() -> Self {
        ClassifierTolerances {
            phi: 1e-7,
            psi: 1e-7,
            isotropy: 1e-6,
            rank: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("too few samples: {got}, at least {needed} required")]
    TooFewSamples { needed: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// Stationary constant-curvature case: `K` and `N − ⅛(4K−1)Y` constant.
    VanishingFormIsotropic,
    /// Vanishing form with `Ψ ≢ 0`: the explicit product surfaces.
    VanishingFormNonIsotropic,
    NonVanishingForm,
    Degenerate,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::VanishingFormIsotropic => "VanishingFormIsotropic",
            Branch::VanishingFormNonIsotropic => "VanishingFormNonIsotropic",
            Branch::NonVanishingForm => "NonVanishingForm",
            Branch::Degenerate => "Degenerate",
        }
    }

    pub fn has_vanishing_form(self) -> bool {
        matches!(self, Branch::VanishingFormIsotropic | Branch::VanishingFormNonIsotropic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiZeros {
    IdenticallyZero,
    IsolatedZeros,
    Nonvanishing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropicResult {
    pub is_isotropic: bool,
    /// Mean of `N − ⅛(4K−1)Y` over the samples.
    pub c: Vec<f64>,
    /// Largest Euclidean deviation of a sample's vector from the mean.
    pub dispersion: f64,
    /// Largest deviation of `K` from its mean.
    pub k_dispersion: f64,
}

fn require(samples: &[PointSample], needed: usize) -> Result<(), ClassifyError> {
    if samples.len() < needed {
        return Err(ClassifyError::TooFewSamples {
            needed,
            got: samples.len(),
        });
    }
    Ok(())
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, f64::max)
}

pub fn phi_max(samples: &[PointSample]) -> f64 {
    max_of(samples.iter().map(|s| s.phi_norm))
}

pub fn detect_vanishing_form(samples: &[PointSample], tol: f64) -> Result<bool, ClassifyError> {
    require(samples, 4)?;
    Ok(phi_max(samples) <= tol)
}

pub fn isotropic_test(samples: &[PointSample], tol: f64) -> IsotropicResult {
    let cs: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let k = (4.0 * s.curvature - 1.0) / 8.0;
            s.n.iter().zip(&s.y).map(|(n, y)| n - k * y).collect()
        })
        .collect();
    let m = samples.len().max(1) as f64;
    let dim = cs.first().map_or(0, Vec::len);
    let mean: Vec<f64> = (0..dim).map(|i| cs.iter().map(|c| c[i]).sum::<f64>() / m).collect();
    let dispersion = max_of(cs.iter().map(|c| {
        c.iter()
            .zip(&mean)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }));
    let k_mean = samples.iter().map(|s| s.curvature).sum::<f64>() / m;
    let k_dispersion = max_of(samples.iter().map(|s| (s.curvature - k_mean).abs()));
    IsotropicResult {
        is_isotropic: dispersion <= tol && k_dispersion <= tol,
        c: mean,
        dispersion,
        k_dispersion,
    }
}

pub fn psi_zero_test(samples: &[PointSample], tol: f64) -> PsiZeros {
    let psi_max = max_of(samples.iter().map(|s| s.psi.abs()));
    let psi_min = samples.iter().map(|s| s.psi.abs()).fold(f64::INFINITY, f64::min);
    if psi_max <= tol {
        PsiZeros::IdenticallyZero
    } else if psi_min > tol {
        PsiZeros::Nonvanishing
    } else {
        PsiZeros::IsolatedZeros
    }
}

/// Numerical rank of the sampled canonical lifts.
pub fn fullness_test(samples: &[PointSample], n: usize, tol: f64) -> Result<usize, ClassifyError> {
    require(samples, n + 2)?;
    let rows: Vec<SpaceVector<f64>> = samples.iter().map(|s| SpaceVector::new(s.y.clone())).collect();
    Ok(rank_of_span(&rows, tol).expect("non-empty sample"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub branch: Branch,
    pub n: usize,
    pub samples: usize,
    pub failures: Vec<PointFailure>,
    pub phi_max: f64,
    /// Largest `|Σ ε_α |φ_α|²|`.
    pub phi_norm_sq_max: f64,
    pub psi_max: f64,
    pub psi_min: f64,
    pub psi_holo_max: f64,
    pub psi_zeros: Option<PsiZeros>,
    /// `K` at each sample, ordered by `(u, v)`.
    pub k_values: Vec<f64>,
    pub isotropic: Option<IsotropicResult>,
    pub essential_rank: usize,
    pub full: bool,
    /// Present when the form vanishes, `Ψ` has no zeros and the surface is
    /// full; a full such surface must have `n = 3`.
    pub n3_consistent: Option<bool>,
    pub warnings: Vec<String>,
}

fn by_point(a: &PointSample, b: &PointSample) -> Ordering {
    a.at.0.total_cmp(&b.at.0).then(a.at.1.total_cmp(&b.at.1))
}

/// Aggregates samples into a report. Samples are put in `(u, v)` order
/// first, so the result does not depend on the order they arrive in.
pub fn classify(
    samples: &[PointSample],
    failures: &[PointFailure],
    n: usize,
    tol: &ClassifierTolerances,
) -> Result<ClassificationReport, ClassifyError> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(by_point);
    let samples = &sorted[..];
    let mut failures = failures.to_vec();
    failures.sort_by(|a, b| a.at.0.total_cmp(&b.at.0).then(a.at.1.total_cmp(&b.at.1)));

    let mut warnings = Vec::new();
    let psi_abs = || samples.iter().map(|s| s.psi.abs());
    let mut report = ClassificationReport {
        branch: Branch::Degenerate,
        n,
        samples: samples.len(),
        failures: failures.clone(),
        phi_max: phi_max(samples),
        phi_norm_sq_max: max_of(samples.iter().map(|s| s.phi_norm_sq.abs())),
        psi_max: max_of(psi_abs()),
        psi_min: if samples.is_empty() {
            0.0
        } else {
            psi_abs().fold(f64::INFINITY, f64::min)
        },
        psi_holo_max: max_of(samples.iter().map(|s| s.psi_zbar)),
        psi_zeros: None,
        k_values: samples.iter().map(|s| s.curvature).collect(),
        isotropic: None,
        essential_rank: 0,
        full: false,
        n3_consistent: None,
        warnings: Vec::new(),
    };
    if !failures.is_empty() {
        warnings.push(format!(
            "{} of {} grid points failed; first at ({}, {}): {}",
            failures.len(),
            failures.len() + samples.len(),
            failures[0].at.0,
            failures[0].at.1,
            failures[0].reason
        ));
        report.warnings = warnings;
        return Ok(report);
    }

    report.essential_rank = fullness_test(samples, n, tol.rank)?;
    report.full = report.essential_rank == n + 2;
    if !report.full {
        warnings.push(format!(
            "surface is not full: essential rank {} < {}",
            report.essential_rank,
            n + 2
        ));
    }

    if !detect_vanishing_form(samples, tol.phi)? {
        report.branch = Branch::NonVanishingForm;
    } else {
        let zeros = psi_zero_test(samples, tol.psi);
        let iso = isotropic_test(samples, tol.isotropy);
        report.branch = if iso.is_isotropic {
            Branch::VanishingFormIsotropic
        } else {
            Branch::VanishingFormNonIsotropic
        };
        if zeros == PsiZeros::Nonvanishing && report.full {
            let ok = n == 3;
            report.n3_consistent = Some(ok);
            if !ok {
                warnings.push(format!("full surface with vanishing form and nonvanishing psi, but n = {n}"));
            }
        }
        report.psi_zeros = Some(zeros);
        report.isotropic = Some(iso);
    }
    report.warnings = warnings;
    Ok(report)
}
