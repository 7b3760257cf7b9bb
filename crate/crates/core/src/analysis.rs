//! Grid sweeps: run the pipeline at every sample point of a chart on a
//! bounded worker pool and gather the results in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{classify, ClassificationReport, ClassifierTolerances, ClassifyError, PointFailure, PointSample};
use crate::dsl::ChartSpec;
use crate::invariants::{all_residuals, compute_invariants, InvariantValues, PointResiduals, ResidualReport};
use crate::pipeline::{frame_at_with, LiftTransform, PipelineError, DEFAULT_ORDER, MIN_ORDER};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance on `|h12|` and `|h11 − h22|`.
    pub isothermal: f64,
    /// Gram–Schmidt cutoff and frame identity tolerance.
    pub frame: f64,
    #[serde(flatten)]
    pub classifier: ClassifierTolerances,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            isothermal: 1e-9,
            frame: 1e-9,
            classifier: ClassifierTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub order: usize,
    pub tolerances: Tolerances,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            order: DEFAULT_ORDER,
            tolerances: Tolerances::default(),
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("order ≥ {MIN_ORDER} required, got {0}")]
    OrderTooLow(usize),
    #[error("tolerance {0} must be positive")]
    NonPositiveTolerance(&'static str),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.order < MIN_ORDER {
            return Err(ConfigError::OrderTooLow(self.order));
        }
        let t = &self.tolerances;
        for (name, x) in [
            ("isothermal", t.isothermal),
            ("frame", t.frame),
            ("phi", t.classifier.phi),
            ("psi", t.classifier.psi),
            ("isotropy", t.classifier.isotropy),
            ("rank", t.classifier.rank),
        ] {
            if !(x > 0.0) {
                return Err(ConfigError::NonPositiveTolerance(name));
            }
        }
        Ok(())
    }
}

/// Everything computed at one successful point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointData {
    pub invariants: InvariantValues,
    pub residuals: PointResiduals,
    pub sample: PointSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub at: (f64, f64),
    pub outcome: Result<PointData, PipelineError>,
}

/// Runs the pipeline, invariants and residuals at one point.
pub fn analyze_point<T: Real>(
    chart: &ChartSpec,
    at: (f64, f64),
    cfg: &RunConfig,
    transform: Option<&LiftTransform>,
) -> Result<PointData, PipelineError> {
    let base = (T::lit(at.0), T::lit(at.1));
    let t = &cfg.tolerances;
    let frame = frame_at_with::<T>(chart, base, cfg.order, t.isothermal, t.frame, transform)?;
    if frame.n.order() < 2 {
        return Err(PipelineError::OrderTooLow {
            needed: MIN_ORDER,
            got: cfg.order,
        });
    }
    let inv = compute_invariants(&frame)?;
    let residuals = all_residuals(&frame, &inv)?;
    let sample = PointSample {
        at,
        phi_norm: inv.phi_frame_norm(),
        phi_norm_sq: inv.phi_norm_sq(),
        psi: inv.psi.value().into(),
        psi_zbar: inv.psi.dzbar().value().norm().as_f64(),
        curvature: frame.curvature.value().as_f64(),
        y: frame.y.lead().to_f64(),
        n: frame.n.lead().to_f64(),
    };
    Ok(PointData {
        invariants: inv.values(),
        residuals,
        sample,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartAnalysis {
    pub n: usize,
    pub points: Vec<PointResult>,
}

/// Runs every grid point of `chart`.
pub fn analyze(chart: &ChartSpec, cfg: &RunConfig, transform: Option<&LiftTransform>) -> Result<ChartAnalysis, ConfigError> {
    analyze_points(chart, &chart.grid_points(), cfg, transform)
}

/// Runs the given points; results come back in the order given whatever the
/// worker count.
pub fn analyze_points(
    chart: &ChartSpec,
    points: &[(f64, f64)],
    cfg: &RunConfig,
    transform: Option<&LiftTransform>,
) -> Result<ChartAnalysis, ConfigError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ConfigError::Pool(e.to_string()))?;
    let results = pool.install(|| {
        points
            .par_iter()
            .map(|&at| PointResult {
                at,
                outcome: analyze_point::<f64>(chart, at, cfg, transform),
            })
            .collect()
    });
    Ok(ChartAnalysis {
        n: chart.n,
        points: results,
    })
}

impl ChartAnalysis {
    pub fn successes(&self) -> impl Iterator<Item = (&(f64, f64), &PointData)> {
        self.points
            .iter()
            .filter_map(|p| p.outcome.as_ref().ok().map(|d| (&p.at, d)))
    }

    pub fn samples(&self) -> Vec<PointSample> {
        self.successes().map(|(_, d)| d.sample.clone()).collect()
    }

    pub fn failures(&self) -> Vec<PointFailure> {
        self.points
            .iter()
            .filter_map(|p| {
                p.outcome.as_ref().err().map(|e| PointFailure {
                    at: p.at,
                    reason: e.to_string(),
                    degenerate: e.is_degenerate(),
                })
            })
            .collect()
    }

    /// First failing point in grid order.
    pub fn first_error(&self) -> Option<(&(f64, f64), &PipelineError)> {
        self.points
            .iter()
            .find_map(|p| p.outcome.as_ref().err().map(|e| (&p.at, e)))
    }

    pub fn residual_report(&self) -> ResidualReport {
        ResidualReport::from_points(self.successes().map(|(at, d)| (*at, &d.residuals)))
    }

    pub fn classify(&self, tol: &ClassifierTolerances) -> Result<ClassificationReport, ClassifyError> {
        classify(&self.samples(), &self.failures(), self.n, tol)
    }
}
