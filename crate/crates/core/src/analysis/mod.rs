//! Sweeps along one state variable, pole location, and the comparison between
//! heat-capacity poles and curvature singularities.

mod context;
mod poles;
mod report;
mod sweep;

pub use context::{Analyzer, Curved};
pub use poles::{find_poles, growth_exponent, Evidence, SingularityKind, SingularityRecord, Source};
pub use report::{coincidence_report, Match, SweepSummary, TransitionReport, Verdict, WeinholdDistance};
pub use sweep::{sweep, Line, Quantity, Scale, SweepSpec, SweepTable};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{CurvatureOptions, GeometryError};
use crate::models::{MetricKind, ModelError};
use crate::symbolic::SymbolicError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Numeric knobs for pole finding and classification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisOptions {
    /// Relative distance in the active variable under which two locations coincide.
    pub match_tol: f64,
    /// `|f| < f_zero_tol · max|f|` on the sweep marks a metric degeneracy.
    pub f_zero_tol: f64,
    /// Relative width at which bisection stops.
    pub bisection_tol: f64,
    /// Grid points whose factor magnitude falls below `pole_guard · max|factor|` are flagged.
    pub pole_guard: f64,
    /// Smallest local growth exponent of `|R|` that still counts as a divergence.
    pub growth_min: f64,
    /// Metric whose curvature is compared against the heat capacity.
    pub metric: MetricKind,
    #[serde(skip)]
    pub curvature: CurvatureOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            match_tol: 1e-6,
            f_zero_tol: 1e-8,
            bisection_tol: 1e-10,
            pole_guard: 1e-3,
            growth_min: 0.5,
            metric: MetricKind::Gtd,
            curvature: CurvatureOptions::default(),
        }
    }
}
