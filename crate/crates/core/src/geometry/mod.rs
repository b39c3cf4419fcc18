//! Curvature of symbolic metrics on the equilibrium manifold.
//!
//! The symbolic path follows the Levi-Civita construction end to end on
//! [`RationalExpr`] entries; [`curvature_numeric_oracle`] recomputes the
//! scalar from finite differences of the evaluated metric only, so the two
//! paths share nothing beyond metric evaluation.

mod curvature;
mod metric;
mod oracle;

pub use curvature::{christoffel, curvature_scalar, metric_inverse, Christoffel, CurvatureBundle, CurvatureOptions};
pub use metric::{DenFactor, MetricField};
pub use oracle::{curvature_numeric_oracle, curvature_numeric_oracle_with, OracleOptions};

use thiserror::Error;

use crate::symbolic::{RationalExpr, SymbolicError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("metric is degenerate {0}")]
    DegenerateMetric(String),
    #[error("finite-difference stencil leaves the positive domain in `{0}`")]
    StencilOutOfDomain(String),
    #[error("expression blowup: {terms} terms exceeds the limit of {limit}")]
    ExpressionBlowup { terms: usize, limit: usize },
    #[error("unsupported metric dimension {0} (expected 1 to 3)")]
    Dimension(usize),
    #[error("metric is not symmetric in components ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

pub(crate) fn guard(r: &RationalExpr, limit: usize) -> Result<(), GeometryError> {
    let terms = r.size();
    if terms > limit {
        Err(GeometryError::ExpressionBlowup { terms, limit })
    } else {
        Ok(())
    }
}
