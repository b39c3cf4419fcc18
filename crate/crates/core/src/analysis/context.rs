use std::sync::{Arc, OnceLock};

use crate::geometry::{curvature_scalar, CurvatureBundle, DenFactor, MetricField};
use crate::models::{
    default_eta, gtd_metric_with_eta, ruppeiner_metric, thermo_quantities, weinhold_metric, MetricKind, ThermoModel,
    ThermoQuantities,
};

use super::sweep::Quantity;
use super::{AnalysisError, AnalysisOptions};

/// A metric together with its symbolic curvature.
#[derive(Debug)]
pub struct Curved {
    pub metric: MetricField,
    pub bundle: CurvatureBundle,
}

type Evaluator<'a> = Box<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>;

/// Derived symbolic data for one model, with curvatures computed on first use.
pub struct Analyzer<'m> {
    model: &'m ThermoModel,
    quantities: ThermoQuantities,
    opts: AnalysisOptions,
    eta: Vec<f64>,
    curved: [OnceLock<Result<Arc<Curved>, AnalysisError>>; 3],
}

impl<'m> Analyzer<'m> {
    pub fn new(model: &'m ThermoModel, opts: AnalysisOptions) -> Result<Self, AnalysisError> {
        Self::with_eta(model, opts, default_eta(model.dim()))
    }

    /// Use a non-default signature for the GTD metric.
    pub fn with_eta(model: &'m ThermoModel, opts: AnalysisOptions, eta: Vec<f64>) -> Result<Self, AnalysisError> {
        let quantities = thermo_quantities(model)?;
        Ok(Analyzer { model, quantities, opts, eta, curved: Default::default() })
    }

    pub fn model(&self) -> &'m ThermoModel {
        self.model
    }

    pub fn quantities(&self) -> &ThermoQuantities {
        &self.quantities
    }

    pub fn options(&self) -> &AnalysisOptions {
        &self.opts
    }

    pub fn metric(&self, kind: MetricKind) -> Result<MetricField, AnalysisError> {
        Ok(match kind {
            MetricKind::Gtd => gtd_metric_with_eta(self.model, &self.eta)?,
            MetricKind::Weinhold => weinhold_metric(self.model)?,
            MetricKind::Ruppeiner => ruppeiner_metric(self.model)?,
        })
    }

    pub fn curved(&self, kind: MetricKind) -> Result<Arc<Curved>, AnalysisError> {
        let slot = match kind {
            MetricKind::Gtd => &self.curved[0],
            MetricKind::Weinhold => &self.curved[1],
            MetricKind::Ruppeiner => &self.curved[2],
        };
        slot.get_or_init(|| {
            let metric = self.metric(kind)?;
            let bundle = curvature_scalar(&metric, &self.opts.curvature)?;
            Ok(Arc::new(Curved { metric, bundle }))
        })
        .clone()
    }

    pub fn has_quantity(&self, q: Quantity) -> bool {
        match q {
            Quantity::Phi => self.model.dim() >= 2,
            Quantity::L => self.model.dim() >= 3,
            _ => true,
        }
    }

    fn metric_of(q: Quantity) -> Option<MetricKind> {
        match q {
            Quantity::RGtd => Some(MetricKind::Gtd),
            Quantity::RW => Some(MetricKind::Weinhold),
            Quantity::RRupp => Some(MetricKind::Ruppeiner),
            _ => None,
        }
    }

    /// The heat-capacity denominator as a factor.
    pub fn heat_capacity_factor(&self) -> DenFactor {
        let name = self.model.vars().get(0).as_str();
        DenFactor::new(format!("M_{name}{name}"), self.quantities.heat_capacity_denominator().clone())
    }

    /// Polynomials whose zeros can make `q` singular.
    pub fn factors_for(&self, q: Quantity) -> Result<Vec<DenFactor>, AnalysisError> {
        if let Some(kind) = Self::metric_of(q) {
            return Ok(self.curved(kind)?.metric.det_factors());
        }
        Ok(match q {
            Quantity::CQ => {
                let f = self.heat_capacity_factor();
                if f.poly.as_constant().is_some() {
                    Vec::new()
                } else {
                    vec![f]
                }
            }
            _ => Vec::new(),
        })
    }

    /// `q` as a function of the model's coordinates.
    pub fn evaluator(&self, q: Quantity) -> Result<Evaluator<'_>, AnalysisError> {
        if let Some(kind) = Self::metric_of(q) {
            let curved = self.curved(kind)?;
            return Ok(Box::new(move |x| curved.bundle.scalar_at(x)));
        }
        let qs = &self.quantities;
        Ok(match q {
            Quantity::T => Box::new(move |x| qs.temperature.eval_slice(x)),
            Quantity::Phi | Quantity::L => {
                let k = if q == Quantity::Phi { 0 } else { 1 };
                match qs.conjugates.get(k) {
                    Some(p) => Box::new(move |x| p.eval_slice(x)),
                    None => Box::new(|_| f64::NAN),
                }
            }
            Quantity::CQ => Box::new(move |x| qs.heat_capacity.eval_slice(x)),
            _ => Box::new(move |x| qs.conformal_factor.eval_slice(x)),
        })
    }
}
