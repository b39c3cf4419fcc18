use serde::Serialize;

use crate::models::MetricKind;

use super::context::Analyzer;
use super::poles::{find_poles, growth_exponent, SingularityKind, SingularityRecord, Source};
use super::sweep::{Line, Quantity, SweepSpec};
use super::{AnalysisError, AnalysisOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A heat-capacity pole and the nearest physical curvature singularity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Match {
    pub cq_pole: f64,
    pub r_singularity: Option<f64>,
    /// `|x_R − x_C| / x_C`
    pub distance: Option<f64>,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeinholdDistance {
    pub location: f64,
    pub kind: SingularityKind,
    pub nearest_cq_pole: Option<f64>,
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionReport {
    pub model: String,
    /// Metric whose curvature is compared with the heat capacity.
    pub metric: MetricKind,
    pub sweep: SweepSummary,
    pub options: AnalysisOptions,
    pub records: Vec<SingularityRecord>,
    pub matching: Vec<Match>,
    /// Physical curvature singularities with no heat-capacity pole nearby.
    pub unmatched_physical: Vec<f64>,
    /// Diverging Weinhold curvature singularities and their distance to the nearest heat-capacity pole.
    pub weinhold: Vec<WeinholdDistance>,
    /// Every Weinhold singularity is more than ten match tolerances from every heat-capacity pole.
    pub weinhold_disjoint: bool,
    pub verdict: Verdict,
}

impl TransitionReport {
    pub fn locations(&self, source: Source, kind: Option<SingularityKind>) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.source == source && kind.is_none_or(|k| r.kind == k))
            .map(|r| r.location)
            .collect()
    }

    pub fn cq_poles(&self) -> Vec<f64> {
        self.locations(Source::CQ, Some(SingularityKind::PhaseTransition))
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn rel_distance(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs()
}

fn quantity_for(source: Source, opts: &AnalysisOptions) -> Quantity {
    match source {
        Source::CQ => Quantity::CQ,
        Source::RW => Quantity::RW,
        Source::RGtd => match opts.metric {
            MetricKind::Gtd => Quantity::RGtd,
            MetricKind::Weinhold => Quantity::RW,
            MetricKind::Ruppeiner => Quantity::RRupp,
        },
    }
}

struct LineScale {
    f_max: f64,
    cq_den_max: f64,
}

impl Analyzer<'_> {
    fn line_scale(&self, line: &Line, spec: &SweepSpec) -> LineScale {
        let q = self.quantities();
        let grid = spec.grid();
        let max_abs = |p: &crate::symbolic::GenPoly| {
            grid.iter().map(|&x| p.eval_slice(&line.at(x)).abs()).filter(|v| v.is_finite()).fold(0.0f64, f64::max)
        };
        LineScale { f_max: max_abs(&q.conformal_factor), cq_den_max: max_abs(q.heat_capacity_denominator()) }
    }

    /// Fill in the evidence and kind of a record produced by [`find_poles`].
    ///
    /// A vanishing conformal factor marks a metric degeneracy. Otherwise the
    /// quantity must actually diverge (growth exponent at least
    /// `growth_min`) and the heat-capacity denominator must vanish for a
    /// phase transition; anything else stays unclassified.
    pub fn classify_singularity(&self, spec: &SweepSpec, record: &SingularityRecord) -> Result<SingularityRecord, AnalysisError> {
        let line = spec.line(self.model().vars())?;
        self.classify_on(&line, &self.line_scale(&line, spec), record)
    }

    fn classify_on(&self, line: &Line, scale: &LineScale, record: &SingularityRecord) -> Result<SingularityRecord, AnalysisError> {
        let opts = self.options();
        let q = self.quantities();
        let x = record.location;
        let at = line.at(x);
        let f_value = q.conformal_factor.eval_slice(&at);
        let f_relative = if scale.f_max > 0.0 { f_value.abs() / scale.f_max } else { 0.0 };
        let den = q.heat_capacity_denominator().eval_slice(&at);
        let den_relative = if scale.cq_den_max > 0.0 { den.abs() / scale.cq_den_max } else { 0.0 };
        let eval = self.evaluator(quantity_for(record.source, opts))?;
        let growth = growth_exponent(|t| eval(&line.at(t)), x);

        let kind = if f_relative < opts.f_zero_tol {
            SingularityKind::MetricDegeneracy
        } else if growth.is_some_and(|p| p < opts.growth_min) {
            SingularityKind::Unclassified
        } else if den_relative < opts.f_zero_tol {
            SingularityKind::PhaseTransition
        } else {
            SingularityKind::Unclassified
        };
        let mut out = record.clone();
        out.kind = kind;
        out.evidence.f_value = f_value;
        out.evidence.f_relative = f_relative;
        out.evidence.heat_capacity_denominator_relative = den_relative;
        out.evidence.growth_exponent = growth;
        Ok(out)
    }
}

/// Locate and classify heat-capacity poles and curvature singularities along
/// the sweep, then match them.
///
/// The verdict passes iff every heat-capacity pole has a physical curvature
/// singularity within the match tolerance and no physical curvature
/// singularity is left over.
pub fn coincidence_report(analyzer: &Analyzer<'_>, spec: &SweepSpec) -> Result<TransitionReport, AnalysisError> {
    let opts = analyzer.options();
    let model = analyzer.model();
    let line = spec.line(model.vars())?;
    let scale = analyzer.line_scale(&line, spec);

    let cq_factors = analyzer.factors_for(Quantity::CQ)?;
    let role = analyzer.curved(opts.metric)?;
    let gtd_factors = role.metric.det_factors();
    let w_factors = analyzer.curved(MetricKind::Weinhold)?.metric.det_factors();

    let mut records = Vec::new();
    for (factors, source) in [(&cq_factors, Source::CQ), (&gtd_factors, Source::RGtd), (&w_factors, Source::RW)] {
        for rec in find_poles(factors, &line, spec, source, opts) {
            records.push(analyzer.classify_on(&line, &scale, &rec)?);
        }
    }

    let physical = |source: Source| -> Vec<f64> {
        records
            .iter()
            .filter(|r| r.source == source && r.kind == SingularityKind::PhaseTransition)
            .map(|r| r.location)
            .collect()
    };
    let cq_poles = physical(Source::CQ);
    let r_physical = physical(Source::RGtd);
    let nearest = |x: f64, set: &[f64]| -> Option<(f64, f64)> {
        set.iter().map(|&y| (y, rel_distance(x, y))).min_by(|a, b| a.1.total_cmp(&b.1))
    };

    let matching: Vec<Match> = cq_poles
        .iter()
        .map(|&c| {
            let near = nearest(c, &r_physical);
            Match {
                cq_pole: c,
                r_singularity: near.map(|n| n.0),
                distance: near.map(|n| n.1),
                matched: near.is_some_and(|n| n.1 <= opts.match_tol),
            }
        })
        .collect();
    let unmatched_physical: Vec<f64> =
        r_physical.iter().copied().filter(|&r| nearest(r, &cq_poles).is_none_or(|n| n.1 > opts.match_tol)).collect();

    let weinhold: Vec<WeinholdDistance> = records
        .iter()
        .filter(|r| {
            r.source == Source::RW
                && r.kind != SingularityKind::MetricDegeneracy
                && r.evidence.growth_exponent.is_none_or(|p| p >= opts.growth_min)
        })
        .map(|r| {
            let near = nearest(r.location, &cq_poles);
            WeinholdDistance { location: r.location, kind: r.kind, nearest_cq_pole: near.map(|n| n.0), distance: near.map(|n| n.1) }
        })
        .collect();
    let weinhold_disjoint = weinhold.iter().all(|w| w.distance.is_none_or(|d| d > 10.0 * opts.match_tol));

    let verdict = if matching.iter().all(|m| m.matched) && unmatched_physical.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(TransitionReport {
        model: model.summary(),
        metric: opts.metric,
        sweep: SweepSummary { var: spec.var.clone(), min: spec.min, max: spec.max, points: spec.points },
        options: opts.clone(),
        records,
        matching,
        unmatched_physical,
        weinhold,
        weinhold_disjoint,
        verdict,
    })
}
