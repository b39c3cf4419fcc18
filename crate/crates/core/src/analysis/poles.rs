use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::DenFactor;

use super::sweep::{Line, SweepSpec};
use super::AnalysisOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Source {
    #[serde(rename = "C_Q")]
    CQ,
    #[serde(rename = "R_gtd")]
    RGtd,
    #[serde(rename = "R_w")]
    RW,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    PhaseTransition,
    MetricDegeneracy,
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    /// Labels of every denominator factor vanishing at the location.
    pub factors: Vec<String>,
    /// Final bisection bracket.
    pub bracket: [f64; 2],
    /// `|factor(location)|` for the first responsible factor.
    pub residual: f64,
    pub f_value: f64,
    /// `|f(location)| / max |f|` over the sweep grid.
    pub f_relative: f64,
    /// Same ratio for the heat-capacity denominator.
    pub heat_capacity_denominator_relative: f64,
    /// Exponent `p` in `|X| ~ |x − x*|^{−p}`, when measurable.
    pub growth_exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityRecord {
    pub location: f64,
    pub source: Source,
    pub kind: SingularityKind,
    pub evidence: Evidence,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, [f64; 2]) {
    let mut flo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs() || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return (mid, [mid, mid]);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), [lo, hi])
}

/// Roots of each factor on the sweep line by sign-change scan and bisection.
///
/// Roots closer than the match tolerance are merged into one record that
/// lists every responsible factor. Kinds are left `Unclassified`.
pub fn find_poles(
    factors: &[DenFactor],
    line: &Line,
    spec: &SweepSpec,
    source: Source,
    opts: &AnalysisOptions,
) -> Vec<SingularityRecord> {
    let grid = spec.grid();
    let mut found: Vec<SingularityRecord> = Vec::new();
    for factor in factors {
        if factor.poly.as_constant().is_some() {
            continue;
        }
        let eval = |x: f64| factor.poly.eval_slice(&line.at(x));
        let vals: Vec<f64> = grid.par_iter().map(|&x| eval(x)).collect();
        let mut push = |location: f64, bracket: [f64; 2]| {
            found.push(SingularityRecord {
                location,
                source,
                kind: SingularityKind::Unclassified,
                evidence: Evidence {
                    factors: vec![factor.label.clone()],
                    bracket,
                    residual: eval(location).abs(),
                    f_value: 0.0,
                    f_relative: 0.0,
                    heat_capacity_denominator_relative: 0.0,
                    growth_exponent: None,
                },
            });
        };
        for k in 0..grid.len() {
            if vals[k] == 0.0 {
                push(grid[k], [grid[k], grid[k]]);
                continue;
            }
            if k + 1 < grid.len() && vals[k + 1] != 0.0 && vals[k].signum() != vals[k + 1].signum() {
                if !(vals[k].is_finite() && vals[k + 1].is_finite()) {
                    continue;
                }
                let (root, bracket) = bisect(eval, grid[k], grid[k + 1], opts.bisection_tol);
                push(root, bracket);
            }
        }
    }
    found.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut merged: Vec<SingularityRecord> = Vec::new();
    for rec in found {
        match merged.last_mut() {
            Some(prev) if (rec.location - prev.location).abs() <= opts.match_tol * prev.location.abs() => {
                for label in rec.evidence.factors {
                    if !prev.evidence.factors.contains(&label) {
                        prev.evidence.factors.push(label);
                    }
                }
            }
            _ => merged.push(rec),
        }
    }
    merged
}

const APPROACH: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

/// Local divergence rate of `|g|` at `x`, from a log-log fit on both sides.
///
/// Returns the mean of the two one-sided exponents, or `None` when a sample
/// is zero or non-finite.
pub fn growth_exponent(g: impl Fn(f64) -> f64, x: f64) -> Option<f64> {
    let mut exps = Vec::with_capacity(2);
    for side in [1.0, -1.0] {
        let mut pts = Vec::with_capacity(APPROACH.len());
        for d in APPROACH {
            let v = g(x * (1.0 + side * d)).abs();
            if !(v.is_finite() && v > 0.0) {
                return None;
            }
            pts.push((d.ln(), v.ln()));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        exps.push(-sxy / sxx);
    }
    Some(0.5 * (exps[0] + exps[1]))
}
