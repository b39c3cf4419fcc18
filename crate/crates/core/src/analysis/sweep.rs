use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::DenFactor;
use crate::symbolic::{EvalPoint, VarList};

use super::context::Analyzer;
use super::AnalysisError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(format!("unknown scale `{other}` (expected linear or log)")),
        }
    }
}

/// A one-dimensional grid through state space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
    pub fixed: EvalPoint,
}

impl SweepSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(var: &str, min: f64, max: f64, points: usize, scale: Scale, fixed: EvalPoint) -> Result<Self, AnalysisError> {
        if !(min > 0.0 && min.is_finite()) {
            return Err(AnalysisError::InvalidSweep(format!("min must be positive, got {min}")));
        }
        if !(max > min && max.is_finite()) {
            return Err(AnalysisError::InvalidSweep(format!("max must exceed min, got [{min}, {max}]")));
        }
        if points < Self::MIN_POINTS {
            return Err(AnalysisError::InvalidSweep(format!("at least {} points required, got {points}", Self::MIN_POINTS)));
        }
        if fixed.contains(var) {
            return Err(AnalysisError::InvalidSweep(format!("`{var}` is both swept and fixed")));
        }
        Ok(SweepSpec { var: var.to_string(), min, max, points, scale, fixed })
    }

    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        let mut g: Vec<f64> = (0..self.points)
            .map(|k| {
                let t = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + t * (self.max - self.min),
                    Scale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect();
        g[0] = self.min;
        g[self.points - 1] = self.max;
        g
    }

    /// Same line with twice as many intervals.
    pub fn refined(&self) -> SweepSpec {
        SweepSpec { points: 2 * self.points - 1, ..self.clone() }
    }

    pub fn line(&self, vars: &VarList) -> Result<Line, AnalysisError> {
        let active = vars
            .index_of(&self.var)
            .ok_or_else(|| AnalysisError::InvalidSweep(format!("`{}` is not a model variable", self.var)))?;
        for (name, _) in self.fixed.iter() {
            if vars.index_of(name).is_none() {
                return Err(AnalysisError::InvalidSweep(format!("fixed variable `{name}` is not a model variable")));
            }
        }
        let base = vars
            .iter()
            .enumerate()
            .map(|(k, v)| {
                if k == active {
                    Ok(1.0)
                } else {
                    self.fixed.get(v.as_str()).ok_or_else(|| AnalysisError::InvalidSweep(format!("no fixed value for `{v}`")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Line { base, active })
    }
}

/// Coordinates along a sweep, aligned with a model's variable list.
#[derive(Clone, Debug)]
pub struct Line {
    base: Vec<f64>,
    active: usize,
}

impl Line {
    pub fn at(&self, x: f64) -> Vec<f64> {
        let mut v = self.base.clone();
        v[self.active] = x;
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    T,
    Phi,
    L,
    CQ,
    RGtd,
    RW,
    RRupp,
    F,
}

impl Quantity {
    /// CSV column order.
    pub const ALL: [Quantity; 8] =
        [Quantity::T, Quantity::Phi, Quantity::L, Quantity::CQ, Quantity::RGtd, Quantity::RW, Quantity::RRupp, Quantity::F];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::T => "T",
            Quantity::Phi => "Phi",
            Quantity::L => "L",
            Quantity::CQ => "CQ",
            Quantity::RGtd => "R_gtd",
            Quantity::RW => "R_w",
            Quantity::RRupp => "R_rupp",
            Quantity::F => "f",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "T" => Quantity::T,
            "Phi" | "Phi_e" => Quantity::Phi,
            "L" => Quantity::L,
            "CQ" | "C_Q" => Quantity::CQ,
            "R_gtd" => Quantity::RGtd,
            "R_w" => Quantity::RW,
            "R_rupp" => Quantity::RRupp,
            "f" => Quantity::F,
            other => return Err(format!("unknown quantity `{other}`")),
        })
    }
}

/// Grid values per quantity; `None` marks a flagged or unavailable point.
#[derive(Clone, Debug)]
pub struct SweepTable {
    pub var: String,
    pub x: Vec<f64>,
    pub columns: Vec<(Quantity, Vec<Option<f64>>)>,
    /// Quantities flagged as pole neighborhoods at each grid point.
    pub flags: Vec<Vec<Quantity>>,
}

impl SweepTable {
    pub fn column(&self, q: Quantity) -> Option<&[Option<f64>]> {
        self.columns.iter().find(|(c, _)| *c == q).map(|(_, v)| v.as_slice())
    }

    /// Indices where `q` is flagged.
    pub fn flagged(&self, q: Quantity) -> Vec<usize> {
        (0..self.x.len()).filter(|&k| self.flags[k].contains(&q)).collect()
    }
}

/// Mark grid points at or next to a zero of any factor.
fn pole_neighborhoods(factors: &[DenFactor], line: &Line, grid: &[f64], guard: f64) -> Vec<bool> {
    let mut flagged = vec![false; grid.len()];
    for factor in factors {
        let vals: Vec<f64> = grid.par_iter().map(|&x| factor.poly.eval_slice(&line.at(x))).collect();
        let max = vals.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
        for (k, v) in vals.iter().enumerate() {
            if !v.is_finite() || v.abs() <= guard * max {
                flagged[k] = true;
            }
        }
        for k in 0..vals.len().saturating_sub(1) {
            if vals[k].signum() * vals[k + 1].signum() < 0.0 {
                flagged[k] = true;
                flagged[k + 1] = true;
            }
        }
    }
    flagged
}

/// Evaluate `quantities` on the sweep grid.
///
/// Unavailable quantities (for example `L` when `l` is a parameter) yield an
/// all-`None` column; pole neighborhoods are flagged and left empty.
pub fn sweep(analyzer: &Analyzer<'_>, quantities: &[Quantity], spec: &SweepSpec) -> Result<SweepTable, AnalysisError> {
    let line = spec.line(analyzer.model().vars())?;
    let grid = spec.grid();
    let mut flags = vec![Vec::new(); grid.len()];
    let mut columns = Vec::with_capacity(quantities.len());
    for &q in quantities {
        if !analyzer.has_quantity(q) {
            columns.push((q, vec![None; grid.len()]));
            continue;
        }
        let factors = analyzer.factors_for(q)?;
        let near_pole = pole_neighborhoods(&factors, &line, &grid, analyzer.options().pole_guard);
        let eval = analyzer.evaluator(q)?;
        let values: Vec<Option<f64>> = grid
            .par_iter()
            .zip(near_pole.par_iter())
            .map(|(&x, &flag)| {
                if flag {
                    return None;
                }
                let v = eval(&line.at(x));
                v.is_finite().then_some(v)
            })
            .collect();
        for (k, v) in values.iter().enumerate() {
            if v.is_none() {
                flags[k].push(q);
            }
        }
        columns.push((q, values));
    }
    Ok(SweepTable { var: spec.var.clone(), x: grid, columns, flags })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::analysis::AnalysisOptions;
    use crate::models::{build_custom_model, build_rn_model};

    fn fixed(pairs: &[(&str, f64)]) -> EvalPoint {
        EvalPoint::new(pairs).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new("S", 0.0, 1.0, 20, Scale::Linear, fixed(&[])).is_err());
        assert!(SweepSpec::new("S", 2.0, 1.0, 20, Scale::Linear, fixed(&[])).is_err());
        assert!(SweepSpec::new("S", 1.0, 2.0, 15, Scale::Linear, fixed(&[])).is_err());
        assert!(SweepSpec::new("S", 1.0, 2.0, 16, Scale::Log, fixed(&[("S", 1.0)])).is_err());
    }

    #[test]
    fn grids_hit_endpoints() {
        let s = SweepSpec::new("S", 0.5, 10.0, 16, Scale::Log, fixed(&[])).unwrap();
        let g = s.grid();
        assert_eq!((g[0], g[15]), (0.5, 10.0));
        let ratios: Vec<f64> = g.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 1e-12));
        let r = s.refined();
        assert_eq!(r.points, 31);
        assert_eq!(r.grid()[2], g[1]);
    }

    #[test]
    fn conformal_factor_of_quadratic() {
        let m = build_custom_model(&["S", "Q"], "S^2 + Q^2").unwrap();
        let a = Analyzer::new(&m, AnalysisOptions::default()).unwrap();
        let spec = SweepSpec::new("S", 1.0, 2.0, 32, Scale::Linear, fixed(&[("Q", 1.0)])).unwrap();
        let t = sweep(&a, &[Quantity::F], &spec).unwrap();
        for (x, v) in t.x.iter().zip(t.column(Quantity::F).unwrap()) {
            assert!((v.unwrap() - (2.0 * x * x + 2.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn rn_heat_capacity_flags_two_neighborhoods() {
        let m = build_rn_model(3, 8.0, false).unwrap();
        let a = Analyzer::new(&m, AnalysisOptions::default()).unwrap();
        let spec = SweepSpec::new("S", 5.0, 60.0, 400, Scale::Linear, fixed(&[("Q", 1.0)])).unwrap();
        let t = sweep(&a, &[Quantity::CQ, Quantity::L], &spec).unwrap();
        let idx = t.flagged(Quantity::CQ);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for k in idx {
            match groups.last_mut() {
                Some(g) if *g.last().unwrap() + 1 == k => g.push(k),
                _ => groups.push(vec![k]),
            }
        }
        assert_eq!(groups.len(), 2);
        let (l, q) = (8.0, 1.0);
        let disc = (PI * l * l).powi(2) - 36.0 * PI * PI * q * q * l * l;
        let roots = [(PI * l * l - disc.sqrt()) / 6.0, (PI * l * l + disc.sqrt()) / 6.0];
        for (g, r) in groups.iter().zip(roots) {
            assert!(t.x[g[0]] <= r && r <= t.x[*g.last().unwrap()]);
        }
        assert!(t.column(Quantity::L).unwrap().iter().all(Option::is_none));
    }

    #[test]
    fn flat_one_dimensional_model() {
        let m = build_custom_model(&["S"], "S^2").unwrap();
        let a = Analyzer::new(&m, AnalysisOptions::default()).unwrap();
        let spec = SweepSpec::new("S", 0.5, 3.0, 40, Scale::Linear, fixed(&[])).unwrap();
        let t = sweep(&a, &[Quantity::RGtd, Quantity::CQ], &spec).unwrap();
        assert!(t.column(Quantity::RGtd).unwrap().iter().all(|v| v.unwrap().abs() < 1e-9));
        for (x, v) in t.x.iter().zip(t.column(Quantity::CQ).unwrap()) {
            assert!((v.unwrap() - x).abs() < 1e-14);
        }
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
        assert!("R".parse::<Quantity>().is_err());
    }
}
