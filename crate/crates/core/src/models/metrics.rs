use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{DenFactor, MetricField};
use crate::symbolic::{GenPoly, RationalExpr};

use super::{ModelError, ThermoModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Gtd,
    Weinhold,
    Ruppeiner,
}

impl MetricKind {
    pub fn build(self, model: &ThermoModel) -> Result<MetricField, ModelError> {
        match self {
            MetricKind::Gtd => gtd_metric(model),
            MetricKind::Weinhold => weinhold_metric(model),
            MetricKind::Ruppeiner => ruppeiner_metric(model),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Gtd => "gtd",
            MetricKind::Weinhold => "weinhold",
            MetricKind::Ruppeiner => "ruppeiner",
        })
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gtd" => Ok(MetricKind::Gtd),
            "weinhold" => Ok(MetricKind::Weinhold),
            "ruppeiner" => Ok(MetricKind::Ruppeiner),
            other => Err(format!("unknown metric `{other}` (expected gtd, weinhold or ruppeiner)")),
        }
    }
}

/// `diag(−1, 1, …, 1)`
pub fn default_eta(n: usize) -> Vec<f64> {
    (0..n).map(|a| if a == 0 { -1.0 } else { 1.0 }).collect()
}

/// Weinhold metric, `g_ab = ∂_a ∂_b M`.
pub fn weinhold_metric(model: &ThermoModel) -> Result<MetricField, ModelError> {
    let n = model.dim();
    let h = model.hessian();
    let factors = block_factors(&h, n, model);
    let rows = (0..n).map(|a| h[a * n..(a + 1) * n].to_vec()).collect();
    Ok(MetricField::from_polys(model.vars(), rows)?.with_factors(factors))
}

/// Ruppeiner metric in energy representation, Weinhold divided by the temperature.
pub fn ruppeiner_metric(model: &ThermoModel) -> Result<MetricField, ModelError> {
    let n = model.dim();
    let h = model.hessian();
    let t = model.potential().diff_index(0);
    if t.is_zero() {
        return Err(ModelError::InvalidParameter("temperature vanishes identically".into()));
    }
    let mut factors = block_factors(&h, n, model);
    if t.as_constant().is_none() {
        factors.push(DenFactor::new("T", t.clone()));
    }
    let rows = (0..n)
        .map(|a| (0..n).map(|b| RationalExpr::new(h[a * n + b].clone(), t.clone())).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricField::new(model.vars(), rows)?.with_factors(factors))
}

/// Quevedo's Legendre-invariant metric with the default signature.
pub fn gtd_metric(model: &ThermoModel) -> Result<MetricField, ModelError> {
    gtd_metric_with_eta(model, &default_eta(model.dim()))
}

/// `g_ad = f · (η_a M_{,ad} + η_d M_{,da}) / 2` with `f = Σ E^c M_{,c}` and `η` diagonal.
///
/// The kernel is formed from the same Hessian polynomials in both orders, so
/// off-diagonal entries cancel exactly whenever `η_a = −η_d`.
pub fn gtd_metric_with_eta(model: &ThermoModel, eta: &[f64]) -> Result<MetricField, ModelError> {
    let n = model.dim();
    if eta.len() != n {
        return Err(ModelError::InvalidParameter(format!("eta has {} entries for {n} variables", eta.len())));
    }
    let h = model.hessian();
    let f = model.potential().euler();
    let mut kernel = vec![GenPoly::zero(model.vars()); n * n];
    for a in 0..n {
        for d in 0..n {
            kernel[a * n + d] = h[a * n + d].scale(eta[a]).add(&h[d * n + a].scale(eta[d])).scale(0.5);
        }
    }
    let mut factors = Vec::new();
    if f.as_constant().is_none() {
        factors.push(DenFactor::new("f", f.clone()));
    }
    factors.extend(block_factors(&kernel, n, model));
    let rows = (0..n).map(|a| (0..n).map(|d| f.mul(&kernel[a * n + d])).collect()).collect();
    Ok(MetricField::from_polys(model.vars(), rows)?.with_factors(factors))
}

/// Determinants of the connected diagonal blocks of a symmetric matrix of polynomials.
fn block_factors(m: &[GenPoly], n: usize, model: &ThermoModel) -> Vec<DenFactor> {
    let mut block_of: Vec<usize> = (0..n).collect();
    for a in 0..n {
        for b in (a + 1)..n {
            if !m[a * n + b].is_zero() {
                let (ra, rb) = (block_of[a], block_of[b]);
                for x in block_of.iter_mut() {
                    if *x == rb {
                        *x = ra;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for a in 0..n {
        let root = block_of[a];
        if seen.contains(&root) {
            continue;
        }
        seen.push(root);
        let idx: Vec<usize> = (0..n).filter(|&b| block_of[b] == root).collect();
        let det = sub_det(m, n, &idx);
        if det.is_zero() || det.as_constant().is_some() {
            continue;
        }
        let names: Vec<&str> = idx.iter().map(|&k| model.vars().get(k).as_str()).collect();
        out.push(DenFactor::new(format!("det[{}]", names.join(",")), det));
    }
    out
}

fn sub_det(m: &[GenPoly], n: usize, idx: &[usize]) -> GenPoly {
    let e = |i: usize, j: usize| &m[idx[i] * n + idx[j]];
    match idx.len() {
        1 => e(0, 0).clone(),
        2 => e(0, 0).mul(e(1, 1)).sub(&e(0, 1).mul(e(1, 0))),
        _ => {
            let minor = |r: usize, c: usize| {
                let rs: Vec<usize> = (0..3).filter(|&k| k != r).collect();
                let cs: Vec<usize> = (0..3).filter(|&k| k != c).collect();
                e(rs[0], cs[0]).mul(e(rs[1], cs[1])).sub(&e(rs[0], cs[1]).mul(e(rs[1], cs[0])))
            };
            e(0, 0).mul(&minor(0, 0)).sub(&e(0, 1).mul(&minor(0, 1))).add(&e(0, 2).mul(&minor(0, 2)))
        }
    }
}
