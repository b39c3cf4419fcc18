use crate::symbolic::{EvalPoint, GenPoly, RationalExpr, VarList};

use super::GeometryError;

/// One polynomial factor of a metric's determinant (or component denominators).
///
/// Singularities of the curvature can only sit on zeros of these factors, and
/// root-finding each factor separately is far better conditioned than working
/// with the expanded curvature denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct DenFactor {
    pub label: String,
    pub poly: GenPoly,
}

impl DenFactor {
    pub fn new(label: impl Into<String>, poly: GenPoly) -> Self {
        DenFactor { label: label.into(), poly }
    }
}

/// Symmetric `n×n` array of rational components over an ordered variable list.
#[derive(Clone, Debug)]
pub struct MetricField {
    vars: VarList,
    comps: Vec<RationalExpr>,
    factors: Option<Vec<DenFactor>>,
}

impl MetricField {
    /// Rows must be square with side `vars.len()` (1 to 3) and structurally symmetric.
    pub fn new(vars: &VarList, rows: Vec<Vec<RationalExpr>>) -> Result<Self, GeometryError> {
        let n = vars.len();
        if !(1..=3).contains(&n) {
            return Err(GeometryError::Dimension(n));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Dimension(rows.len()));
        }
        let mut comps = Vec::with_capacity(n * n);
        for row in rows {
            for c in row {
                comps.push(c.with_vars(vars)?);
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if comps[a * n + b] != comps[b * n + a] {
                    return Err(GeometryError::Asymmetric(a, b));
                }
            }
        }
        Ok(MetricField { vars: vars.clone(), comps, factors: None })
    }

    pub fn from_polys(vars: &VarList, rows: Vec<Vec<GenPoly>>) -> Result<Self, GeometryError> {
        Self::new(vars, rows.into_iter().map(|r| r.into_iter().map(RationalExpr::from).collect()).collect())
    }

    pub fn diagonal(vars: &VarList, diag: Vec<RationalExpr>) -> Result<Self, GeometryError> {
        let n = diag.len();
        let rows = (0..n)
            .map(|a| (0..n).map(|b| if a == b { diag[a].clone() } else { RationalExpr::zero(vars) }).collect())
            .collect();
        Self::new(vars, rows)
    }

    /// Attach the known factorization of the determinant's numerator.
    pub fn with_factors(mut self, factors: Vec<DenFactor>) -> Self {
        self.factors = Some(factors);
        self
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn component(&self, a: usize, b: usize) -> &RationalExpr {
        &self.comps[a * self.dim() + b]
    }

    pub fn components(&self) -> &[RationalExpr] {
        &self.comps
    }

    /// Determinant by cofactor expansion (n ≤ 3).
    pub fn det(&self) -> RationalExpr {
        let g = |a, b| self.component(a, b);
        match self.dim() {
            1 => g(0, 0).clone(),
            2 => g(0, 0).mul(g(1, 1)).sub(&g(0, 1).mul(g(1, 0))),
            _ => {
                let minor = |r0, r1, c0, c1| g(r0, c0).mul(g(r1, c1)).sub(&g(r0, c1).mul(g(r1, c0)));
                g(0, 0)
                    .mul(&minor(1, 2, 1, 2))
                    .sub(&g(0, 1).mul(&minor(1, 2, 0, 2)))
                    .add(&g(0, 2).mul(&minor(1, 2, 0, 1)))
            }
        }
    }

    /// Polynomial factors whose zeros can make the curvature singular.
    ///
    /// Uses the attached factorization when one was supplied; otherwise the
    /// determinant's numerator plus every distinct non-constant component
    /// denominator.
    pub fn det_factors(&self) -> Vec<DenFactor> {
        if let Some(f) = &self.factors {
            return f.clone();
        }
        let mut out = vec![DenFactor::new("det", self.det().num().clone())];
        let n = self.dim();
        for a in 0..n {
            for b in a..n {
                let den = self.component(a, b).den();
                if den.as_constant().is_none() && !out.iter().any(|f| &f.poly == den) {
                    out.push(DenFactor::new(format!("den[{a}{b}]"), den.clone()));
                }
            }
        }
        out.retain(|f| f.poly.as_constant().is_none());
        out
    }

    pub fn has_factor_hint(&self) -> bool {
        self.factors.is_some()
    }

    /// Metric components at a point, row-major.
    pub fn eval(&self, x: &EvalPoint) -> Result<Vec<f64>, GeometryError> {
        let values = x.to_slice(&self.vars)?;
        Ok(self.eval_slice(&values))
    }

    pub fn eval_slice(&self, values: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval_slice(values)).collect()
    }

    /// Each component with its numerator replaced by `f(numerator)`; used for negative controls.
    pub fn map_components<F>(&self, f: F) -> Result<MetricField, GeometryError>
    where
        F: Fn(usize, usize, &RationalExpr) -> RationalExpr,
    {
        let n = self.dim();
        let rows = (0..n).map(|a| (0..n).map(|b| f(a, b, self.component(a, b))).collect()).collect();
        MetricField::new(&self.vars, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_poly;

    fn sq() -> VarList {
        VarList::new(&["S", "Q"]).unwrap()
    }

    fn p(t: &str) -> RationalExpr {
        parse_poly(t, Some(&sq())).unwrap().into()
    }

    #[test]
    fn rejects_asymmetric() {
        let rows = vec![vec![p("S"), p("Q")], vec![p("S*Q"), p("1")]];
        assert_eq!(MetricField::new(&sq(), rows).unwrap_err(), GeometryError::Asymmetric(0, 1));
    }

    #[test]
    fn rejects_bad_dimension() {
        let vars = VarList::new(&["a", "b", "c", "d"]).unwrap();
        assert_eq!(MetricField::diagonal(&vars, vec![]).unwrap_err(), GeometryError::Dimension(4));
    }

    #[test]
    fn determinant_and_generic_factors() {
        let g = MetricField::new(&sq(), vec![vec![p("S^2 + Q"), p("Q")], vec![p("Q"), p("S + 1")]]).unwrap();
        let x = EvalPoint::new(&[("S", 2.0), ("Q", 3.0)]).unwrap();
        let det = g.det().eval(&x).unwrap();
        assert!((det - (7.0 * 3.0 - 9.0)).abs() < 1e-12);
        let f = g.det_factors();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].label, "det");
    }

    #[test]
    fn three_by_three_determinant() {
        let vars = VarList::new(&["S", "Q", "l"]).unwrap();
        let q = |t: &str| -> RationalExpr { parse_poly(t, Some(&vars)).unwrap().into() };
        let rows = vec![
            vec![q("2*S"), q("Q"), q("1")],
            vec![q("Q"), q("3"), q("l")],
            vec![q("1"), q("l"), q("4*S")],
        ];
        let g = MetricField::new(&vars, rows).unwrap();
        let x = EvalPoint::new(&[("S", 1.5), ("Q", 0.5), ("l", 2.0)]).unwrap();
        let m = nalgebra::Matrix3::new(3.0, 0.5, 1.0, 0.5, 3.0, 2.0, 1.0, 2.0, 6.0);
        assert!((g.det().eval(&x).unwrap() - m.determinant()).abs() < 1e-12);
    }
}
