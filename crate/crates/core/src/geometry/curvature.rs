use crate::symbolic::{GenPoly, RationalExpr, VarList};

use super::metric::{DenFactor, MetricField};
use super::oracle::scalar_from_jet;
use super::{guard, GeometryError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureOptions {
    /// Per-polynomial term cap; exceeding it aborts with `ExpressionBlowup`.
    pub max_terms: usize,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        CurvatureOptions { max_terms: 200_000 }
    }
}

/// Rational arithmetic that memoizes denominator products and derivatives.
///
/// Every Christoffel symbol shares the determinant as denominator, so the
/// same `den·den` and `∂den` would otherwise be recomputed for each entry.
struct Algebra {
    limit: usize,
    products: Vec<(GenPoly, GenPoly, GenPoly)>,
    derivs: Vec<(GenPoly, usize, GenPoly)>,
}

impl Algebra {
    fn new(limit: usize) -> Self {
        Algebra { limit, products: Vec::new(), derivs: Vec::new() }
    }

    fn den_product(&mut self, a: &GenPoly, b: &GenPoly) -> GenPoly {
        if let Some((_, _, p)) = self.products.iter().find(|(x, y, _)| (x == a && y == b) || (x == b && y == a)) {
            return p.clone();
        }
        let p = a.mul(b);
        self.products.push((a.clone(), b.clone(), p.clone()));
        p
    }

    fn den_deriv(&mut self, d: &GenPoly, k: usize) -> GenPoly {
        if let Some((_, _, p)) = self.derivs.iter().find(|(x, j, _)| *j == k && x == d) {
            return p.clone();
        }
        let p = d.diff_index(k);
        self.derivs.push((d.clone(), k, p.clone()));
        p
    }

    fn checked(&self, r: RationalExpr) -> Result<RationalExpr, GeometryError> {
        guard(&r, self.limit)?;
        Ok(r)
    }

    fn add(&self, x: &RationalExpr, y: &RationalExpr) -> Result<RationalExpr, GeometryError> {
        self.checked(x.add(y))
    }

    fn sub(&self, x: &RationalExpr, y: &RationalExpr) -> Result<RationalExpr, GeometryError> {
        self.checked(x.sub(y))
    }

    fn mul(&mut self, x: &RationalExpr, y: &RationalExpr) -> Result<RationalExpr, GeometryError> {
        if x.is_zero() || y.is_zero() || x.is_poly() || y.is_poly() {
            return self.checked(x.mul(y));
        }
        let den = self.den_product(x.den(), y.den());
        self.checked(RationalExpr::new(x.num().mul(y.num()), den)?)
    }

    fn diff(&mut self, x: &RationalExpr, k: usize) -> Result<RationalExpr, GeometryError> {
        if x.is_poly() {
            return Ok(RationalExpr::from(x.num().diff_index(k)));
        }
        let dn = x.num().diff_index(k);
        let dd = self.den_deriv(x.den(), k);
        if dd.is_zero() {
            return self.checked(RationalExpr::new(dn, x.den().clone())?);
        }
        let num = dn.mul(x.den()).sub(&x.num().mul(&dd));
        let den = self.den_product(x.den(), x.den());
        self.checked(RationalExpr::new(num, den)?)
    }
}

/// Adjugate over determinant; every entry carries the determinant's numerator
/// as its denominator. Fails only when the determinant is identically zero.
pub fn metric_inverse(g: &MetricField) -> Result<Vec<RationalExpr>, GeometryError> {
    let n = g.dim();
    let det = g.det();
    if det.is_zero() {
        return Err(GeometryError::DegenerateMetric("everywhere (determinant is identically zero)".into()));
    }
    let c = |a, b| g.component(a, b);
    let cof: Vec<RationalExpr> = match n {
        1 => vec![RationalExpr::constant(g.vars(), 1.0)],
        2 => vec![c(1, 1).clone(), c(0, 1).neg(), c(1, 0).neg(), c(0, 0).clone()],
        _ => {
            let minor = |r0, r1, c0, c1| c(r0, c0).mul(c(r1, c1)).sub(&c(r0, c1).mul(c(r1, c0)));
            let mut out = Vec::with_capacity(9);
            for a in 0..3 {
                for b in 0..3 {
                    // adj[a][b] = (-1)^(a+b) · minor with row b and column a removed
                    let rows: Vec<usize> = (0..3).filter(|&r| r != b).collect();
                    let cols: Vec<usize> = (0..3).filter(|&k| k != a).collect();
                    let m = minor(rows[0], rows[1], cols[0], cols[1]);
                    out.push(if (a + b) % 2 == 0 { m } else { m.neg() });
                }
            }
            out
        }
    };
    cof.iter().map(|e| Ok(e.div(&det)?)).collect()
}

/// Levi-Civita connection `Γ^a_{bc}`, stored densely and symmetric in `(b, c)`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    n: usize,
    data: Vec<RationalExpr>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &RationalExpr {
        &self.data[(a * self.n + b) * self.n + c]
    }
}

fn christoffel_with(
    g: &MetricField,
    inverse: &[RationalExpr],
    alg: &mut Algebra,
) -> Result<Christoffel, GeometryError> {
    let n = g.dim();
    // dg[(e*n + i)*n + j] = ∂_e g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for e in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg.push(alg.diff(g.component(i, j), e)?);
            }
        }
    }
    let d = |e: usize, i: usize, j: usize| &dg[(e * n + i) * n + j];
    let mut data = vec![RationalExpr::zero(g.vars()); n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let mut acc = RationalExpr::zero(g.vars());
                for k in 0..n {
                    let bracket = alg.sub(&alg.add(d(b, k, c), d(c, k, b))?, d(k, b, c))?;
                    if bracket.is_zero() {
                        continue;
                    }
                    let term = alg.mul(&inverse[a * n + k], &bracket)?;
                    acc = alg.add(&acc, &term)?;
                }
                let gamma = acc.scale(0.5);
                data[(a * n + c) * n + b] = gamma.clone();
                data[(a * n + b) * n + c] = gamma;
            }
        }
    }
    Ok(Christoffel { n, data })
}

/// `Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{db} − ∂_d g_{bc})`.
pub fn christoffel(g: &MetricField) -> Result<Christoffel, GeometryError> {
    let inverse = metric_inverse(g)?;
    let mut alg = Algebra::new(CurvatureOptions::default().max_terms);
    christoffel_with(g, &inverse, &mut alg)
}

/// Everything the curvature pipeline produced, kept for inspection and tests.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    vars: VarList,
    pub inverse: Vec<RationalExpr>,
    pub christoffel: Christoffel,
    pub ricci: Vec<RationalExpr>,
    pub scalar: RationalExpr,
    /// Polynomial factors the scalar's denominator is built from.
    pub factors: Vec<DenFactor>,
    jet: MetricJet,
}

/// Exact first and second derivatives of the metric components.
#[derive(Clone, Debug)]
struct MetricJet {
    n: usize,
    g: Vec<RationalExpr>,
    /// `[e][ab]`
    dg: Vec<Vec<RationalExpr>>,
    /// `[e][f][ab]`, symmetric in `(e, f)`
    ddg: Vec<Vec<Vec<RationalExpr>>>,
}

impl MetricJet {
    fn new(g: &MetricField) -> Self {
        let n = g.dim();
        let name = |k: usize| g.vars().get(k).as_str().to_string();
        let comps = g.components().to_vec();
        let dg: Vec<Vec<RationalExpr>> = (0..n).map(|e| comps.iter().map(|c| c.diff(&name(e))).collect()).collect();
        let mut ddg = vec![vec![Vec::new(); n]; n];
        for e in 0..n {
            for f in e..n {
                let d: Vec<RationalExpr> = dg[e].iter().map(|c| c.diff(&name(f))).collect();
                ddg[f][e] = d.clone();
                ddg[e][f] = d;
            }
        }
        MetricJet { n, g: comps, dg, ddg }
    }

    fn scalar_at(&self, x: &[f64]) -> Option<f64> {
        let ev = |v: &[RationalExpr]| v.iter().map(|c| c.eval_slice(x)).collect::<Vec<f64>>();
        let g0 = ev(&self.g);
        let dg: Vec<Vec<f64>> = self.dg.iter().map(|d| ev(d)).collect();
        let ddg: Vec<Vec<Vec<f64>>> = self.ddg.iter().map(|row| row.iter().map(|d| ev(d)).collect()).collect();
        scalar_from_jet(self.n, &g0, &dg, &ddg)
    }
}

impl CurvatureBundle {
    pub fn dim(&self) -> usize {
        self.christoffel.n
    }

    /// `R` at a point given in variable-list order.
    ///
    /// Uses the closed form when its rounding-error bound is below `1e−9`
    /// and otherwise assembles `R` from exact metric derivatives evaluated at
    /// the point, which stays accurate next to zeros of the denominator where
    /// the expanded closed form cancels catastrophically. `NaN` on a singular metric.
    pub fn scalar_at(&self, x: &[f64]) -> f64 {
        let (v, err) = self.scalar.eval_slice_with_error(x);
        if v.is_finite() && err <= 1e-9 {
            return v;
        }
        self.pointwise_scalar(x)
    }

    /// `R` from the metric jet alone, bypassing the closed form.
    pub fn pointwise_scalar(&self, x: &[f64]) -> f64 {
        self.jet.scalar_at(x).unwrap_or(f64::NAN)
    }

    pub fn ricci_at(&self, b: usize, c: usize) -> &RationalExpr {
        &self.ricci[b * self.dim() + c]
    }

    /// `R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} − Γ^a_{de} Γ^e_{cb}`.
    pub fn riemann_up(&self, a: usize, b: usize, c: usize, d: usize) -> RationalExpr {
        let cname = self.vars.get(c).as_str();
        let dname = self.vars.get(d).as_str();
        let g = &self.christoffel;
        let mut out = g.get(a, d, b).diff(cname).sub(&g.get(a, c, b).diff(dname));
        for e in 0..self.dim() {
            out = out.add(&g.get(a, c, e).mul(g.get(e, d, b))).sub(&g.get(a, d, e).mul(g.get(e, c, b)));
        }
        out
    }
}

/// Scalar curvature `R = g^{bc}(∂_a Γ^a_{bc} − ∂_b Γ^a_{ac} + Γ^a_{ad}Γ^d_{bc} − Γ^a_{bd}Γ^d_{ac})`,
/// returned unreduced together with its denominator factors.
pub fn curvature_scalar(g: &MetricField, opts: &CurvatureOptions) -> Result<CurvatureBundle, GeometryError> {
    let n = g.dim();
    let mut alg = Algebra::new(opts.max_terms);
    let inverse = metric_inverse(g)?;
    for e in &inverse {
        guard(e, opts.max_terms)?;
    }
    let gamma = christoffel_with(g, &inverse, &mut alg)?;
    let zero = RationalExpr::zero(g.vars());

    // contracted connection V_c = Γ^a_{ac}
    let mut trace = Vec::with_capacity(n);
    for c in 0..n {
        let mut acc = zero.clone();
        for a in 0..n {
            acc = alg.add(&acc, gamma.get(a, a, c))?;
        }
        trace.push(acc);
    }

    let mut ricci = vec![zero.clone(); n * n];
    for b in 0..n {
        for c in b..n {
            let mut acc = zero.clone();
            for a in 0..n {
                let t = alg.diff(gamma.get(a, b, c), a)?;
                acc = alg.add(&acc, &t)?;
            }
            let t = alg.diff(&trace[c], b)?;
            acc = alg.sub(&acc, &t)?;
            for d in 0..n {
                let t = alg.mul(&trace[d], gamma.get(d, b, c))?;
                acc = alg.add(&acc, &t)?;
                for a in 0..n {
                    let t = alg.mul(gamma.get(a, b, d), gamma.get(d, a, c))?;
                    acc = alg.sub(&acc, &t)?;
                }
            }
            ricci[c * n + b] = acc.clone();
            ricci[b * n + c] = acc;
        }
    }

    let mut scalar = zero;
    for b in 0..n {
        for c in b..n {
            let mut t = alg.mul(&inverse[b * n + c], &ricci[b * n + c])?;
            if b != c {
                t = t.scale(2.0);
            }
            scalar = alg.add(&scalar, &t)?;
        }
    }

    Ok(CurvatureBundle {
        vars: g.vars().clone(),
        inverse,
        christoffel: gamma,
        ricci,
        scalar,
        factors: g.det_factors(),
        jet: MetricJet::new(g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{parse_poly, EvalPoint};

    fn sq() -> VarList {
        VarList::new(&["S", "Q"]).unwrap()
    }

    fn p(t: &str) -> RationalExpr {
        parse_poly(t, Some(&sq())).unwrap().into()
    }

    fn half_plane() -> MetricField {
        MetricField::diagonal(&sq(), vec![p("S^(-2)"), p("S^(-2)")]).unwrap()
    }

    #[test]
    fn diagonal_inverse() {
        let g = MetricField::diagonal(&sq(), vec![p("S + Q"), p("2*S^2 + 1")]).unwrap();
        let inv = metric_inverse(&g).unwrap();
        let x = EvalPoint::new(&[("S", 1.5), ("Q", 0.5)]).unwrap();
        assert!((inv[0].eval(&x).unwrap() - 0.5).abs() < 1e-14);
        assert!((inv[3].eval(&x).unwrap() - 1.0 / 5.5).abs() < 1e-14);
        assert!(inv[1].is_zero() && inv[2].is_zero());
    }

    #[test]
    fn two_by_two_adjugate() {
        let g = MetricField::new(&sq(), vec![vec![p("S + 2"), p("Q")], vec![p("Q"), p("S*Q + 1")]]).unwrap();
        let inv = metric_inverse(&g).unwrap();
        let x = EvalPoint::new(&[("S", 2.0), ("Q", 0.5)]).unwrap();
        let (a, b, c) = (4.0, 2.0, 0.5);
        let det = a * b - c * c;
        let expect = [b / det, -c / det, -c / det, a / det];
        for (e, want) in inv.iter().zip(expect) {
            assert!((e.eval(&x).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_everywhere_is_an_error() {
        let g = MetricField::new(&sq(), vec![vec![p("S"), p("S")], vec![p("S"), p("S")]]).unwrap();
        assert!(matches!(metric_inverse(&g), Err(GeometryError::DegenerateMetric(_))));
    }

    #[test]
    fn half_plane_christoffels() {
        let gamma = christoffel(&half_plane()).unwrap();
        let x = EvalPoint::new(&[("S", 2.0), ("Q", 1.0)]).unwrap();
        let at = |a, b, c| gamma.get(a, b, c).eval(&x).unwrap();
        assert!((at(0, 0, 0) + 0.5).abs() < 1e-14);
        assert!((at(0, 1, 1) - 0.5).abs() < 1e-14);
        assert!((at(1, 0, 1) + 0.5).abs() < 1e-14);
        assert!((at(1, 1, 0) + 0.5).abs() < 1e-14);
        assert!(at(1, 0, 0).abs() < 1e-14 && at(0, 0, 1).abs() < 1e-14);
    }

    #[test]
    fn half_plane_scalar_is_minus_two() {
        let b = curvature_scalar(&half_plane(), &CurvatureOptions::default()).unwrap();
        for s in [0.3, 1.0, 2.0, 7.5] {
            let x = EvalPoint::new(&[("S", s), ("Q", 1.3)]).unwrap();
            assert!((b.scalar.eval(&x).unwrap() + 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_metric_is_flat() {
        let g = MetricField::new(&sq(), vec![vec![p("2"), p("0.5")], vec![p("0.5"), p("3")]]).unwrap();
        let b = curvature_scalar(&g, &CurvatureOptions::default()).unwrap();
        assert!(b.scalar.is_zero());
        let gamma = &b.christoffel;
        assert!((0..2).all(|a| (0..2).all(|i| (0..2).all(|j| gamma.get(a, i, j).is_zero()))));
    }

    #[test]
    fn one_dimensional_metric_is_flat() {
        let vars = VarList::new(&["S"]).unwrap();
        let g = MetricField::diagonal(&vars, vec![parse_poly("S^3 + 2*S", Some(&vars)).unwrap().into()]).unwrap();
        let b = curvature_scalar(&g, &CurvatureOptions::default()).unwrap();
        let x = EvalPoint::new(&[("S", 1.7)]).unwrap();
        assert!(b.scalar.eval(&x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn blowup_is_reported() {
        let g = MetricField::new(
            &sq(),
            vec![vec![p("S^2 + Q + S*Q^3 + 1"), p("Q^(1/3) + S^(2/7)")], vec![p("Q^(1/3) + S^(2/7)"), p("S^(1/5)*Q + Q^2 + 3")]],
        )
        .unwrap();
        let err = curvature_scalar(&g, &CurvatureOptions { max_terms: 50 }).unwrap_err();
        assert!(matches!(err, GeometryError::ExpressionBlowup { limit: 50, .. }));
    }

    #[test]
    fn pointwise_scalar_matches_closed_form() {
        let g = MetricField::new(&sq(), vec![vec![p("S^2 + Q"), p("0.1*S*Q")], vec![p("0.1*S*Q"), p("Q^2 + 2*S")]]).unwrap();
        let b = curvature_scalar(&g, &CurvatureOptions::default()).unwrap();
        for x in [[1.2, 0.7], [3.0, 2.0], [0.4, 5.0]] {
            let closed = b.scalar.eval_slice(&x);
            assert!((b.pointwise_scalar(&x) - closed).abs() < 1e-10 * closed.abs().max(1.0));
            assert_eq!(b.scalar_at(&x), closed);
        }
        let h = curvature_scalar(&half_plane(), &CurvatureOptions::default()).unwrap();
        assert!((h.pointwise_scalar(&[2.5, 1.0]) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_at_survives_cancelling_denominator() {
        // g = φ·δ with φ = (S − 1)^3 expanded; exactly R = 3 / (S − 1)^5
        let phi = p("S^3 - 3*S^2 + 3*S - 1");
        let g = MetricField::diagonal(&sq(), vec![phi.clone(), phi]).unwrap();
        let b = curvature_scalar(&g, &CurvatureOptions::default()).unwrap();
        for d in [1e-2f64, 1e-3] {
            let x = [1.0 + d, 1.0];
            let want = 3.0 / d.powi(5);
            assert!((b.scalar_at(&x) - want).abs() <= 1e-5 * want, "{} vs {want}", b.scalar_at(&x));
        }
    }

    #[test]
    fn two_dimensional_riemann_identity() {
        // R · det g = 2 R_{1212} with R_{1212} = g_{1a} R^a_{212}
        let g = MetricField::new(&sq(), vec![vec![p("S^2 + Q"), p("0.1*S*Q")], vec![p("0.1*S*Q"), p("Q^2 + 2*S")]]).unwrap();
        let b = curvature_scalar(&g, &CurvatureOptions::default()).unwrap();
        let lowered = g.component(0, 0).mul(&b.riemann_up(0, 1, 0, 1)).add(&g.component(0, 1).mul(&b.riemann_up(1, 1, 0, 1)));
        let x = EvalPoint::new(&[("S", 1.2), ("Q", 0.7)]).unwrap();
        let lhs = b.scalar.eval(&x).unwrap() * g.det().eval(&x).unwrap();
        let rhs = 2.0 * lowered.eval(&x).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
    }
}
