//! Cross-checks between independent computations of the same quantity.
//!
//! Each check returns a [`CheckResult`]; [`run_checks`] bundles them for a
//! model and sweep window. Random samples come from a seeded ChaCha stream,
//! so results are reproducible.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{coincidence_report, AnalysisError, Analyzer, SweepSpec};
use crate::geometry::{curvature_numeric_oracle, curvature_scalar, CurvatureOptions, MetricField};
use crate::models::{ruppeiner_metric, thermo_quantities, weinhold_metric, MetricKind, ThermoModel};
use crate::symbolic::{EvalPoint, Exponent, GenPoly, VarList};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult { name: name.to_string(), passed, detail }
    }
}

/// Which checks to run and how many samples to draw.
#[derive(Clone, Debug)]
pub struct CheckPlan {
    pub samples: usize,
    pub seed: u64,
    pub coincidence: bool,
}

impl Default for CheckPlan {
    fn default() -> Self {
        CheckPlan { samples: 20, seed: 0x5eed, coincidence: true }
    }
}

/// Random points: the active variable uniform on the sweep range, the others
/// within ±40% of their fixed value.
fn sample_points(spec: &SweepSpec, model: &ThermoModel, rng: &mut ChaCha8Rng, count: usize) -> Result<Vec<Vec<f64>>, AnalysisError> {
    let line = spec.line(model.vars())?;
    let active = model.vars().index_of(&spec.var).expect("validated by line");
    Ok((0..count)
        .map(|_| {
            let mut x = line.at(rng.gen_range(spec.min..spec.max));
            for (k, v) in x.iter_mut().enumerate() {
                if k != active {
                    *v *= rng.gen_range(0.6..1.4);
                }
            }
            x
        })
        .collect())
}

/// Symbolic first and second derivatives of `M` against central differences.
///
/// Step `h = 1e−5·x`; the comparison floor is `1e−3 · Σ|terms|` of the
/// symbolic derivative, so values that cancel to near zero are judged
/// against their natural scale.
pub fn check_derivatives(model: &ThermoModel, points: &[Vec<f64>]) -> CheckResult {
    let m = model.potential();
    let n = model.dim();
    let mut worst = 0.0f64;
    let mut ok = true;
    let fd = |p: &GenPoly, x: &[f64], k: usize| {
        let h = 1e-5 * x[k];
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[k] += h;
        xm[k] -= h;
        (p.eval_slice(&xp) - p.eval_slice(&xm)) / (2.0 * h)
    };
    let mut compare = |p: &GenPoly, dp: &GenPoly, x: &[f64], k: usize| {
        let sym = dp.eval_slice(x);
        let num = fd(p, x, k);
        let floor = 1e-3 * dp.eval_abs_slice(x);
        let err = (num - sym).abs() / sym.abs().max(floor).max(f64::MIN_POSITIVE);
        worst = worst.max(err);
        ok &= err <= 1e-6;
    };
    for x in points {
        for a in 0..n {
            let da = m.diff_index(a);
            compare(m, &da, x, a);
            for b in 0..n {
                compare(&da, &da.diff_index(b), x, b);
            }
        }
    }
    CheckResult::new("derivatives", ok, format!("max relative error {worst:.2e} (tolerance 1e-6)"))
}

/// Closed-form curvature against the finite-difference oracle at points where
/// no denominator factor is small.
pub fn check_curvature_oracle(analyzer: &Analyzer<'_>, kind: MetricKind, points: &[Vec<f64>]) -> Result<CheckResult, AnalysisError> {
    let curved = analyzer.curved(kind)?;
    let factors = curved.metric.det_factors();
    let vars = analyzer.model().vars();
    let mut worst = 0.0f64;
    let mut used = 0;
    for x in points {
        let clear = factors.iter().all(|f| {
            let v = f.poly.eval_slice(x).abs();
            v > 1e-2 * f.poly.eval_abs_slice(x)
        });
        if !clear {
            continue;
        }
        let sym = curved.bundle.scalar_at(x);
        let Ok(num) = curvature_numeric_oracle(&curved.metric, &EvalPoint::from_slice(vars, x)?) else {
            continue;
        };
        used += 1;
        worst = worst.max((sym - num).abs() / sym.abs().max(1e-6));
    }
    let name = format!("curvature_oracle[{kind}]");
    Ok(CheckResult::new(&name, used > 0 && worst <= 1e-4, format!("{used} points, max relative difference {worst:.2e} (tolerance 1e-4)")))
}

/// Reissner–Nordström heat capacity against its closed form (three spatial dimensions).
pub fn check_rn_heat_capacity(model: &ThermoModel, rng: &mut ChaCha8Rng) -> Result<CheckResult, AnalysisError> {
    let params = model.pmi_params().filter(|p| p.is_reissner_nordstrom() && p.n == 3);
    let Some(params) = params else {
        return Ok(CheckResult::new("rn_closed_form", true, "not a 3+1 Reissner-Nordstrom model; skipped".into()));
    };
    let q = thermo_quantities(model)?;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let s: f64 = rng.gen_range(0.5..80.0);
        let charge: f64 = rng.gen_range(0.1..3.0);
        let l = params.l;
        let mut x = vec![s, charge];
        if params.l_is_variable {
            x.push(l);
        }
        let want = 2.0 * s * (3.0 * s * s + PI * s * l * l - PI * PI * charge * charge * l * l)
            / (3.0 * s * s - PI * s * l * l + 3.0 * PI * PI * charge * charge * l * l);
        let got = q.heat_capacity.eval_slice(&x);
        worst = worst.max((got - want).abs() / want.abs());
    }
    Ok(CheckResult::new("rn_closed_form", worst < 1e-10, format!("50 points, max relative error {worst:.2e} (tolerance 1e-10)")))
}

/// Components `g_{1b}`, `b > 1`, of the GTD metric must be the empty polynomial.
pub fn check_gtd_cross_terms(analyzer: &Analyzer<'_>) -> Result<CheckResult, AnalysisError> {
    let g = analyzer.metric(MetricKind::Gtd)?;
    let vars = analyzer.model().vars();
    let offending: Vec<String> =
        (1..g.dim()).filter(|&b| !g.component(0, b).is_zero()).map(|b| format!("g_{}{}", vars.get(0), vars.get(b))).collect();
    let detail = if offending.is_empty() {
        "all cross terms with the first variable vanish identically".to_string()
    } else {
        format!("non-zero: {}", offending.join(", "))
    };
    Ok(CheckResult::new("gtd_cross_terms", offending.is_empty(), detail))
}

/// 10-point Gauss–Legendre nodes and weights on [−1, 1].
const GL_NODES: [(f64, f64); 10] = [
    (-0.9739065285171717, 0.0666713443086881),
    (-0.8650633666889845, 0.1494513491505806),
    (-0.6794095682990244, 0.219_086_362_515_982),
    (-0.4333953941292472, 0.2692667193099963),
    (-0.1488743389816312, 0.2955242247147529),
    (0.1488743389816312, 0.2955242247147529),
    (0.4333953941292472, 0.2692667193099963),
    (0.6794095682990244, 0.219_086_362_515_982),
    (0.8650633666889845, 0.1494513491505806),
    (0.9739065285171717, 0.0666713443086881),
];

/// `|∫ Σ_a I_a dE^a − ΔM|` along a piecewise-linear path, relative to `max(1, |M|)`.
pub fn first_law_residual(model: &ThermoModel, path: &[Vec<f64>]) -> f64 {
    let m = model.potential();
    let grads: Vec<GenPoly> = (0..model.dim()).map(|a| m.diff_index(a)).collect();
    let mut integral = 0.0;
    for seg in path.windows(2) {
        let (p, q) = (&seg[0], &seg[1]);
        let dx: Vec<f64> = p.iter().zip(q).map(|(a, b)| b - a).collect();
        for (t, w) in GL_NODES {
            let s = 0.5 * (t + 1.0);
            let x: Vec<f64> = p.iter().zip(&dx).map(|(a, d)| a + s * d).collect();
            let dot: f64 = grads.iter().zip(&dx).map(|(g, d)| g.eval_slice(&x) * d).sum();
            integral += 0.5 * w * dot;
        }
    }
    let m0 = m.eval_slice(&path[0]);
    let m1 = m.eval_slice(&path[path.len() - 1]);
    (integral - (m1 - m0)).abs() / m0.abs().max(m1.abs()).max(1.0)
}

pub fn check_first_law(model: &ThermoModel, points: &[Vec<f64>], rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst = 0.0f64;
    for start in points {
        // short random walk, each step within ±5% per coordinate
        let mut path = vec![start.clone()];
        for _ in 0..4 {
            let last = path.last().unwrap();
            path.push(last.iter().map(|v| v * rng.gen_range(0.95..1.05)).collect());
        }
        worst = worst.max(first_law_residual(model, &path));
    }
    CheckResult::new("first_law", worst <= 1e-8, format!("{} paths, max residual {worst:.2e} (tolerance 1e-8)", points.len()))
}

/// `T·g^R_ab = g^W_ab` pointwise.
pub fn check_ruppeiner(model: &ThermoModel, points: &[Vec<f64>]) -> Result<CheckResult, AnalysisError> {
    let w = weinhold_metric(model)?;
    let r = ruppeiner_metric(model)?;
    let t = model.potential().diff_index(0);
    let mut worst = 0.0f64;
    for x in points {
        let tv = t.eval_slice(x);
        for (gw, gr) in w.eval_slice(x).iter().zip(r.eval_slice(x)) {
            worst = worst.max((tv * gr - gw).abs() / gw.abs().max(1.0));
        }
    }
    Ok(CheckResult::new("ruppeiner_proportionality", worst <= 1e-10, format!("max residual {worst:.2e} (tolerance 1e-10)")))
}

/// The attached determinant factorization reproduces `det g` pointwise.
///
/// For GTD, `det g = f^n · Π det(blocks)`; for Weinhold, `det g = Π det(blocks)`.
pub fn check_factorization(analyzer: &Analyzer<'_>, points: &[Vec<f64>]) -> Result<CheckResult, AnalysisError> {
    let n = analyzer.model().dim() as i32;
    let mut worst = 0.0f64;
    for kind in [MetricKind::Gtd, MetricKind::Weinhold] {
        let g: MetricField = analyzer.metric(kind)?;
        let factors = g.det_factors();
        let det = g.det();
        for x in points {
            let want = det.eval_slice(x);
            let mut prod = 1.0;
            for f in &factors {
                let v = f.poly.eval_slice(x);
                prod *= if f.label == "f" { v.powi(n) } else { v };
            }
            if kind == MetricKind::Gtd && !factors.iter().any(|f| f.label == "f") {
                prod *= analyzer.quantities().conformal_factor.eval_slice(x).powi(n);
            }
            let scale = det.num().eval_abs_slice(x).max(f64::MIN_POSITIVE);
            worst = worst.max((prod - want).abs() / want.abs().max(1e-6 * scale));
        }
    }
    Ok(CheckResult::new("determinant_factors", worst <= 1e-8, format!("max relative error {worst:.2e} (tolerance 1e-8)")))
}

pub fn check_coincidence(analyzer: &Analyzer<'_>, spec: &SweepSpec) -> Result<CheckResult, AnalysisError> {
    let r = coincidence_report(analyzer, spec)?;
    let poles: Vec<String> = r.cq_poles().iter().map(|p| format!("{p:.10}")).collect();
    let detail = format!(
        "{} heat-capacity pole(s) [{}], {} unmatched physical curvature singularities",
        poles.len(),
        poles.join(", "),
        r.unmatched_physical.len()
    );
    Ok(CheckResult::new("coincidence", r.passed(), detail))
}

/// Run every check on `analyzer`'s model over the sweep window.
pub fn run_checks(analyzer: &Analyzer<'_>, spec: &SweepSpec, plan: &CheckPlan) -> Result<Vec<CheckResult>, AnalysisError> {
    let model = analyzer.model();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let points = sample_points(spec, model, &mut rng, plan.samples)?;
    let mut out = vec![
        check_derivatives(model, &points),
        check_curvature_oracle(analyzer, MetricKind::Gtd, &points)?,
    ];
    if model.dim() > 1 {
        out.push(check_curvature_oracle(analyzer, MetricKind::Weinhold, &points)?);
    }
    out.push(check_rn_heat_capacity(model, &mut rng)?);
    out.push(check_gtd_cross_terms(analyzer)?);
    out.push(check_first_law(model, &points, &mut rng));
    out.push(check_ruppeiner(model, &points)?);
    out.push(check_factorization(analyzer, &points)?);
    if plan.coincidence {
        out.push(check_coincidence(analyzer, spec)?);
    }
    Ok(out)
}

/// A random generalized polynomial in `vars` with half-integer exponents in
/// `[−2, 3]` and coefficients of magnitude in `[0.5, 2]`.
pub fn random_poly(vars: &VarList, rng: &mut ChaCha8Rng, max_terms: usize) -> GenPoly {
    let count = rng.gen_range(1..=max_terms);
    let mut p = GenPoly::zero(vars);
    for _ in 0..count {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let coeff = sign * rng.gen_range(0.5..2.0);
        let powers: Vec<(&str, Exponent)> =
            vars.iter().map(|v| (v.as_str(), Exponent::ratio(rng.gen_range(-4..=6), 2))).collect();
        p = p.add(&GenPoly::monomial(vars, coeff, &powers).expect("declared variables"));
    }
    p
}

/// Linearity, Leibniz and mixed-partial identities on `count` random
/// polynomial pairs, compared structurally. Coefficient differences are
/// judged against the largest coefficient of the summands, so exact
/// cancellations compare against their inputs' scale.
pub fn check_calculus_identities(count: usize, seed: u64) -> CheckResult {
    let vars = VarList::new(&["S", "Q", "l"]).expect("valid names");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..count {
        let p = random_poly(&vars, &mut rng, 4);
        let q = random_poly(&vars, &mut rng, 4);
        let c = rng.gen_range(-3.0..3.0);
        let a = rng.gen_range(0..vars.len());
        let b = rng.gen_range(0..vars.len());
        let (lhs, rhs, parts) = match k % 3 {
            0 => {
                let (dp, dq) = (p.diff_index(a), q.diff_index(a).scale(c));
                (p.add(&q.scale(c)).diff_index(a), dp.add(&dq), vec![dp, dq])
            }
            1 => {
                let (u, v) = (p.diff_index(a).mul(&q), p.mul(&q.diff_index(a)));
                (p.mul(&q).diff_index(a), u.add(&v), vec![u, v])
            }
            _ => (p.diff_index(a).diff_index(b), p.diff_index(b).diff_index(a), Vec::new()),
        };
        let scale = parts.iter().chain([&lhs, &rhs]).map(GenPoly::max_abs_coeff).fold(0.0, f64::max);
        let ok = lhs.sub(&rhs).terms().iter().all(|t| t.coeff().abs() <= 1e-12 * scale);
        if !ok {
            failures.push(k);
        }
    }
    let detail = format!("{} identities, {} failures{}", count, failures.len(), if failures.is_empty() { String::new() } else { format!(" (first at sample {})", failures[0]) });
    CheckResult::new("calculus_identities", failures.is_empty(), detail)
}

/// A random positive-definite metric with polynomial entries in two or three
/// variables, and a point inside the positive orthant where it is evaluated.
pub fn random_metric(rng: &mut ChaCha8Rng) -> (MetricField, Vec<f64>) {
    let dim = rng.gen_range(2..=3);
    let names = ["S", "Q", "l"];
    let vars = VarList::new(&names[..dim]).expect("valid names");
    let positive = |rng: &mut ChaCha8Rng| {
        let mut p = GenPoly::constant(&vars, rng.gen_range(0.5..2.0));
        for _ in 0..rng.gen_range(1..=2) {
            let powers: Vec<(&str, Exponent)> =
                names[..dim].iter().map(|&v| (v, Exponent::ratio(rng.gen_range(-2..=4), 2))).collect();
            p = p.add(&GenPoly::monomial(&vars, rng.gen_range(0.2..1.5), &powers).expect("declared variables"));
        }
        p
    };
    let mut rows = vec![vec![GenPoly::zero(&vars); dim]; dim];
    for a in 0..dim {
        rows[a][a] = positive(rng).scale(4.0);
    }
    for a in 0..dim {
        for b in a + 1..dim {
            if rng.gen_bool(0.5) {
                let powers: Vec<(&str, Exponent)> =
                    names[..dim].iter().map(|&v| (v, Exponent::ratio(rng.gen_range(-1..=2), 2))).collect();
                let off = GenPoly::monomial(&vars, rng.gen_range(-0.3..0.3), &powers).expect("declared variables");
                rows[a][b] = off.clone();
                rows[b][a] = off;
            }
        }
    }
    let x = (0..dim).map(|_| rng.gen_range(0.7..1.5)).collect();
    (MetricField::from_polys(&vars, rows).expect("square symmetric"), x)
}

/// Symbolic curvature against the finite-difference oracle on `count` random metrics.
pub fn check_random_metrics(count: usize, seed: u64) -> Result<CheckResult, AnalysisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut used = 0;
    while used < count {
        let (metric, x) = random_metric(&mut rng);
        let g = metric.eval_slice(&x);
        let n = metric.dim();
        let det = nalgebra::DMatrix::from_row_slice(n, n, &g).determinant();
        let diag: f64 = (0..n).map(|a| g[a * n + a]).product();
        if det <= 0.1 * diag {
            continue;
        }
        let bundle = curvature_scalar(&metric, &CurvatureOptions::default())?;
        let sym = bundle.scalar_at(&x);
        let num = curvature_numeric_oracle(&metric, &EvalPoint::from_slice(metric.vars(), &x)?)?;
        let scale = sym.abs().max(num.abs()).max(1e-6);
        worst = worst.max((sym - num).abs() / scale);
        used += 1;
    }
    Ok(CheckResult::new(
        "random_metrics",
        worst <= 1e-4,
        format!("{used} metrics, max relative difference {worst:.2e} (tolerance 1e-4)"),
    ))
}
