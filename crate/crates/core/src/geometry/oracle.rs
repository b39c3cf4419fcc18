use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::symbolic::EvalPoint;

use super::metric::MetricField;
use super::GeometryError;

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Step per coordinate as a fraction of the coordinate value.
    pub rel_step: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { rel_step: 1e-4 }
    }
}

/// Scalar curvature from central differences of the *evaluated* metric.
///
/// Only numeric metric values on a stencil around `x` are used: first and
/// second derivatives of `g_ab` come from differences, the inverse from an
/// LU factorization, and the connection derivatives from
/// `∂g^{-1} = −g^{-1} (∂g) g^{-1}`.
pub fn curvature_numeric_oracle(g: &MetricField, x: &EvalPoint) -> Result<f64, GeometryError> {
    curvature_numeric_oracle_with(g, x, &OracleOptions::default())
}

pub fn curvature_numeric_oracle_with(g: &MetricField, x: &EvalPoint, opts: &OracleOptions) -> Result<f64, GeometryError> {
    let n = g.dim();
    let base = x.to_slice(g.vars())?;
    let h: Vec<f64> = base.iter().map(|v| v * opts.rel_step).collect();
    for (k, (v, step)) in base.iter().zip(&h).enumerate() {
        if v - step <= 0.0 {
            return Err(GeometryError::StencilOutOfDomain(g.vars().get(k).to_string()));
        }
    }

    // stencil offsets in units of h: center, ±e_i, and (±e_i ± e_j) for i < j
    let mut offsets: Vec<Vec<i8>> = vec![vec![0; n]];
    for i in 0..n {
        for s in [1i8, -1] {
            let mut o = vec![0; n];
            o[i] = s;
            offsets.push(o);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
                let mut o = vec![0; n];
                o[i] = si;
                o[j] = sj;
                offsets.push(o);
            }
        }
    }
    let values: Vec<Vec<f64>> = offsets
        .par_iter()
        .map(|o| {
            let pt: Vec<f64> = base.iter().zip(&h).zip(o).map(|((v, s), k)| v + f64::from(*k) * s).collect();
            g.eval_slice(&pt)
        })
        .collect();
    let lookup = |o: &[i8]| -> &Vec<f64> {
        let k = offsets.iter().position(|x| x.as_slice() == o).expect("stencil point");
        &values[k]
    };
    let unit = |pairs: &[(usize, i8)]| {
        let mut o = vec![0i8; n];
        for &(i, s) in pairs {
            o[i] = s;
        }
        o
    };

    let g0 = lookup(&unit(&[]));
    // dg[e][ab], ddg[e][f][ab]
    let mut dg = vec![vec![0.0; n * n]; n];
    let mut ddg = vec![vec![vec![0.0; n * n]; n]; n];
    for e in 0..n {
        let gp = lookup(&unit(&[(e, 1)]));
        let gm = lookup(&unit(&[(e, -1)]));
        for ab in 0..n * n {
            dg[e][ab] = (gp[ab] - gm[ab]) / (2.0 * h[e]);
            ddg[e][e][ab] = (gp[ab] - 2.0 * g0[ab] + gm[ab]) / (h[e] * h[e]);
        }
        for f in (e + 1)..n {
            let pp = lookup(&unit(&[(e, 1), (f, 1)]));
            let pm = lookup(&unit(&[(e, 1), (f, -1)]));
            let mp = lookup(&unit(&[(e, -1), (f, 1)]));
            let mm = lookup(&unit(&[(e, -1), (f, -1)]));
            for ab in 0..n * n {
                let v = (pp[ab] - pm[ab] - mp[ab] + mm[ab]) / (4.0 * h[e] * h[f]);
                ddg[e][f][ab] = v;
                ddg[f][e][ab] = v;
            }
        }
    }

    scalar_from_jet(n, g0, &dg, &ddg).ok_or_else(|| GeometryError::DegenerateMetric(format!("at {x:?}")))
}

/// Scalar curvature from the metric and its first and second derivatives at one point.
///
/// `dg[e][a·n+b] = ∂_e g_ab`, `ddg[e][f][a·n+b] = ∂_e ∂_f g_ab`. Returns `None`
/// when the metric is singular or non-finite there.
pub(crate) fn scalar_from_jet(n: usize, g0: &[f64], dg: &[Vec<f64>], ddg: &[Vec<Vec<f64>>]) -> Option<f64> {
    if g0.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let m = DMatrix::from_row_slice(n, n, g0);
    let det = m.determinant();
    let inv = match m.try_inverse() {
        Some(inv) if det != 0.0 && det.is_finite() => inv,
        _ => return None,
    };
    let gi = |a: usize, b: usize| inv[(a, b)];
    let idx = |a: usize, b: usize| a * n + b;

    // ∂_e g^{ad}
    let mut dinv = vec![vec![0.0; n * n]; n];
    for e in 0..n {
        for a in 0..n {
            for d in 0..n {
                let mut s = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        s -= gi(a, p) * dg[e][idx(p, q)] * gi(q, d);
                    }
                }
                dinv[e][idx(a, d)] = s;
            }
        }
    }

    // Γ^a_{bc} and ∂_e Γ^a_{bc}
    let g3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut gamma = vec![0.0; n * n * n];
    let mut dgamma = vec![vec![0.0; n * n * n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += gi(a, d) * (dg[b][idx(d, c)] + dg[c][idx(d, b)] - dg[d][idx(b, c)]);
                }
                gamma[g3(a, b, c)] = 0.5 * s;
                for e in 0..n {
                    let mut t = 0.0;
                    for d in 0..n {
                        let bracket = dg[b][idx(d, c)] + dg[c][idx(d, b)] - dg[d][idx(b, c)];
                        let dbracket = ddg[e][b][idx(d, c)] + ddg[e][c][idx(d, b)] - ddg[e][d][idx(b, c)];
                        t += dinv[e][idx(a, d)] * bracket + gi(a, d) * dbracket;
                    }
                    dgamma[e][g3(a, b, c)] = 0.5 * t;
                }
            }
        }
    }

    let mut r = 0.0;
    for b in 0..n {
        for c in 0..n {
            let mut ric = 0.0;
            for a in 0..n {
                ric += dgamma[a][g3(a, b, c)] - dgamma[b][g3(a, a, c)];
                for d in 0..n {
                    ric += gamma[g3(a, a, d)] * gamma[g3(d, b, c)] - gamma[g3(a, b, d)] * gamma[g3(d, a, c)];
                }
            }
            r += gi(b, c) * ric;
        }
    }
    r.is_finite().then_some(r)
}
