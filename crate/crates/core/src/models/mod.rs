//! Thermodynamic systems and everything derived from their fundamental equation.

mod horizon;
mod metrics;
mod quantities;

pub use horizon::{entropy_from_horizon, horizon_radius_from_entropy, mass_from_horizon, omega};
pub use metrics::{default_eta, gtd_metric, gtd_metric_with_eta, ruppeiner_metric, weinhold_metric, MetricKind};
pub use quantities::{thermo_quantities, ThermoQuantities};

use std::f64::consts::PI;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::symbolic::{parse_poly, Exponent, GenPoly, SymbolicError, VarList};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("entropy must be positive, got {0}")]
    NonPositiveEntropy(f64),
    #[error("heat capacity undefined: second entropy derivative of the potential vanishes identically")]
    UndefinedHeatCapacity,
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Parameters of the power-Maxwell-invariant black hole in `n + 1` dimensions.
///
/// The nonlinearity exponent `s` is carried as `i = 2s − 1`, which must be a
/// positive integer; `s = 1` (`i = 1`) is Reissner–Nordström.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmiParams {
    pub n: u32,
    pub i: u32,
    /// AdS radius; the default coordinate value when `l` is itself a variable.
    pub l: f64,
    pub l_is_variable: bool,
}

impl PmiParams {
    pub fn new(n: u32, i: u32, l: f64, l_is_variable: bool) -> Result<Self, ModelError> {
        if n < 3 {
            return Err(ModelError::InvalidParameter(format!("n must be at least 3, got {n}")));
        }
        if i < 1 {
            return Err(ModelError::InvalidParameter("2s - 1 must be a positive integer".into()));
        }
        if n == i + 1 {
            return Err(ModelError::InvalidParameter(format!(
                "n = {n} and s = {} violate n != 2s (equivalently n != i + 1 with i = 2s - 1)",
                Self::s_of(i)
            )));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("l must be positive, got {l}")));
        }
        Ok(PmiParams { n, i, l, l_is_variable })
    }

    fn s_of(i: u32) -> f64 {
        f64::from(i + 1) / 2.0
    }

    pub fn s(&self) -> f64 {
        Self::s_of(self.i)
    }

    pub fn omega(&self) -> f64 {
        omega(self.n)
    }

    pub fn is_reissner_nordstrom(&self) -> bool {
        self.i == 1
    }

    /// `(n − 1) ω / (16π)`
    pub(crate) fn prefactor(&self) -> f64 {
        f64::from(self.n - 1) * self.omega() / (16.0 * PI)
    }

    /// `(2s−1)^{2−2s} (n−1)^{s−1} (2s−n)^{2s−1} / (n−2)^s`
    pub(crate) fn charge_term_constant(&self) -> f64 {
        let (n, i) = (f64::from(self.n), self.i as i32);
        let s = self.s();
        f64::from(self.i).powi(1 - i) * (n - 1.0).powf(s - 1.0) * (f64::from(self.i + 1) - n).powi(i) / (n - 2.0).powf(s)
    }

    /// Coefficient `c` in `q = c · Q^{1/(2s−1)}` (sign included).
    pub(crate) fn charge_coefficient(&self) -> f64 {
        let (n, i) = (f64::from(self.n), f64::from(self.i));
        let s = self.s();
        (8.0 * PI / (2f64.sqrt() * s * self.omega())).powf(1.0 / i) * ((n - 2.0) / (n - 1.0)).sqrt() * i.powf((i - 1.0) / i)
            / (n - 2.0 * s)
    }

    /// Exponents of `S` in the three terms of the mass, followed by the `Q` exponent of the charge term.
    pub fn exponents(&self) -> [Exponent; 4] {
        let (n, i) = (i64::from(self.n), i64::from(self.i));
        [
            Exponent::Rational(Rational64::new(n - 2, n - 1)),
            Exponent::Rational(Rational64::new(n, n - 1)),
            Exponent::Rational(Rational64::new(i + 1 - n, (n - 1) * i)),
            Exponent::Rational(Rational64::new(i + 1, i)),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelKind {
    Pmi(PmiParams),
    Custom { potential: String },
}

/// A fundamental equation `M(E^a)` over an ordered set of extensive variables.
///
/// The first variable plays the role of the entropy: it carries the negative
/// sign of the GTD metric and defines the temperature and heat capacity.
#[derive(Clone, Debug)]
pub struct ThermoModel {
    vars: VarList,
    potential: GenPoly,
    kind: ModelKind,
}

impl ThermoModel {
    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn potential(&self) -> &GenPoly {
        &self.potential
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn pmi_params(&self) -> Option<&PmiParams> {
        match &self.kind {
            ModelKind::Pmi(p) => Some(p),
            ModelKind::Custom { .. } => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Full Hessian, row-major; the lower triangle shares the upper triangle's polynomials.
    pub fn hessian(&self) -> Vec<GenPoly> {
        let n = self.dim();
        let grad: Vec<GenPoly> = (0..n).map(|a| self.potential.diff_index(a)).collect();
        let mut h = vec![GenPoly::zero(&self.vars); n * n];
        for a in 0..n {
            for b in a..n {
                let d = grad[a].diff_index(b);
                h[b * n + a] = d.clone();
                h[a * n + b] = d;
            }
        }
        h
    }

    /// The same system with `name` rescaled, `M'(…, u, …) = M(…, λu, …)`.
    pub fn rescaled(&self, name: &str, lambda: f64) -> ThermoModel {
        ThermoModel {
            vars: self.vars.clone(),
            potential: self.potential.rescale_var(name, lambda),
            kind: ModelKind::Custom { potential: format!("rescaled({name}, {lambda})") },
        }
    }

    pub fn summary(&self) -> String {
        match &self.kind {
            ModelKind::Pmi(p) if p.is_reissner_nordstrom() => {
                format!("Reissner-Nordstrom-AdS, n = {}, l = {}{}", p.n, p.l, if p.l_is_variable { " (variable)" } else { "" })
            }
            ModelKind::Pmi(p) => format!(
                "PMI black hole, n = {}, s = {}/2, l = {}{}",
                p.n,
                p.i + 1,
                p.l,
                if p.l_is_variable { " (variable)" } else { "" }
            ),
            ModelKind::Custom { potential } => format!("custom potential {potential} over ({})", self.vars.names().join(", ")),
        }
    }
}

/// The PMI mass `M(S, Q[, l])` assembled from its general closed form.
///
/// The charge variable is the physical charge `Q`: the auxiliary `q` of the
/// lapse function is substituted, so the charge term scales as
/// `S^{(2s−n)/((n−1)(2s−1))} Q^{2s/(2s−1)}`.
pub fn build_pmi_model(n: u32, i: u32, l: f64, l_is_variable: bool) -> Result<ThermoModel, ModelError> {
    let params = PmiParams::new(n, i, l, l_is_variable)?;
    let vars = if l_is_variable { VarList::new(&["S", "Q", "l"])? } else { VarList::new(&["S", "Q"])? };
    let pre = params.prefactor();
    let x = 4.0 / params.omega();
    let [e1, e2, e3, eq] = params.exponents();
    let xp = |e: Exponent| x.powf(e.value());

    let mut m = GenPoly::monomial(&vars, pre * xp(e1), &[("S", e1)])?;
    let second = if l_is_variable {
        GenPoly::monomial(&vars, pre * xp(e2), &[("S", e2), ("l", Exponent::int(-2))])?
    } else {
        GenPoly::monomial(&vars, pre * xp(e2) / (l * l), &[("S", e2)])?
    };
    m = m.add(&second);
    let charge = -pre * params.charge_term_constant() * xp(e3) * params.charge_coefficient().powi(i as i32 + 1);
    m = m.add(&GenPoly::monomial(&vars, charge, &[("S", e3), ("Q", eq)])?);
    Ok(ThermoModel { vars, potential: m, kind: ModelKind::Pmi(params) })
}

/// Reissner–Nordström-AdS (`s = 1`) in `n + 1` dimensions.
pub fn build_rn_model(n: u32, l: f64, l_is_variable: bool) -> Result<ThermoModel, ModelError> {
    build_pmi_model(n, 1, l, l_is_variable)
}

/// Any fundamental equation typed in the polynomial grammar, e.g. `"S^2 + Q^2"`.
pub fn build_custom_model<S: AsRef<str>>(vars: &[S], potential: &str) -> Result<ThermoModel, ModelError> {
    let vars = VarList::new(vars)?;
    if vars.is_empty() {
        return Err(ModelError::InvalidParameter("a model needs at least one variable".into()));
    }
    let potential_poly = parse_poly(potential, Some(&vars))?;
    Ok(ThermoModel { vars, potential: potential_poly, kind: ModelKind::Custom { potential: potential.to_string() } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::EvalPoint;

    #[test]
    fn pmi_4_5half_exponents() {
        let m = build_pmi_model(4, 4, 1.0, false).unwrap();
        let mut s_exps: Vec<Exponent> = m.potential().terms().iter().map(|t| t.exponents()[0]).collect();
        s_exps.sort_by(|a, b| a.compare(b));
        assert_eq!(s_exps, vec![Exponent::ratio(1, 12), Exponent::ratio(2, 3), Exponent::ratio(4, 3)]);
        let charge = m.potential().terms().iter().find(|t| !t.exponents()[1].is_zero()).unwrap();
        assert_eq!(charge.exponents()[1], Exponent::ratio(5, 4));
        assert_eq!(charge.exponents()[0], Exponent::ratio(1, 12));
    }

    #[test]
    fn rn_reduces_to_closed_form() {
        // n = 3, s = 1: M = ½ √(S/π) (1 + S/(π l²) + π Q²/S)
        let l = 8.0;
        let m = build_rn_model(3, l, false).unwrap();
        let exps: Vec<[Exponent; 2]> = m.potential().terms().iter().map(|t| [t.exponents()[0], t.exponents()[1]]).collect();
        assert!(exps.contains(&[Exponent::ratio(1, 2), Exponent::ZERO]));
        assert!(exps.contains(&[Exponent::ratio(3, 2), Exponent::ZERO]));
        assert!(exps.contains(&[Exponent::ratio(-1, 2), Exponent::int(2)]));
        for (s, q) in [(1.0, 0.5), (12.0, 1.0), (40.0, 3.0)] {
            let x = EvalPoint::new(&[("S", s), ("Q", q)]).unwrap();
            let want = 0.5 * (s / PI).sqrt() * (1.0 + s / (PI * l * l) + PI * q * q / s);
            let got = m.potential().eval(&x).unwrap();
            assert!((got - want).abs() < 1e-13 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn phi_line_for_pmi_4() {
        // Φ = 2^{17/24} 5^{3/4} / (10 π^{5/12}) · S^{1/12} Q^{1/4}
        let m = build_pmi_model(4, 4, 1.0, false).unwrap();
        let phi = m.potential().diff("Q");
        assert_eq!(phi.len(), 1);
        let t = &phi.terms()[0];
        assert_eq!(t.exponents(), &[Exponent::ratio(1, 12), Exponent::ratio(1, 4)]);
        let want = 2f64.powf(17.0 / 24.0) * 5f64.powf(0.75) / (10.0 * PI.powf(5.0 / 12.0));
        assert!((t.coeff() - want).abs() < 1e-14 * want);
    }

    #[test]
    fn variable_l_carries_inverse_square() {
        let m = build_pmi_model(4, 4, 1.0, true).unwrap();
        assert_eq!(m.vars().names(), vec!["S", "Q", "l"]);
        let t = m.potential().terms().iter().find(|t| !t.exponents()[2].is_zero()).unwrap();
        assert_eq!(t.exponents()[2], Exponent::int(-2));
        assert_eq!(t.exponents()[0], Exponent::ratio(4, 3));
        // agrees with the fixed-l model at l = 1.7
        let fixed = build_pmi_model(4, 4, 1.7, false).unwrap();
        let x2 = EvalPoint::new(&[("S", 2.5), ("Q", 1.2)]).unwrap();
        let x3 = x2.with("l", 1.7).unwrap();
        let (a, b) = (m.potential().eval(&x3).unwrap(), fixed.potential().eval(&x2).unwrap());
        assert!((a - b).abs() < 1e-14 * a.abs());
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(build_pmi_model(5, 4, 1.0, false), Err(ModelError::InvalidParameter(_))));
        assert!(matches!(build_pmi_model(2, 1, 1.0, false), Err(ModelError::InvalidParameter(_))));
        assert!(matches!(build_pmi_model(4, 0, 1.0, false), Err(ModelError::InvalidParameter(_))));
        assert!(matches!(build_pmi_model(4, 4, 0.0, false), Err(ModelError::InvalidParameter(_))));
        assert!(build_pmi_model(6, 4, 1.0, false).is_ok());
    }

    #[test]
    fn custom_models() {
        let m = build_custom_model(&["S", "Q"], "S^2").unwrap();
        assert_eq!(m.dim(), 2);
        assert!(matches!(
            build_custom_model(&["S", "Q"], "a*S"),
            Err(ModelError::Symbolic(SymbolicError::UnknownVariable(v))) if v == "a"
        ));
        assert!(matches!(build_custom_model(&["S"], ""), Err(ModelError::Symbolic(SymbolicError::Syntax { .. }))));
    }

    #[test]
    fn hessian_is_structurally_symmetric() {
        let m = build_pmi_model(4, 4, 1.0, true).unwrap();
        let h = m.hessian();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(h[a * 3 + b], h[b * 3 + a]);
            }
        }
    }
}
