//! Run configuration in a flat `section.key = value` format.
//!
//! ```text
//! # comments run to end of line
//! model.type = pmi            # pmi | rn | custom
//! model.n = 4
//! model.s = 5/2               # or model.i = 4 (i = 2s - 1)
//! model.l = 1
//! sweep.var = S
//! sweep.min = 0.5
//! sweep.max = 10
//! sweep.fixed.Q = 1
//! analysis.quantities = CQ, R_gtd
//! ```
//!
//! Keys are unique; unknown keys, duplicates and malformed values are errors
//! carrying the line number and key.

use std::collections::BTreeMap;
use std::path::PathBuf;

use geotherm::analysis::{AnalysisOptions, Quantity, Scale, SweepSpec};
use geotherm::models::{build_custom_model, build_pmi_model, MetricKind, PmiParams, ThermoModel};
use geotherm::EvalPoint;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config error at {location}: {reason}")]
pub struct ConfigError {
    pub location: String,
    pub reason: String,
}

impl ConfigError {
    fn at(key: &str, reason: impl Into<String>) -> Self {
        ConfigError { location: format!("`{key}`"), reason: reason.into() }
    }

    fn line(line: usize, reason: impl Into<String>) -> Self {
        ConfigError { location: format!("line {line}"), reason: reason.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelType {
    Pmi,
    Rn,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSection {
    #[serde(rename = "type")]
    pub kind: ModelType,
    pub n: Option<u32>,
    pub i: Option<u32>,
    pub l: Option<f64>,
    pub l_is_variable: bool,
    pub vars: Vec<String>,
    pub potential: Option<String>,
    pub eta: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSection {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
    pub fixed: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Report,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub csv: String,
    pub report: String,
    pub manifest: String,
    pub formats: Vec<OutputFormat>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    #[serde(rename = "match")]
    pub match_tol: f64,
    pub f_zero: f64,
    pub bisection: f64,
    pub pole_guard: f64,
    pub growth_min: f64,
    pub max_terms: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = AnalysisOptions::default();
        Tolerances {
            match_tol: d.match_tol,
            f_zero: d.f_zero_tol,
            bisection: d.bisection_tol,
            pole_guard: d.pole_guard,
            growth_min: d.growth_min,
            max_terms: d.curvature.max_terms,
        }
    }
}

/// A fully validated run description.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSpec {
    pub model: ModelSection,
    pub sweep: SweepSection,
    pub quantities: Vec<Quantity>,
    pub verify_coincidence: bool,
    pub metric: MetricKind,
    pub output: OutputSection,
    pub tolerance: Tolerances,
}

impl RunSpec {
    pub fn build_model(&self) -> Result<ThermoModel, ConfigError> {
        let m = &self.model;
        let built = match m.kind {
            ModelType::Pmi => build_pmi_model(m.n.unwrap_or(0), m.i.unwrap_or(0), m.l.unwrap_or(1.0), m.l_is_variable),
            ModelType::Rn => build_pmi_model(m.n.unwrap_or(3), 1, m.l.unwrap_or(1.0), m.l_is_variable),
            ModelType::Custom => build_custom_model(&m.vars, m.potential.as_deref().unwrap_or("")),
        };
        built.map_err(|e| ConfigError::at("model", e.to_string()))
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, ConfigError> {
        let s = &self.sweep;
        let pairs: Vec<(&str, f64)> = s.fixed.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let fixed = EvalPoint::new(&pairs).map_err(|e| ConfigError::at("sweep.fixed", e.to_string()))?;
        SweepSpec::new(&s.var, s.min, s.max, s.points, s.scale, fixed).map_err(|e| ConfigError::at("sweep", e.to_string()))
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        let t = &self.tolerance;
        let mut opts = AnalysisOptions {
            match_tol: t.match_tol,
            f_zero_tol: t.f_zero,
            bisection_tol: t.bisection,
            pole_guard: t.pole_guard,
            growth_min: t.growth_min,
            metric: self.metric,
            ..AnalysisOptions::default()
        };
        opts.curvature.max_terms = t.max_terms;
        opts
    }

    pub fn wants(&self, q: Quantity) -> bool {
        self.quantities.contains(&q)
    }
}

/// Raw `key = value` pairs with their line numbers.
fn tokenize(text: &str) -> Result<BTreeMap<String, (usize, String)>, ConfigError> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::line(line, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || !key.contains('.') {
            return Err(ConfigError::line(line, format!("key `{key}` must have the form section.key")));
        }
        if value.is_empty() {
            return Err(ConfigError::line(line, format!("`{key}` has no value")));
        }
        if out.insert(key.to_string(), (line, value.to_string())).is_some() {
            return Err(ConfigError::line(line, format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }

    fn parse<T>(&mut self, key: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => f(&v).map(Some).ok_or_else(|| ConfigError {
                location: format!("line {line} (`{key}`)"),
                reason: format!("expected {what}, got `{v}`"),
            }),
        }
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parse(key, "a finite number", |v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
    }

    fn uint(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parse(key, "a non-negative integer", |v| v.parse::<u64>().ok())
    }

    fn flag(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.parse(key, "true or false", |v| match v {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
    }

    fn list(&mut self, key: &str) -> Option<Vec<String>> {
        self.take(key).map(|(_, v)| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }
}

/// `5/2`, `2.5` or `1` as a half-integer `s`, returned as `i = 2s − 1`.
fn parse_s(v: &str) -> Option<u32> {
    let twice = match v.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?);
            if b <= 0 || (2 * a) % b != 0 {
                return None;
            }
            2 * a / b
        }
        None => {
            let x = v.parse::<f64>().ok()?;
            let t = 2.0 * x;
            if t.fract() != 0.0 || !t.is_finite() {
                return None;
            }
            t as i64
        }
    };
    u32::try_from(twice - 1).ok().filter(|&i| i >= 1)
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    let mut e = Entries(tokenize(text)?);

    let kind = match e.take("model.type") {
        None => return Err(ConfigError::at("model.type", "missing (expected pmi, rn or custom)")),
        Some((_, v)) => match v.as_str() {
            "pmi" => ModelType::Pmi,
            "rn" => ModelType::Rn,
            "custom" => ModelType::Custom,
            other => return Err(ConfigError::at("model.type", format!("unknown model type `{other}`"))),
        },
    };
    let n = e.uint("model.n")?.map(|v| u32::try_from(v).unwrap_or(u32::MAX));
    let i_direct = e.uint("model.i")?.map(|v| u32::try_from(v).unwrap_or(u32::MAX));
    let i_from_s = e.parse("model.s", "a half-integer s with 2s - 1 a positive integer", parse_s)?;
    let l = e.real("model.l")?;
    let l_is_variable = e.flag("model.l_is_variable")?.unwrap_or(false);
    let vars = e.list("model.vars");
    let potential = e.take("model.potential").map(|(_, v)| v);
    let eta = match e.list("model.eta") {
        None => None,
        Some(items) => Some(
            items
                .iter()
                .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| ConfigError::at("model.eta", "expected a comma-separated list of numbers"))?,
        ),
    };

    let i = match (kind, i_direct, i_from_s) {
        (_, Some(_), Some(_)) => return Err(ConfigError::at("model.s", "give either model.s or model.i, not both")),
        (ModelType::Pmi, None, None) => return Err(ConfigError::at("model.i", "missing (or give model.s)")),
        (ModelType::Pmi, a, b) => a.or(b),
        (_, None, None) => None,
        (_, _, _) => return Err(ConfigError::at("model.i", "only meaningful for model.type = pmi")),
    };
    let model_vars = match kind {
        ModelType::Custom => {
            let Some(v) = vars else {
                return Err(ConfigError::at("model.vars", "missing for a custom model"));
            };
            if potential.is_none() {
                return Err(ConfigError::at("model.potential", "missing for a custom model"));
            }
            if n.is_some() || l.is_some() || l_is_variable {
                return Err(ConfigError::at("model", "n, l and l_is_variable do not apply to custom models"));
            }
            v
        }
        _ => {
            if vars.is_some() || potential.is_some() {
                return Err(ConfigError::at("model", "vars and potential only apply to custom models"));
            }
            if kind == ModelType::Pmi && n.is_none() {
                return Err(ConfigError::at("model.n", "missing"));
            }
            if l_is_variable { vec!["S".into(), "Q".into(), "l".into()] } else { vec!["S".into(), "Q".into()] }
        }
    };
    let model = ModelSection {
        kind,
        n: if kind == ModelType::Rn { Some(n.unwrap_or(3)) } else { n },
        i: if kind == ModelType::Rn { Some(1) } else { i },
        l: if kind == ModelType::Custom { None } else { Some(l.unwrap_or(1.0)) },
        l_is_variable,
        vars: model_vars.clone(),
        potential,
        eta,
    };
    if kind != ModelType::Custom {
        PmiParams::new(model.n.unwrap_or(0), model.i.unwrap_or(0), model.l.unwrap_or(1.0), l_is_variable)
            .map_err(|err| ConfigError::at("model", err.to_string()))?;
    }
    if let Some(eta) = &model.eta {
        if eta.len() != model_vars.len() {
            return Err(ConfigError::at("model.eta", format!("expected {} entries, got {}", model_vars.len(), eta.len())));
        }
    }

    let var = e.take("sweep.var").map(|(_, v)| v).unwrap_or_else(|| model_vars[0].clone());
    let min = e.real("sweep.min")?.ok_or_else(|| ConfigError::at("sweep.min", "missing"))?;
    if min <= 0.0 {
        return Err(ConfigError::at("sweep.min", format!("must be positive, got {min}")));
    }
    let max = e.real("sweep.max")?.ok_or_else(|| ConfigError::at("sweep.max", "missing"))?;
    let points = e.uint("sweep.points")?.unwrap_or(400) as usize;
    let scale = match e.take("sweep.scale") {
        None => Scale::Linear,
        Some((_, v)) => v.parse().map_err(|m: String| ConfigError::at("sweep.scale", m))?,
    };
    let fixed_keys: Vec<String> = e.0.keys().filter(|k| k.starts_with("sweep.fixed.")).cloned().collect();
    let mut fixed = BTreeMap::new();
    for key in fixed_keys {
        let name = key.trim_start_matches("sweep.fixed.").to_string();
        if !model_vars.contains(&name) {
            return Err(ConfigError::at(&key, format!("`{name}` is not a model variable")));
        }
        let v = e.real(&key)?.expect("key present");
        if v <= 0.0 {
            return Err(ConfigError::at(&key, format!("fixed values must be positive, got {v}")));
        }
        fixed.insert(name, v);
    }
    if !model_vars.contains(&var) {
        return Err(ConfigError::at("sweep.var", format!("`{var}` is not a model variable")));
    }
    if fixed.contains_key(&var) {
        return Err(ConfigError::at("sweep.var", format!("`{var}` is both swept and fixed")));
    }
    for name in &model_vars {
        if *name != var && !fixed.contains_key(name) {
            match (name.as_str(), model.l) {
                ("l", Some(lv)) if kind != ModelType::Custom => {
                    fixed.insert(name.clone(), lv);
                }
                _ => return Err(ConfigError::at(&format!("sweep.fixed.{name}"), "missing")),
            }
        }
    }
    if max <= min {
        return Err(ConfigError::at("sweep.max", format!("must exceed sweep.min ({min}), got {max}")));
    }
    if points < SweepSpec::MIN_POINTS {
        return Err(ConfigError::at("sweep.points", format!("at least {} required, got {points}", SweepSpec::MIN_POINTS)));
    }
    let sweep = SweepSection { var, min, max, points, scale, fixed };

    let quantities = match e.list("analysis.quantities") {
        None => Quantity::ALL.to_vec(),
        Some(items) => {
            let mut qs = Vec::new();
            for it in items {
                let q: Quantity = it.parse().map_err(|m: String| ConfigError::at("analysis.quantities", m))?;
                if !qs.contains(&q) {
                    qs.push(q);
                }
            }
            qs
        }
    };
    let verify_coincidence = e.flag("analysis.verify_coincidence")?.unwrap_or(false);
    let metric = match e.take("analysis.metric") {
        None => MetricKind::Gtd,
        Some((_, v)) => v.parse().map_err(|m: String| ConfigError::at("analysis.metric", m))?,
    };

    let dir = e.take("output.dir").map(|(_, v)| PathBuf::from(v)).unwrap_or_else(|| PathBuf::from("geotherm-out"));
    let csv = e.take("output.csv").map(|(_, v)| v).unwrap_or_else(|| "sweep.csv".into());
    let report = e.take("output.report").map(|(_, v)| v).unwrap_or_else(|| "report.json".into());
    let manifest = e.take("output.manifest").map(|(_, v)| v).unwrap_or_else(|| "manifest.json".into());
    let formats = match e.list("output.formats") {
        None => vec![OutputFormat::Csv, OutputFormat::Report],
        Some(items) => items
            .iter()
            .map(|s| match s.as_str() {
                "csv" => Ok(OutputFormat::Csv),
                "report" => Ok(OutputFormat::Report),
                other => Err(ConfigError::at("output.formats", format!("unknown format `{other}` (expected csv or report)"))),
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    for (key, name) in [("output.csv", &csv), ("output.report", &report), ("output.manifest", &manifest)] {
        if name.contains('/') || name.contains('\\') {
            return Err(ConfigError::at(key, "must be a file name inside output.dir"));
        }
    }
    let output = OutputSection { dir, csv, report, manifest, formats };

    let d = Tolerances::default();
    let positive = |key: &str, v: Option<f64>, default: f64| -> Result<f64, ConfigError> {
        match v {
            Some(x) if x <= 0.0 => Err(ConfigError::at(key, format!("must be positive, got {x}"))),
            Some(x) => Ok(x),
            None => Ok(default),
        }
    };
    let tolerance = Tolerances {
        match_tol: positive("tolerance.match", e.real("tolerance.match")?, d.match_tol)?,
        f_zero: positive("tolerance.f_zero", e.real("tolerance.f_zero")?, d.f_zero)?,
        bisection: positive("tolerance.bisection", e.real("tolerance.bisection")?, d.bisection)?,
        pole_guard: positive("tolerance.pole_guard", e.real("tolerance.pole_guard")?, d.pole_guard)?,
        growth_min: positive("tolerance.growth_min", e.real("tolerance.growth_min")?, d.growth_min)?,
        max_terms: e.uint("tolerance.max_terms")?.map_or(d.max_terms, |v| v as usize),
    };

    if let Some((key, (line, _))) = e.0.into_iter().next() {
        return Err(ConfigError { location: format!("line {line}"), reason: format!("unknown key `{key}`") });
    }

    let spec = RunSpec { model, sweep, quantities, verify_coincidence, metric, output, tolerance };
    spec.build_model()?;
    spec.sweep_spec()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        model.type = pmi
        model.n = 4
        model.i = 4
        model.l = 1
        sweep.min = 0.5
        sweep.max = 10
        sweep.fixed.Q = 1
    ";

    #[test]
    fn minimal_pmi_config() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.model.kind, ModelType::Pmi);
        assert_eq!((spec.model.n, spec.model.i), (Some(4), Some(4)));
        assert_eq!(spec.sweep.var, "S");
        assert_eq!(spec.sweep.points, 400);
        assert_eq!(spec.quantities, Quantity::ALL.to_vec());
        assert_eq!(spec.metric, MetricKind::Gtd);
        assert_eq!(parse_config(MINIMAL).unwrap(), spec);
    }

    #[test]
    fn s_and_i_are_equivalent() {
        let with_s = MINIMAL.replace("model.i = 4", "model.s = 5/2");
        assert_eq!(parse_config(&with_s).unwrap().model.i, Some(4));
        let decimal = MINIMAL.replace("model.i = 4", "model.s = 2.5");
        assert_eq!(parse_config(&decimal).unwrap().model.i, Some(4));
        let bad = MINIMAL.replace("model.i = 4", "model.s = 3/4");
        assert!(parse_config(&bad).is_err());
    }

    #[test]
    fn zero_minimum_rejected() {
        let err = parse_config(&MINIMAL.replace("sweep.min = 0.5", "sweep.min = 0")).unwrap_err();
        assert!(err.location.contains("sweep.min"), "{err}");
    }

    #[test]
    fn n_equal_to_i_plus_one_rejected() {
        let err = parse_config(&MINIMAL.replace("model.n = 4", "model.n = 5")).unwrap_err();
        assert!(err.reason.contains("n != 2s"), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        let err = parse_config(&format!("{MINIMAL}\nsweep.colour = red")).unwrap_err();
        assert!(err.reason.contains("unknown key `sweep.colour`"));
        let err = parse_config(&format!("{MINIMAL}\nmodel.n = 4")).unwrap_err();
        assert!(err.reason.contains("duplicate"));
        assert!(parse_config("model.type pmi").is_err());
    }

    #[test]
    fn custom_model() {
        let text = "
            model.type = custom
            model.vars = S, Q
            model.potential = S^2 + Q^2   # quadratic
            sweep.min = 1
            sweep.max = 2
            sweep.fixed.Q = 1
        ";
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.model.vars, vec!["S", "Q"]);
        assert!(spec.build_model().is_ok());
        let err = parse_config(&text.replace("S^2 + Q^2", "a*S")).unwrap_err();
        assert!(err.reason.contains("unknown variable"), "{err}");
    }

    #[test]
    fn missing_fixed_value() {
        let err = parse_config(&MINIMAL.replace("sweep.fixed.Q = 1", "")).unwrap_err();
        assert!(err.location.contains("sweep.fixed.Q"));
    }

    #[test]
    fn variable_l_defaults_to_model_value() {
        let spec = parse_config(&format!("{MINIMAL}\nmodel.l_is_variable = true")).unwrap();
        assert_eq!(spec.sweep.fixed.get("l"), Some(&1.0));
        assert_eq!(spec.model.vars.len(), 3);
    }

    #[test]
    fn tolerances_and_lists() {
        let spec = parse_config(&format!(
            "{MINIMAL}\ntolerance.match = 1e-7\nanalysis.quantities = CQ, R_gtd, CQ\nanalysis.metric = weinhold\noutput.formats = csv"
        ))
        .unwrap();
        assert_eq!(spec.tolerance.match_tol, 1e-7);
        assert_eq!(spec.quantities, vec![Quantity::CQ, Quantity::RGtd]);
        assert_eq!(spec.metric, MetricKind::Weinhold);
        assert_eq!(spec.output.formats, vec![OutputFormat::Csv]);
        assert!(parse_config(&format!("{MINIMAL}\ntolerance.match = -1")).is_err());
        assert!(parse_config(&format!("{MINIMAL}\nanalysis.quantities = R")).is_err());
    }

    #[test]
    fn rn_defaults() {
        let spec = parse_config("model.type = rn\nmodel.l = 8\nsweep.min = 5\nsweep.max = 60\nsweep.fixed.Q = 1").unwrap();
        assert_eq!((spec.model.n, spec.model.i), (Some(3), Some(1)));
        assert!(parse_config("model.type = rn\nmodel.i = 2\nsweep.min = 5\nsweep.max = 60\nsweep.fixed.Q = 1").is_err());
    }
}
