use geotherm::analysis::Analyzer;
use geotherm::checks::{run_checks, CheckPlan, CheckResult};

use crate::config::{parse_config, RunSpec};
use crate::CliError;

pub struct Suite {
    pub name: &'static str,
    pub config: &'static str,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "rn",
        config: "\
model.type = rn
model.l = 8
sweep.min = 5
sweep.max = 60
sweep.fixed.Q = 1
",
    },
    Suite {
        name: "pmi-4-5/2",
        config: "\
model.type = pmi
model.n = 4
model.s = 5/2
model.l = 1
sweep.min = 0.5
sweep.max = 10
sweep.fixed.Q = 1
",
    },
    Suite {
        name: "pmi-3-5/2",
        config: "\
model.type = pmi
model.n = 3
model.s = 5/2
model.l = 1
sweep.min = 0.5
sweep.max = 10
sweep.fixed.Q = 1
",
    },
    Suite {
        name: "pmi-6-5/2",
        config: "\
model.type = pmi
model.n = 6
model.s = 5/2
model.l = 1
sweep.min = 0.2
sweep.max = 10
sweep.fixed.Q = 1
",
    },
    Suite {
        name: "pmi-3var",
        config: "\
model.type = pmi
model.n = 4
model.s = 5/2
model.l = 1
model.l_is_variable = true
sweep.var = l
sweep.min = 0.5
sweep.max = 5
sweep.fixed.S = 10
sweep.fixed.Q = 1
",
    },
];

pub fn find_suite(name: &str) -> Option<RunSpec> {
    SUITES.iter().find(|s| s.name == name).map(|s| parse_config(s.config).expect("builtin suite parses"))
}

/// Run the oracle checks for `spec`; coincidence is included when the spec
/// asks for it or comes from a builtin suite.
pub fn verify(spec: &RunSpec, coincidence: bool) -> Result<Vec<CheckResult>, CliError> {
    let model = spec.build_model()?;
    let sweep = spec.sweep_spec()?;
    let opts = spec.analysis_options();
    let analyzer = match &spec.model.eta {
        Some(eta) => Analyzer::with_eta(&model, opts, eta.clone())?,
        None => Analyzer::new(&model, opts)?,
    };
    let plan = CheckPlan { coincidence, ..CheckPlan::default() };
    Ok(run_checks(&analyzer, &sweep, &plan)?)
}

pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:<width$}  {status}  {}\n", r.name, r.detail));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        for s in SUITES {
            assert!(find_suite(s.name).is_some(), "{}", s.name);
        }
        assert!(find_suite("nope").is_none());
    }

    #[test]
    fn table_lists_every_check() {
        let results = vec![
            CheckResult { name: "a".into(), passed: true, detail: "ok".into() },
            CheckResult { name: "longer".into(), passed: false, detail: "bad".into() },
        ];
        let t = format_table(&results);
        assert_eq!(t, "a       PASS  ok\nlonger  FAIL  bad\n");
    }
}
