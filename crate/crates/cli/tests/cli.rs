use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn geotherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geotherm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const RN: &str = "\
model.type = rn
model.n = 3
model.l = 8
sweep.min = 5
sweep.max = 60
sweep.fixed.Q = 1
analysis.verify_coincidence = true
";

#[test]
fn rn_run_reports_two_transitions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "rn.cfg", RN);
    let out_dir = dir.path().join("out");
    let out = geotherm(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    let records = report["records"].as_array().unwrap();
    let cq: Vec<f64> = records
        .iter()
        .filter(|r| r["source"] == "C_Q" && r["kind"] == "phase_transition")
        .map(|r| r["location"].as_f64().unwrap())
        .collect();
    assert_eq!(cq.len(), 2);
    assert!((cq[0] - 11.345327286114909).abs() < 1e-6 * cq[0]);
    assert!((cq[1] - 55.67531599046735).abs() < 1e-6 * cq[1]);
    for r in records {
        for key in ["location", "source", "kind", "evidence"] {
            assert!(r.get(key).is_some(), "record lacks {key}");
        }
    }
    assert_eq!(report["verdict"], "pass");

    let manifest: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(manifest["spec"]["model"]["type"], "rn");

    let csv = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,T,Phi,L,CQ,R_gtd,R_w,R_rupp,f,pole_flags");
    assert_eq!(lines.count(), 400);
    assert!(csv.lines().any(|l| l.ends_with("CQ;R_gtd")));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(code(&geotherm(&["run", "fig4", "--out", d.to_str().unwrap()])), 0);
    }
    for file in ["sweep.csv", "report.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file} differs");
    }
}

#[test]
fn weinhold_in_the_gtd_role_fails_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "w.cfg", &format!("{RN}analysis.metric = weinhold\n"));
    let out_dir = dir.path().join("out");
    let out = geotherm(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(out_dir.join("report.json").exists());
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("zero.cfg", RN.replace("sweep.min = 5", "sweep.min = 0")),
        ("unknown.cfg", format!("{RN}sweep.step = 2\n")),
        ("constraint.cfg", "model.type = pmi\nmodel.n = 5\nmodel.i = 4\nsweep.min = 1\nsweep.max = 2\nsweep.fixed.Q = 1\n".into()),
    ] {
        let cfg = write_config(dir.path(), name, &text);
        let out = geotherm(&["run", &cfg, "--out", dir.path().join("never").to_str().unwrap()]);
        assert_eq!(code(&out), 1, "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("config error"), "{name}");
    }
    assert!(!dir.path().join("never").exists());
    assert_eq!(code(&geotherm(&["run", "no-such-preset"])), 1);
    assert_eq!(code(&geotherm(&["frobnicate"])), 1);
}

#[test]
fn numeric_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "blowup.cfg",
        "model.type = pmi\nmodel.n = 4\nmodel.i = 4\nmodel.l_is_variable = true\nsweep.min = 1\nsweep.max = 2\n\
         sweep.fixed.Q = 1\ntolerance.max_terms = 10\n",
    );
    let out = geotherm(&["run", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn builtin_suites_pass() {
    for suite in ["rn", "pmi-4-5/2"] {
        let out = geotherm(&["verify", suite]);
        let table = String::from_utf8_lossy(&out.stdout);
        assert_eq!(code(&out), 0, "{suite}:\n{table}");
        for check in ["derivatives", "curvature_oracle[gtd]", "rn_closed_form", "gtd_cross_terms", "first_law", "ruppeiner_proportionality", "coincidence"] {
            assert!(table.lines().any(|l| l.starts_with(check) && l.contains("PASS")), "{suite}: {check}\n{table}");
        }
    }
}

#[test]
fn wrong_eta_fails_cross_term_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eta.cfg", &format!("{RN}model.eta = 1, 1\n"));
    let out = geotherm(&["verify", &cfg]);
    assert_eq!(code(&out), 3);
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().any(|l| l.starts_with("gtd_cross_terms") && l.contains("FAIL")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gtd_cross_terms"));
}

#[test]
fn show_model_and_presets() {
    let out = geotherm(&["show-model", "fig1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for key in ["M = ", "T = ", "Phi_e = ", "C_Q = "] {
        assert!(text.lines().any(|l| l.starts_with(key)), "missing {key}");
    }
    let m = text.lines().find_map(|l| l.strip_prefix("M = ")).unwrap();
    let vars = geotherm::VarList::new(&["S", "Q"]).unwrap();
    let parsed = geotherm::symbolic::parse_poly(m, Some(&vars)).unwrap();
    let model = geotherm::models::build_pmi_model(4, 4, 1.0, false).unwrap();
    for x in [[0.7, 1.0], [3.0, 0.5], [9.0, 2.0]] {
        assert!((parsed.eval_slice(&x) - model.potential().eval_slice(&x)).abs() < 1e-12 * model.potential().eval_slice(&x).abs());
    }

    let out = geotherm(&["presets"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for p in ["fig1", "fig4", "fig7", "fig9", "fig10", "fig12"] {
        assert!(text.contains(p));
    }
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let run = |d: &Path, threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_geotherm"))
            .args(["run", "fig7", "--out", d.to_str().unwrap()])
            .env("GEOTHERM_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run(&a, "1")), 0);
    assert_eq!(code(&run(&b, "4")), 0);
    assert_eq!(fs::read(a.join("sweep.csv")).unwrap(), fs::read(b.join("sweep.csv")).unwrap());
    assert_eq!(code(&run(&a, "zero")), 1);
}
