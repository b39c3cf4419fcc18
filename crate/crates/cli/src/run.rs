use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use geotherm::analysis::{coincidence_report, sweep, Analyzer, Quantity, SweepTable, TransitionReport};
use serde::Serialize;

use crate::config::{OutputFormat, RunSpec};
use crate::CliError;

/// Everything a run produced, before anything touches the disk.
pub struct RunOutcome {
    pub table: SweepTable,
    pub report: TransitionReport,
    pub csv: Vec<u8>,
    pub report_json: String,
    pub wall_time: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    model: String,
    spec: &'a RunSpec,
    wall_time_seconds: f64,
    timestamp_unix: u64,
    files: Vec<String>,
}

pub const CSV_HEADER: [&str; 10] = ["x", "T", "Phi", "L", "CQ", "R_gtd", "R_w", "R_rupp", "f", "pole_flags"];

/// Render a sweep table in the fixed column layout.
pub fn render_csv(table: &SweepTable, requested: &[Quantity]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for (k, x) in table.x.iter().enumerate() {
        let mut row = Vec::with_capacity(CSV_HEADER.len());
        row.push(format!("{x:.16e}"));
        for q in Quantity::ALL {
            let cell = if requested.contains(&q) { table.column(q).and_then(|c| c[k]) } else { None };
            row.push(cell.map(|v| format!("{v:.16e}")).unwrap_or_default());
        }
        let flags: Vec<&str> = Quantity::ALL
            .iter()
            .filter(|q| requested.contains(q) && table.flags[k].contains(q))
            .map(|q| q.name())
            .collect();
        row.push(flags.join(";"));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

/// Compute the sweep and the transition report for `spec`.
pub fn compute(spec: &RunSpec) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let model = spec.build_model()?;
    let sweep_spec = spec.sweep_spec()?;
    let opts = spec.analysis_options();
    let analyzer = match &spec.model.eta {
        Some(eta) => Analyzer::with_eta(&model, opts, eta.clone())?,
        None => Analyzer::new(&model, opts)?,
    };
    let table = sweep(&analyzer, &spec.quantities, &sweep_spec)?;
    for (q, values) in &table.columns {
        if analyzer.has_quantity(*q) && values.iter().all(Option::is_none) {
            return Err(CliError::Numeric(format!("{} is undefined at every sweep point", q.name())));
        }
    }
    let report = coincidence_report(&analyzer, &sweep_spec)?;
    let csv = render_csv(&table, &spec.quantities)?;
    let report_json = serde_json::to_string_pretty(&report)? + "\n";
    Ok(RunOutcome { table, report, csv, report_json, wall_time: start.elapsed().as_secs_f64() })
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}

/// Run `spec` and write its artifacts; returns the paths written.
///
/// A failed coincidence verdict is reported after the files are written.
pub fn run(spec: &RunSpec) -> Result<(RunOutcome, Vec<PathBuf>), CliError> {
    let outcome = compute(spec)?;
    let out = &spec.output;
    fs::create_dir_all(&out.dir)?;
    let mut written = Vec::new();
    if out.formats.contains(&OutputFormat::Csv) {
        written.push(write(&out.dir, &out.csv, &outcome.csv)?);
    }
    if out.formats.contains(&OutputFormat::Report) {
        written.push(write(&out.dir, &out.report, outcome.report_json.as_bytes())?);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        model: outcome.report.model.clone(),
        spec,
        wall_time_seconds: outcome.wall_time,
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        files: written.iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect(),
    };
    written.push(write(&out.dir, &out.manifest, (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes())?);
    if spec.verify_coincidence && !outcome.report.passed() {
        return Err(CliError::Verdict(format!(
            "heat-capacity poles {:?} are not matched by {} curvature singularities (unmatched: {:?})",
            outcome.report.cq_poles(),
            spec.metric,
            outcome.report.unmatched_physical
        )));
    }
    Ok((outcome, written))
}
