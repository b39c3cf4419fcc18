use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geotherm_cli::config::ConfigError;
use geotherm_cli::verify::{find_suite, format_table, verify, SUITES};
use geotherm_cli::{load_spec, presets, run, show, CliError};

#[derive(Parser)]
#[command(name = "geotherm", version, about = "Thermodynamic geometry of black-hole fundamental equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write CSV, report and manifest files.
    Run {
        /// Config file or preset name.
        config: String,
        /// Output directory, overriding output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification checks on a builtin suite or a config.
    Verify {
        /// Suite name, preset name or config file.
        target: String,
    },
    /// List the builtin presets and verification suites.
    Presets,
    /// Print the potential and derived quantities of a model.
    ShowModel {
        /// Config file or preset name.
        config: String,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("GEOTHERM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| ConfigError {
        location: "GEOTHERM_THREADS".into(),
        reason: format!("expected a positive integer, got `{value}`"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Numeric(e.to_string()))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Run { config, out } => {
            let mut spec = load_spec(&config)?;
            if let Some(dir) = out {
                spec.output.dir = dir;
            }
            let (outcome, written) = run::run(&spec)?;
            println!("{}", outcome.report.model);
            for rec in &outcome.report.records {
                println!(
                    "  {:<6} {:<17} {} = {:.10}",
                    serde_json::to_value(rec.source)?.as_str().unwrap_or_default(),
                    serde_json::to_value(rec.kind)?.as_str().unwrap_or_default(),
                    spec.sweep.var,
                    rec.location
                );
            }
            println!("verdict: {:?}", outcome.report.verdict);
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Verify { target } => {
            let (spec, coincidence) = match find_suite(&target) {
                Some(spec) => (spec, true),
                None => {
                    let spec = load_spec(&target)?;
                    let c = spec.verify_coincidence;
                    (spec, c)
                }
            };
            let results = verify(&spec, coincidence)?;
            print!("{}", format_table(&results));
            let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(failed.join(", ")))
            }
        }
        Command::Presets => {
            println!("presets:");
            for p in presets::PRESETS {
                println!("  {:<7} {}", p.name, p.description);
            }
            println!("verification suites:");
            for s in SUITES {
                println!("  {}", s.name);
            }
            Ok(())
        }
        Command::ShowModel { config } => {
            print!("{}", show::show_model(&load_spec(&config)?)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
