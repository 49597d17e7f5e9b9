use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bellcg_cli::analyze::{analyze, AnalyzeOptions};
use bellcg_cli::compare::{compare, CompareOptions, DEFAULT_TOL};
use bellcg_cli::report::{read_csv, to_csv, to_json, to_markdown};
use bellcg_cli::{canon, read_tables};
use clap::{Parser, Subcommand, ValueEnum};

/// Analysis of binary-outcome Bell inequalities in Collins-Gisin form.
#[derive(Parser)]
#[command(name = "bellcg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Local bound, facet test, quantum bound, noise resistance and
    /// detection threshold for every inequality in a file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        output: OutputFormat,
        #[arg(long, default_value_t = AnalyzeOptions::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = AnalyzeOptions::default().tol)]
        tol: f64,
    },
    /// Compare a report CSV against a reference CSV.
    Compare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Per-column tolerance, e.g. `--col-tol lambda=0.003`. Repeatable.
        #[arg(long = "col-tol", value_name = "COLUMN=TOL")]
        col_tol: Vec<String>,
        /// Compare L-N and Q-L instead of the raw L, N and Q.
        #[arg(long)]
        normalized: bool,
    },
    /// Canonical forms and groups of equivalent inequalities.
    Canon {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the built-in reference inequalities in the file format.
    Fixtures,
}

fn parse_col_tol(specs: &[String]) -> Result<BTreeMap<String, f64>> {
    specs
        .iter()
        .map(|s| {
            let (col, tol) = s
                .split_once('=')
                .with_context(|| format!("expected COLUMN=TOL, got `{s}`"))?;
            let tol: f64 = tol
                .parse()
                .with_context(|| format!("invalid tolerance in `{s}`"))?;
            Ok((col.to_string(), tol))
        })
        .collect()
}

/// Ok(true) on success, Ok(false) on a tolerance or diff failure.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze {
            input,
            output,
            restarts,
            seed,
            tol,
        } => {
            if restarts == 0 {
                bail!("--restarts must be at least 1");
            }
            let tables = read_tables(&input)?;
            let opts = AnalyzeOptions {
                restarts,
                seed,
                tol,
                ..AnalyzeOptions::default()
            };
            let rows = analyze(&tables, &opts);
            for row in &rows {
                match row {
                    bellcg_cli::report::ReportRow::Failed {
                        index,
                        name,
                        message,
                        ..
                    } => {
                        eprintln!("row {index} ({name}) failed: {message}");
                    }
                    bellcg_cli::report::ReportRow::Ok(r) => {
                        for v in r.violations() {
                            eprintln!("row {} ({}) invariant violated: {v}", r.index, r.name);
                        }
                    }
                }
            }
            let text = match output {
                OutputFormat::Csv => to_csv(&rows),
                OutputFormat::Json => to_json(&rows),
                OutputFormat::Md => to_markdown(&rows),
            };
            print!("{text}");
            Ok(true)
        }
        Command::Compare {
            input,
            reference,
            tol,
            col_tol,
            normalized,
        } => {
            let ours = read_csv(&input)?;
            let theirs = read_csv(&reference)?;
            let opts = CompareOptions {
                tol,
                column_tol: parse_col_tol(&col_tol)?,
                normalized,
            };
            let summary = compare(&ours, &theirs, &opts);
            print!("{summary}");
            Ok(summary.passed())
        }
        Command::Canon { input } => {
            let tables = read_tables(&input)?;
            print!("{}", canon::canon(&tables).render());
            Ok(true)
        }
        Command::Fixtures => {
            print!(
                "{}",
                bellcg::format::serialize_file(&bellcg::fixtures::all())
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
