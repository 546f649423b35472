//! `superb`: scaling factors, thresholds and entanglement of optimal
//! superbroadcasting channels, exported as CSV or JSON.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 when `verify` finds a
//! failing case. `SUPERB_THREADS` caps the worker pool.

mod commands;
mod table;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use superbroadcast::phase::Branch;
use superbroadcast::{Family, Outputs};

use commands::{Figure, Grid, Span};
use table::Table;

#[derive(Parser, Debug)]
#[command(name = "superb", version, about = "Optimal qubit superbroadcasting data export")]
struct Cli {
    /// Output format (default: csv, json for `verify`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Mixed,
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Mixed => Branch::Mixed,
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// p(r) on a grid of Bloch lengths.
    Scaling {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: u32,
        /// Output copies, or `inf`.
        #[arg(long)]
        m: Outputs,
        /// `start:stop:step` or a single value.
        #[arg(long, default_value = "0:1:0.01")]
        r: Grid,
    },
    /// Largest r with p(r) > 1, and the maximum of p.
    Threshold {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: u32,
        /// Output copies (`inf` allowed), or an inclusive range `a:b`.
        #[arg(long)]
        m: String,
    },
    /// Largest M that still superbroadcasts.
    Mstar {
        #[arg(long)]
        family: Family,
        /// Input copies, or an inclusive range `a:b`.
        #[arg(long)]
        n: Span,
    },
    /// Data behind one of the standard plots.
    Figure {
        /// fig1 .. fig5
        id: Figure,
    },
    /// Two-site concurrence and entanglement of formation.
    Entanglement {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value = "0:1:0.01")]
        r: Grid,
        /// Phase maps with odd M - N: which offset to use.
        #[arg(long, value_enum, default_value = "mixed")]
        branch: BranchArg,
    },
    /// Cross-check the closed forms against dense Choi operators.
    Verify {
        /// Largest N + M to check.
        #[arg(long, default_value_t = 10)]
        max_dim: u32,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

fn output_list(spec: &str) -> Result<Vec<Outputs>, String> {
    if spec.contains(':') {
        let span: Span = spec.parse()?;
        return Ok(span.iter().map(Outputs::Finite).collect());
    }
    spec.parse::<Outputs>().map(|m| vec![m]).map_err(|e| e.to_string())
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let usage = |e: superbroadcast::Error| Failure::Usage(e.to_string());
    let format = cli.format;
    let tabular = |t: Table| render(&t, format.unwrap_or(Format::Csv));
    Ok(match cli.command {
        Command::Scaling { family, n, m, r } => tabular(commands::scaling(family, n, m, r).map_err(usage)?),
        Command::Threshold { family, n, m } => {
            let outputs = output_list(&m).map_err(Failure::Usage)?;
            tabular(commands::threshold(family, n, &outputs).map_err(usage)?)
        }
        Command::Mstar { family, n } => tabular(commands::mstar(family, n).map_err(usage)?),
        Command::Figure { id } => tabular(commands::figure(id).map_err(usage)?),
        Command::Entanglement { family, n, m, r, branch } => {
            tabular(commands::entanglement(family, n, m, r, branch.into()).map_err(usage)?)
        }
        Command::Verify { max_dim } => {
            let report = commands::verify(max_dim).map_err(usage)?;
            let text = match format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("serializable");
                    s.push('\n');
                    s
                }
                Format::Csv => commands::verify_table(&report).to_csv(),
            };
            if !report.passed {
                let failed = report.cases.iter().filter(|c| !c.passed).count();
                emit(&text, cli.output.as_ref()).map_err(Failure::Usage)?;
                return Err(Failure::Verification(format!("{failed} of {} cases failed", report.cases.len())));
            }
            text
        }
    })
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("SUPERB_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("SUPERB_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let output = cli.output.clone();
    match run(cli) {
        Ok(text) => match emit(&text, output.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(e)) => {
            eprintln!("verification failed: {e}");
            ExitCode::from(2)
        }
    }
}
