//! Command-line front end: table precomputation, experiment runs, benchmarks.

pub mod bench;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use optwin_core::eval::write_report;
use optwin_core::{CutTable, OptwinConfig};

pub use bench::{run_bench, BenchDetector, BenchParams, BenchSummary};
pub use config::RunConfig;
pub use error::{CliError, Result};
pub use runner::{run_config, RunOptions, RunResults};

pub const ACCURACY_HEADER: &str = "experiment,detector,accuracy";

#[derive(Debug, Parser)]
#[command(name = "optwin", version, about = "Concept-drift detection experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a cut table and write it in binary form.
    Precompute(PrecomputeArgs),
    /// Run the experiments of a JSON config and write the report CSV.
    Run(RunArgs),
    /// Measure per-element throughput of a detector.
    Bench(BenchArgs),
    /// Write a cut table as CSV, from a table file or from parameters.
    TableExport(TableExportArgs),
}

fn confidence(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1), got {v}"))
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct TableParams {
    #[arg(long, default_value_t = 0.99, value_parser = confidence)]
    pub delta: f64,
    #[arg(long, value_parser = positive)]
    pub rho: f64,
    #[arg(long, default_value_t = 25_000, value_parser = clap::value_parser!(u32).range(30..))]
    pub w_max: u32,
}

impl TableParams {
    fn config(&self) -> Result<OptwinConfig> {
        Ok(OptwinConfig::new(self.delta, self.rho, self.w_max as usize)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PrecomputeArgs {
    #[command(flatten)]
    pub params: TableParams,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Report path; overrides the config's `output`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    /// Added to every stream seed.
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = BenchDetector::Optwin)]
    pub detector: BenchDetector,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(100_000..))]
    pub n: u64,
    #[arg(long, default_value_t = 0.5, value_parser = positive)]
    pub rho: f64,
    #[arg(long, default_value_t = 25_000, value_parser = clap::value_parser!(u32).range(30..))]
    pub w_max: u32,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TableExportArgs {
    /// Binary table to export; when absent the table is built from --rho etc.
    #[arg(long, conflicts_with = "rho")]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = 0.99, value_parser = confidence)]
    pub delta: f64,
    #[arg(long, value_parser = positive, required_unless_present = "table")]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 25_000, value_parser = clap::value_parser!(u32).range(30..))]
    pub w_max: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecomputeSummary {
    pub path: PathBuf,
    pub w_proof: Option<usize>,
    pub bytes: usize,
}

pub fn cmd_precompute(args: &PrecomputeArgs) -> Result<PrecomputeSummary> {
    let cfg = args.params.config()?;
    let path = output::resolve(&args.out);
    let table = CutTable::build(&cfg)?;
    let bytes = table.to_bytes();
    output::write_atomic(&path, |w| w.write_all(&bytes).map_err(|e| CliError::io(&path, e)))?;
    Ok(PrecomputeSummary { path, w_proof: table.w_proof(), bytes: bytes.len() })
}

pub fn cmd_table_export(args: &TableExportArgs) -> Result<PathBuf> {
    let table = match (&args.table, args.rho) {
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| CliError::io(path, e))?;
            CutTable::read_binary(BufReader::new(file))?
        }
        (None, Some(rho)) => CutTable::build(&OptwinConfig::new(args.delta, rho, args.w_max as usize)?)?,
        (None, None) => return Err(CliError::Config("either --table or --rho is required".into())),
    };
    let path = output::resolve(&args.out);
    output::write_atomic(&path, |w| Ok(table.write_csv(w)?))?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub report: PathBuf,
    pub accuracy: Option<PathBuf>,
    pub results: RunResults,
}

/// Sibling file holding prequential accuracies: `report.csv` -> `report_accuracy.csv`.
pub fn accuracy_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = report.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    report.with_file_name(format!("{stem}_accuracy{ext}"))
}

pub fn write_accuracy<W: Write + ?Sized>(results: &RunResults, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{ACCURACY_HEADER}")?;
    for ((exp, det), acc) in &results.accuracy {
        writeln!(w, "{},{},{acc:.6}", csv_field(exp), csv_field(det))?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<RunSummary> {
    let cfg = RunConfig::load(&args.config)?;
    let target = args
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("report.csv"));
    let report = output::resolve(&target);
    let opts = RunOptions { jobs: args.jobs as usize, seed_base: args.seed_base };
    let results = run_config(&cfg, &opts)?;
    output::write_atomic(&report, |w| Ok(write_report(&results.reports, w)?))?;
    let accuracy = if results.accuracy.is_empty() {
        None
    } else {
        let path = accuracy_path(&report);
        output::write_atomic(&path, |w| write_accuracy(&results, w).map_err(|e| CliError::io(&path, e)))?;
        Some(path)
    };
    Ok(RunSummary { report, accuracy, results })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<BenchSummary> {
    run_bench(&BenchParams {
        detector: args.detector,
        n: args.n as usize,
        rho: args.rho,
        w_max: args.w_max as usize,
        reps: args.reps,
        seed: args.seed_base,
    })
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Precompute(a) => cmd_precompute(a).map(|s| {
            match s.w_proof {
                Some(w) => println!("w_proof {w}"),
                None => println!("w_proof none (no window length admits an optimal cut)"),
            }
            println!("wrote {} ({} bytes)", s.path.display(), s.bytes);
        }),
        Command::Run(a) => cmd_run(a).map(|s| {
            println!("wrote {} ({} rows)", s.report.display(), s.results.reports.len());
            if let Some(p) = s.accuracy {
                println!("wrote {}", p.display());
            }
        }),
        Command::Bench(a) => cmd_bench(a).map(|s| println!("{s}")),
        Command::TableExport(a) => cmd_table_export(a).map(|p| println!("wrote {}", p.display())),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
