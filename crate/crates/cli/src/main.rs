//! `immwit`: reproduces the detection-rate studies and witness tables.
//!
//! Thread count: `--threads`, else the `IMMWIT_THREADS` environment
//! variable, else one thread per core.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use immwit::exec::{configure_threads, current_threads, threads_from_env, Execution, THREADS_ENV};
use immwit::experiments::{
    run_multicopy, run_obs3_certificate, run_simplex_scan, run_table1, run_table2, young_dump, DetectionReport, ExperimentConfig,
    OutputFormat,
};
use immwit::optimizer::SolverOptions;

/// Returned when `obs3` finds no verified violation.
const EXIT_NOT_DETECTED: u8 = 2;

#[derive(Parser)]
#[command(name = "immwit", version, about = "Entanglement detection from immanant inequalities")]
struct Cli {
    /// Worker threads (overrides the IMMWIT_THREADS environment variable).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Admm,
    Subgradient,
}

impl Solver {
    fn options(self) -> SolverOptions {
        match self {
            Solver::Admm => SolverOptions::default(),
            Solver::Subgradient => SolverOptions::projected_subgradient(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Detection rates of the projector-filtered reduction map (six criteria).
    Table1 {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// 10^4 states and 50d unitaries per state.
        #[arg(long)]
        full_scale: bool,
        /// Haar-row unitaries per state (default 10d, or 50d at full scale).
        #[arg(long)]
        unitaries: Option<usize>,
        /// Share one set of Haar-row unitaries across all states.
        #[arg(long)]
        shared_unitaries: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Per-trial verdicts and minimum eigenvalues as CSV.
        #[arg(long)]
        trials: Option<PathBuf>,
    },
    /// Detection rate over diagonal qutrit filters diag(a, b, c).
    Simplex {
        #[arg(long, default_value_t = 40)]
        resolution: usize,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Single-copy reduction criterion against the two-copy determinant criterion.
    Multicopy {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        trials: Option<PathBuf>,
    },
    /// Largest number of PPT parties each three-party witness tolerates, d = 2..5.
    Table2 {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Solver::Admm)]
        solver: Solver,
    },
    /// Four-qutrit contracted witness and a locally PPT state it detects.
    Obs3 {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the product-state sanity check.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random product states checked against the witness.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Solver::Admm)]
        solver: Solver,
    },
    /// Young projectors on (C^d)^{⊗k} as JSON nested [re, im] arrays.
    Young {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = sink(path)?;
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn write_report(report: &DetectionReport, out: Option<&Path>, format: Format, trials: Option<&Path>) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = sink(out)?;
            report.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => write_text(out, &report.to_json()?)?,
    }
    if let Some(path) = trials {
        let mut w = sink(Some(path))?;
        report.write_trials_csv(&mut w)?;
        w.flush()?;
    }
    for c in &report.criteria {
        eprintln!("{:>14}: {:>6} / {}  ({:.4})", c.criterion, c.detected, report.n, c.rate);
    }
    for c in report.containment.iter().filter(|c| c.violations > 0) {
        let kind = if c.structural { "structural" } else { "empirical" };
        eprintln!("containment {} ⊆ {} ({kind}) fails on {} states", c.subset, c.superset, c.violations);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let threads = cli.threads.or_else(threads_from_env);
    configure_threads(threads);
    if threads.is_some() {
        eprintln!("threads: {} ({THREADS_ENV})", current_threads());
    }

    match cli.command {
        Command::Table1 { d, n, seed, full_scale, unitaries, shared_unitaries, out, format, trials } => {
            let mut cfg = ExperimentConfig::table1(d, n, seed);
            if full_scale {
                cfg = cfg.full_scale();
            }
            if let Some(u) = unitaries {
                cfg.unitaries_per_state = u;
            }
            cfg.fresh_unitaries = !shared_unitaries;
            cfg.output = out.clone();
            cfg.format = format.into();
            cfg.dump_trials = trials.is_some();
            let report = run_table1(&cfg.with_execution(exec))?;
            write_report(&report, out.as_deref(), format, trials.as_deref())?;
        }
        Command::Simplex { resolution, n, seed, out, format } => {
            let mut cfg = ExperimentConfig::simplex(resolution, n, seed).with_execution(exec);
            cfg.output = out.clone();
            cfg.format = format.into();
            let scan = run_simplex_scan(&cfg)?;
            match format {
                Format::Csv => {
                    let mut w = sink(out.as_deref())?;
                    scan.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Json => write_text(out.as_deref(), &scan.to_json()?)?,
            }
            eprintln!("{} grid nodes, {} states each", scan.nodes.len(), n);
        }
        Command::Multicopy { n, seed, out, format, trials } => {
            let mut cfg = ExperimentConfig::multicopy(n, seed).with_execution(exec);
            cfg.output = out.clone();
            cfg.format = format.into();
            cfg.dump_trials = trials.is_some();
            let report = run_multicopy(&cfg)?;
            write_report(&report, out.as_deref(), format, trials.as_deref())?;
        }
        Command::Table2 { out, format, solver } => {
            let report = run_table2(exec, &solver.options());
            match format {
                Format::Csv => {
                    let mut w = sink(out.as_deref())?;
                    report.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Json => write_text(out.as_deref(), &report.to_json()?)?,
            }
            for c in &report.cells {
                let t = c.t.map_or_else(|| "error".into(), |t| t.to_string());
                let mark = if c.matches() { "" } else { "  (differs)" };
                eprintln!("{:>12} d={}: t={t} expected {}{mark}", c.witness, c.d, c.expected);
            }
            eprintln!("{} of {} cells differ from the expected table", report.mismatches(), report.cells.len());
        }
        Command::Obs3 { out, seed, samples, solver } => {
            let mut cfg = ExperimentConfig::obs3(seed).with_execution(exec);
            cfg.n = samples;
            cfg.output = out.clone();
            let report = run_obs3_certificate(&cfg, &solver.options())?;
            write_text(out.as_deref(), &report.to_json()?)?;
            eprintln!(
                "tr(W X) = {:.6e} (threshold {:.3e}), verified: {}",
                report.certificate.value, report.certificate.threshold, report.verification.detected
            );
            if !report.detected() {
                eprintln!("no verified violation found");
                return Ok(ExitCode::from(EXIT_NOT_DETECTED));
            }
        }
        Command::Young { k, d, dump } => {
            let dump_data = young_dump(k, d)?;
            write_text(dump.as_deref(), &dump_data.to_json()?)?;
            for p in &dump_data.projectors {
                eprintln!("{:>12}: rank {}", p.partition, p.rank.round());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
