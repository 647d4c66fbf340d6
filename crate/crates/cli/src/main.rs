//! `cran`: command-line access to the region builders, the projection
//! engine, sum-rate sweeps, the gap audit and the worked examples.
//!
//! Exit codes: 0 when everything passes, 1 when a verification fails or a
//! computation aborts, 2 for usage and input errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use cran_core::regions::{aux_rates_left, gds_substitute};
use cran_core::verify::{example1_run, example2_run, Example1Budget, ExampleReport, Verdict};
use cran_core::{
    audit_random, fme_project, format_system, gds_project, parse_system, run_sweep, to_csv, Channel, FmeOptions,
    PolytopeError, RegionSpec, Substitution, SweepConfig, SweepError,
};

/// Worker-thread count. Work runs on one thread, so the value is only
/// validated.
const THREADS_ENV: &str = "CRAN_THREADS";

#[derive(Parser)]
#[command(name = "cran", version, about = "Rate regions and sum-rate tools for downlink C-RAN with cooperation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sub {
    Scheme1,
    Scheme2,
    Scheme3,
    Cor4,
    Cor5,
}

impl From<Sub> for Substitution {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Scheme1 => Substitution::SchemeI,
            Sub::Scheme2 => Substitution::SchemeII,
            Sub::Scheme3 => Substitution::SchemeIII,
            Sub::Cor4 => Substitution::Cor4,
            Sub::Cor5 => Substitution::Cor5,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print a symbolic region in the system text format.
    Region {
        /// GDS-T1, GDS-I, GDS-II, GDS-III, COR4, COR5, GCOMP-T2, DDF-P1 or CUTSET.
        id: String,
        /// Base stations (DDF-P1 and CUTSET only).
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Users (DDF-P1 and CUTSET only).
        #[arg(long, default_value_t = 2)]
        l: usize,
        /// Apply a substitution to GDS-T1 without eliminating.
        #[arg(long, conflicts_with = "project")]
        substitute: Option<Sub>,
        /// Apply a substitution to GDS-T1 and eliminate the auxiliary rates.
        #[arg(long)]
        project: Option<Sub>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a sum-rate sweep from a JSON config and write CSV.
    SumrateSweep {
        config: PathBuf,
        /// Overrides the config's `output`; stdout when neither is given.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Audit the constant gap on random networks and print a JSON summary.
    GapAudit {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = 4)]
        lmax: usize,
    },
    /// Eliminate variables from a system file (`-` reads stdin).
    Fme {
        input: PathBuf,
        /// Comma-separated variables to eliminate.
        #[arg(long, value_delimiter = ',', conflicts_with = "keep")]
        eliminate: Vec<String>,
        /// Comma-separated variables to keep; all others are eliminated.
        #[arg(long, value_delimiter = ',')]
        keep: Vec<String>,
        /// Disable Chernikov and dominance pruning.
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        row_cap: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the worked examples and print JSON reports.
    VerifyExamples {
        /// 1 or 2; both when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: Option<u8>,
        /// Crossover probability of the binary symmetric second hop.
        #[arg(long, default_value_t = 0.1)]
        crossover: f64,
        /// Fronthaul capacity of the single hop.
        #[arg(long, default_value_t = 0.3)]
        c1: f64,
        /// Largest auxiliary alphabet tried.
        #[arg(long, default_value_t = 4)]
        cap: usize,
        /// Random data-sharing distributions drawn for the Z-channel.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure::Usage(e.into())
    }

    fn runtime(e: impl Into<anyhow::Error>) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Emitted output and whether every check passed.
type Outcome = Result<bool, Failure>;

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::runtime),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout").map_err(Failure::runtime),
    }
}

fn read_in(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin").map_err(Failure::usage)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::usage)
}

fn region(id: &str, n: usize, l: usize, substitute: Option<Sub>, project: Option<Sub>, output: Option<&Path>) -> Outcome {
    let spec = RegionSpec::from_id(id, n, l).map_err(Failure::usage)?;
    let base = spec.system().map_err(Failure::usage)?;
    let text = match (substitute, project) {
        (None, None) => format_system(&base),
        _ if spec != RegionSpec::GdsT1 => {
            return Err(Failure::usage(anyhow!("substitutions apply to GDS-T1 only, not {spec}")));
        }
        (Some(s), _) => {
            let sys = gds_substitute(&base, s.into()).map_err(Failure::runtime)?;
            // A hint for `fme --eliminate`; comments are ignored by the parser.
            format!("# eliminate: {}\n{}", aux_rates_left(&sys).join(","), format_system(&sys))
        }
        (None, Some(s)) => {
            format_system(&gds_project(&base, s.into(), FmeOptions::default()).map_err(Failure::runtime)?)
        }
    };
    write_out(output, &text)?;
    Ok(true)
}

fn sweep(config: &Path, output: Option<&Path>) -> Outcome {
    let text = read_in(config)?;
    let cfg = SweepConfig::from_json(&text).map_err(|e| match e {
        SweepError::Json { line, column, message } => {
            Failure::usage(anyhow!("{}:{line}:{column}: {message}", config.display()))
        }
        other => Failure::usage(other),
    })?;
    let rows = run_sweep(&cfg).map_err(|e| match e {
        SweepError::Invalid { .. } | SweepError::Json { .. } => Failure::usage(e),
        other => Failure::runtime(other),
    })?;
    let target = output.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(PathBuf::from));
    write_out(target.as_deref(), &to_csv(&rows))?;
    Ok(true)
}

fn gap_audit(instances: usize, seed: u64, nmax: usize, lmax: usize) -> Outcome {
    if instances == 0 || nmax == 0 || lmax == 0 {
        return Err(Failure::usage(anyhow!("--instances, --nmax and --lmax must be positive")));
    }
    let summary = audit_random(instances, seed, nmax, lmax).map_err(Failure::runtime)?;
    let json = serde_json::to_string_pretty(&summary).map_err(Failure::runtime)?;
    write_out(None, &(json + "\n"))?;
    Ok(summary.pass)
}

fn fme(input: &Path, eliminate: &[String], keep: &[String], no_prune: bool, row_cap: Option<usize>, output: Option<&Path>) -> Outcome {
    let text = read_in(input)?;
    let sys = parse_system(&text).map_err(|e| match e {
        PolytopeError::Parse { line, column, message } => {
            Failure::usage(anyhow!("{}:{line}:{column}: {message}", input.display()))
        }
        other => Failure::usage(other),
    })?;
    let targets: Vec<&str> = if keep.is_empty() {
        eliminate.iter().map(String::as_str).collect()
    } else {
        if let Some(v) = keep.iter().find(|v| !sys.has_variable(v)) {
            return Err(Failure::usage(anyhow!("unknown variable `{v}` in --keep")));
        }
        sys.variables().iter().map(String::as_str).filter(|v| !keep.iter().any(|k| k == v)).collect()
    };
    if let Some(v) = targets.iter().find(|v| !sys.has_variable(v)) {
        return Err(Failure::usage(anyhow!("unknown variable `{v}` in --eliminate")));
    }
    let mut opts = FmeOptions::default();
    if no_prune {
        opts.chernikov = false;
        opts.dominance = false;
    }
    if let Some(cap) = row_cap {
        opts.row_cap = cap;
    }
    let projected = fme_project(&sys, &targets, opts).map_err(Failure::runtime)?;
    write_out(output, &format_system(&projected))?;
    Ok(true)
}

fn verify_examples(example: Option<u8>, crossover: f64, c1: f64, cap: usize, samples: usize, seed: u64) -> Outcome {
    let mut reports: Vec<ExampleReport> = Vec::new();
    if example.is_none_or(|e| e == 1) {
        let channel = Channel::bsc("X1", "Y1", crossover).map_err(Failure::usage)?;
        let budget = Example1Budget { cap, seed, ..Example1Budget::default() };
        reports.push(example1_run(&channel, c1, budget).map_err(Failure::usage)?);
    }
    if example.is_none_or(|e| e == 2) {
        reports.extend(example2_run(samples, seed).map_err(Failure::runtime)?);
    }
    let json = serde_json::to_string_pretty(&reports).map_err(Failure::runtime)?;
    write_out(None, &(json + "\n"))?;
    Ok(reports.iter().all(|r| r.verdict != Verdict::Failed))
}

fn check_threads() -> Result<(), Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.parse::<usize>().map_or(true, |n| n == 0) => {
            Err(Failure::usage(anyhow!("{THREADS_ENV} must be a positive integer, got `{v}`")))
        }
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Outcome {
    check_threads()?;
    match cli.command {
        Command::Region { id, n, l, substitute, project, output } => {
            region(&id, n, l, substitute, project, output.as_deref())
        }
        Command::SumrateSweep { config, output } => sweep(&config, output.as_deref()),
        Command::GapAudit { instances, seed, nmax, lmax } => gap_audit(instances, seed, nmax, lmax),
        Command::Fme { input, eliminate, keep, no_prune, row_cap, output } => {
            fme(&input, &eliminate, &keep, no_prune, row_cap, output.as_deref())
        }
        Command::VerifyExamples { example, crossover, c1, cap, samples, seed } => {
            verify_examples(example, crossover, c1, cap, samples, seed)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on its own usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("cran: verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("cran: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("cran: {e:#}");
            ExitCode::from(1)
        }
    }
}
