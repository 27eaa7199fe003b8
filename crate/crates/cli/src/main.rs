use std::io::Write;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gpaley_core::cyclotomic::{CheckMode, CyclotomicScheme};
use gpaley_core::{verify_theorem, Error, GPaleyParams, ParamSpec, SearchOptions, VerifyOptions, DEFAULT_MAX_Q};
use serde_json::json;

mod scan;

const EXIT_INVALID: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;
const EXIT_USAGE: u8 = 64;
const MAX_Q_ENV: &str = "GPALEY_MAX_Q";

/// Generalised Paley graphs GPaley(q, (q-1)/k) and cyclotomic schemes
/// Cyc(q, k) over GF(p^R).
#[derive(Parser, Debug)]
#[command(name = "gpaley", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a parameter pair without building the graph.
    Classify(ParamArgs),
    /// Compute the automorphism group and check it against the classification.
    Verify(VerifyArgs),
    /// Print the intersection numbers of Cyc(q, k).
    Scheme(SchemeArgs),
    /// Classify (and optionally verify) every valid pair up to a bound.
    Scan(ScanArgs),
    /// Print the graph in graph6 format.
    Graph6(ParamArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct ParamArgs {
    /// Characteristic.
    #[arg(short = 'p', long)]
    p: u64,
    /// Extension degree, q = p^R.
    #[arg(short = 'R', long = "degree")]
    degree: u32,
    /// Index of S in the multiplicative group.
    #[arg(short = 'k', long)]
    k: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Search time limit in seconds.
    #[arg(long, default_value_t = 300)]
    timeout: u64,
    /// Include automorphism group generators in the report.
    #[arg(long)]
    emit_generators: bool,
    /// Seed for the relabelling sanity check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SchemeArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Recount at every pair instead of trusting representatives.
    #[arg(long)]
    full_check: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Jsonl,
    Csv,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Largest q to include.
    #[arg(long)]
    pub max_q: u64,
    /// Run the full verification for q up to this bound.
    #[arg(long, default_value_t = 0)]
    pub verify_up_to: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Jsonl)]
    pub output: OutputFormat,
    /// Skip every row up to and including this `q,k`.
    #[arg(long, value_parser = parse_pair)]
    pub resume_after: Option<(u64, u64)>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search time limit per verified row, in seconds.
    #[arg(long, default_value_t = 300)]
    pub timeout: u64,
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (q, k) = s.split_once(',').ok_or_else(|| format!("expected q,k but got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(q)?, parse(k)?))
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidParams(_) | Error::NotPrime(_) | Error::BoundExceeded { .. } | Error::InvalidField(_) => {
                EXIT_INVALID
            }
            Error::CheckFailed(_) | Error::NotAScheme { .. } | Error::Inconsistent(_) => EXIT_CHECK_FAILED,
            Error::Timeout(_) => EXIT_TIMEOUT,
            _ => 1,
        };
        Failure { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn max_q() -> Result<u64, Failure> {
    match std::env::var(MAX_Q_ENV) {
        Ok(v) => v.trim().parse().map_err(|e| Failure {
            code: EXIT_USAGE,
            error: anyhow::anyhow!("{MAX_Q_ENV}={v:?} is not a positive integer: {e}"),
        }),
        Err(_) => Ok(DEFAULT_MAX_Q),
    }
}

fn params(args: &ParamArgs) -> Result<GPaleyParams, Failure> {
    Ok(GPaleyParams::with_bound(args.p, args.degree, args.k, max_q()?)?)
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).context("writing JSON")?;
    writeln!(out).context("writing JSON")?;
    Ok(())
}

fn classify(args: &ParamArgs) -> Result<(), Failure> {
    let spec = ParamSpec::new(args.p, args.degree, args.k)?;
    print_json(&spec.classify()?)
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let params = params(&args.params)?;
    let opts = VerifyOptions {
        search: SearchOptions::automorphism().with_timeout(Duration::from_secs(args.timeout)),
        seed: args.seed,
        emit_generators: true,
    };
    let mut report = verify_theorem(&params, &opts)?;
    // A failure always comes with its witnesses.
    if report.all_passed() && !args.emit_generators {
        report.generators = None;
    }
    print_json(&report)?;
    report.into_result()?;
    Ok(())
}

fn scheme(args: &SchemeArgs) -> Result<(), Failure> {
    let params = params(&args.params)?;
    let scheme = CyclotomicScheme::from_params(params.clone())?;
    let mode = if args.full_check { CheckMode::Full } else { CheckMode::Representative };
    let table = scheme.intersection_numbers(mode)?;
    print_json(&json!({
        "schema": gpaley_core::SCHEMA,
        "p": params.p(),
        "R": params.degree(),
        "q": params.q(),
        "k": params.k(),
        "full_check": args.full_check,
        "primitive": scheme.is_primitive(),
        "intersection_numbers": table.to_nested(),
    }))
}

fn graph6(args: &ParamArgs) -> Result<(), Failure> {
    println!("{}", params(args)?.build()?.to_graph6());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify(args) => classify(&args),
        Command::Verify(args) => verify(&args),
        Command::Scheme(args) => scheme(&args),
        Command::Scan(args) => {
            let bound = max_q()?;
            scan::run(&args, bound, std::io::stdout().lock()).map_err(Failure::from)
        }
        Command::Graph6(args) => graph6(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
