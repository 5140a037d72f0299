use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use episolve_core::driver::{prepare, run_query, solve, DriverError, Mode, SolveOptions};
use episolve_core::fuzz::{run_fuzz, FuzzConfig, FuzzError};
use episolve_core::syntax::parse_literal_list;
use episolve_core::{Layering, Limits, LitSet};
use thiserror::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Auto,
    Naive,
    Split,
    Stratified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LayeringArg {
    Greedy,
    PerComponent,
}

/// Computes the world views of an epistemic logic program.
#[derive(Debug, Parser)]
#[command(name = "episolve", version)]
struct Args {
    /// Program file.
    #[arg(required_unless_present = "fuzz")]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Splitting set for split mode, one literal per line.
    #[arg(long, value_name = "FILE")]
    split_set: Option<PathBuf>,
    /// Literal to evaluate against the world views, e.g. `p(a)` or `K q(d)`.
    #[arg(long, value_name = "LIT")]
    query: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    show_strata: bool,
    #[arg(long, value_enum, default_value = "greedy")]
    layering: LayeringArg,
    /// Print per-stage timings to stderr.
    #[arg(long)]
    timings: bool,
    /// Report engine failures instead of falling back to enumeration.
    #[arg(long)]
    no_fallback: bool,
    #[arg(long, default_value_t = 5000)]
    max_ground: usize,
    #[arg(long, default_value_t = 20)]
    max_modal: usize,
    #[arg(long, default_value_t = 22)]
    max_lits: usize,
    /// Run the differential fuzzer with this JSON configuration.
    #[arg(long, value_name = "CFG")]
    fuzz: Option<PathBuf>,
    /// Overrides the fuzz configuration's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Driver { path: PathBuf, source: DriverError },
    #[error("fuzz configuration {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Fuzz(#[from] FuzzError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Driver { source, .. } => source.exit_code() as u8,
            CliError::Fuzz(FuzzError::CorpusLimit { .. }) => 2,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn limits(args: &Args) -> Limits {
    Limits {
        max_ground: args.max_ground,
        max_modal: args.max_modal,
        max_lits: args.max_lits,
    }
}

fn solve_file(args: &Args, file: &Path) -> Result<(String, u8), CliError> {
    let driver = |source| CliError::Driver {
        path: file.to_path_buf(),
        source,
    };
    let text = read(file)?;
    let split_set = match &args.split_set {
        Some(path) => {
            let lits = parse_literal_list(&read(path)?).map_err(|e| CliError::Driver {
                path: path.clone(),
                source: e.into(),
            })?;
            Some(lits.into_iter().collect::<LitSet>())
        }
        None => None,
    };
    let opts = SolveOptions {
        mode: match args.mode {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Naive => Mode::Naive,
            ModeArg::Split => Mode::Split,
            ModeArg::Stratified => Mode::Stratified,
        },
        split_set,
        limits: limits(args),
        layering: match args.layering {
            LayeringArg::Greedy => Layering::Greedy,
            LayeringArg::PerComponent => Layering::PerComponent,
        },
        fallback: !args.no_fallback,
    };
    let program = prepare(&text, &opts.limits).map_err(driver)?;
    let mut report = solve(&program, &opts).map_err(driver)?;
    if args.show_strata && report.strata.is_none() {
        report.strata = episolve_core::driver::strata_of(&program, opts.layering).map(|s| s.strata);
    }
    if args.timings {
        for (stage, took) in &report.timings {
            eprintln!("time {stage}: {took:.3?}");
        }
    }
    let query = match &args.query {
        Some(q) => Some(run_query(&program, &report, q).map_err(driver)?),
        None => None,
    };
    let out = match args.format {
        Format::Text => {
            let mut s = report.render_text(args.show_strata);
            if let Some(q) = &query {
                s.push_str(&q.render_text());
            }
            s
        }
        Format::Json => {
            let mut v = report.to_json();
            if let Some(q) = &query {
                v["query"] = serde_json::to_value(q).expect("query report serializes");
            }
            format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("report serializes")
            )
        }
    };
    Ok((out, report.exit_code() as u8))
}

/// Reads a fuzz configuration; corpus entries may name files (relative to
/// the configuration) instead of embedding text.
fn load_fuzz_config(path: &Path) -> Result<FuzzConfig, CliError> {
    let bad = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let mut value: serde_json::Value =
        serde_json::from_str(&read(path)?).map_err(|e| bad(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let Some(entries) = value.get_mut("corpus").and_then(|c| c.as_array_mut()) {
        for entry in entries {
            let Some(obj) = entry.as_object_mut() else {
                continue;
            };
            if let Some(file) = obj.remove("program_file") {
                let file = file
                    .as_str()
                    .ok_or_else(|| bad("program_file must be a string".into()))?;
                obj.insert("program".into(), read(&base.join(file))?.into());
            }
            if let Some(file) = obj.remove("split_set_file") {
                let file = file
                    .as_str()
                    .ok_or_else(|| bad("split_set_file must be a string".into()))?;
                let lines: Vec<serde_json::Value> = read(&base.join(file))?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('%'))
                    .map(|l| l.into())
                    .collect();
                obj.insert("split_set".into(), lines.into());
            }
        }
    }
    serde_json::from_value(value).map_err(|e| bad(e.to_string()))
}

fn fuzz(args: &Args, path: &Path) -> Result<(String, u8), CliError> {
    let mut cfg = load_fuzz_config(path)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let report = run_fuzz(&cfg)?;
    let out = match args.format {
        Format::Text => report.render_text(),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
    };
    Ok((out, report.exit_code() as u8))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match (&args.fuzz, &args.file) {
        (Some(cfg), _) => fuzz(&args, cfg),
        (None, Some(file)) => solve_file(&args, file),
        (None, None) => unreachable!("clap requires a file without --fuzz"),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
