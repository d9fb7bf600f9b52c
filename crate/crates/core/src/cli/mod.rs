//! Command-line surface: `run`, `verify`, `presets list`.
//!
//! Exit codes: 0 ok, 1 criterion failure or module error, 2 usage error.
//! Module errors are also written to stderr as one JSON line.

pub mod config;
pub mod presets;
pub mod run;
pub mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::verify::{verify, VerifyOptions};
use config::{ExperimentConfig, Grid, Overrides};

pub const WORKERS_ENV: &str = "PR_MARKOV_WORKERS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "pr-markov", version, about = "Markov-chain analysis of pseudo-random quantum circuits")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a preset or a TOML config; writes CSV, a JSON run record and optional SVG.
    Run(RunArgs),
    /// Run the acceptance checks.
    Verify {
        /// Skip the Monte Carlo criteria.
        #[arg(long)]
        fast: bool,
        /// Comma-separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
    /// Preset catalogue.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum PresetAction {
    List,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Values `0,0.5` or range `0:1:0.01`.
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

enum Failure {
    Usage(String),
    Module(Error),
}

fn error_record(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

fn init_workers(workers: Option<usize>) -> Result<(), Failure> {
    if let Some(w) = workers {
        if w == 0 {
            return Err(Failure::Usage(format!("{WORKERS_ENV}/--workers must be positive")));
        }
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(())
}

fn resolve_run(args: &RunArgs) -> Result<Vec<ExperimentConfig>, Failure> {
    let usage = |e: Error| Failure::Usage(e.to_string());
    let overrides = Overrides {
        n: args.n.clone(),
        c: args.c.as_deref().map(Grid::parse).transpose().map_err(usage)?,
        p: args.p.as_deref().map(Grid::parse).transpose().map_err(usage)?,
        iterations: args.iterations,
        samples: args.samples,
        seed: args.seed,
        out_dir: args.out.clone(),
        svg: args.svg,
    };
    let mut configs = match (&args.preset, &args.config) {
        (Some(name), _) => {
            let p = presets::preset(name).ok_or_else(|| {
                Failure::Usage(format!("unknown preset '{name}' (see `presets list`)"))
            })?;
            p.configs.into_iter().map(|c| presets::with_preset_dir(c, name)).collect()
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            vec![ExperimentConfig::from_toml(&text).map_err(usage)?]
        }
        (None, None) => return Err(Failure::Usage("run needs --preset or --config".into())),
    };
    for c in &mut configs {
        c.apply(&overrides);
        c.validate().map_err(usage)?;
    }
    Ok(configs)
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    init_workers(cli.workers)?;
    match cli.command {
        Command::Presets { action: PresetAction::List } => {
            for p in presets::presets() {
                println!("{:<22} {:>2} run(s)  {}", p.name, p.configs.len(), p.description);
            }
            Ok(EXIT_OK)
        }
        Command::Verify { fast, only } => {
            let reports = verify(&VerifyOptions { fast, only }, |r| {
                println!("{}", r.summary_line());
                for l in r.detail_lines() {
                    println!("{l}");
                }
            });
            let failed = reports.iter().filter(|r| !r.passed()).count();
            println!("{}/{} criteria passed", reports.len() - failed, reports.len());
            Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Run(args) => {
            for cfg in resolve_run(&args)? {
                let w = run::run_and_write(&cfg).map_err(Failure::Module)?;
                println!("{}", w.csv.display());
                if let Some(s) = w.svg {
                    println!("{}", s.display());
                }
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Module(e)) => {
            eprintln!("{}", error_record(&e));
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

pub fn main() -> ExitCode {
    main_with_args(std::env::args_os())
}
