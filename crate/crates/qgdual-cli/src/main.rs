//! `qgdual` command line: verification suites, matrix dumps and simulations.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 usage or input error.

mod dump;
mod params;
mod report;
mod simulate;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use params::{Common, FileConfig, Params};
use report::{emit_manifest, write_json, Clock, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] qgdual::Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Parser, Debug)]
#[command(name = "qgdual", version, about = "Quantum-group two-species exclusion processes")]
struct Cli {
    /// JSON config file whose keys mirror the flag names.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run exact or float identity checks.
    Verify {
        #[arg(long, value_enum)]
        scope: Option<verify::Scope>,
        #[command(flatten)]
        common: Common,
    },
    /// Write a matrix or vector to --out.
    Dump {
        #[arg(value_enum)]
        object: Option<dump::Object>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo runs.
    Simulate {
        #[arg(long, value_enum)]
        mode: Option<simulate::Mode>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QGDUAL_LOG", "warn")).init();
    let cli = Cli::parse();
    let clock = Clock::start();
    let file = match cli.config.as_deref().map(FileConfig::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => return usage(&e),
    };
    let (name, common) = match &cli.command {
        Command::Verify { common, .. } => ("verify", common),
        Command::Dump { common, .. } => ("dump", common),
        Command::Simulate { common, .. } => ("simulate", common),
    };
    let params = match Params::resolve(common, &file, cli.jobs) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    if let Some(n) = params.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let (selector, result) = dispatch(&cli.command, &file, &params);
    let (summary, outputs, code, error) = match result {
        Ok((v, outputs)) => (Some(v), outputs, if v == Verdict::Pass { 0 } else { 1 }, None),
        Err(e) => {
            eprintln!("qgdual {name}: {e}");
            (None, Vec::new(), 2, Some(e.to_string()))
        }
    };
    if let Err(e) = emit_manifest(&clock, name, selector.as_deref(), &params, outputs, summary, code, error) {
        eprintln!("qgdual {name}: cannot write manifest: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}

fn usage(e: &CliError) -> ExitCode {
    eprintln!("qgdual: {e}");
    ExitCode::from(2)
}

type RunResult = Result<(Verdict, Vec<PathBuf>), CliError>;

fn pick<T: clap::ValueEnum>(cli: Option<T>, file: Option<&str>, default: Option<T>, what: &str) -> Result<T, CliError> {
    if let Some(v) = cli {
        return Ok(v);
    }
    if let Some(s) = file {
        return T::from_str(s, true).map_err(|_| CliError::Usage(format!("invalid {what} {s:?} in config")));
    }
    default.ok_or_else(|| CliError::Usage(format!("missing {what}")))
}

fn dispatch(cmd: &Command, file: &FileConfig, p: &Params) -> (Option<String>, RunResult) {
    match cmd {
        Command::Verify { scope, .. } => {
            let scope = match pick(*scope, file.scope.as_deref(), Some(verify::Scope::All), "scope") {
                Ok(s) => s,
                Err(e) => return (None, Err(e)),
            };
            let run = || -> RunResult {
                let r = verify::run(scope, p)?;
                verify::print_human(&r);
                let mut outputs = Vec::new();
                if let Some(out) = &p.out {
                    write_json(out, &r)?;
                    outputs.push(out.clone());
                }
                Ok((r.summary, outputs))
            };
            (Some(scope.name().into()), run())
        }
        Command::Dump { object, .. } => {
            let object = match pick(*object, file.object.as_deref(), None, "dump object") {
                Ok(o) => o,
                Err(e) => return (None, Err(e)),
            };
            let run = || -> RunResult {
                let outputs = dump::run(object, p)?;
                for o in &outputs {
                    println!("wrote {}", o.display());
                }
                Ok((Verdict::Pass, outputs))
            };
            (Some(object.name().into()), run())
        }
        Command::Simulate { mode, .. } => {
            let mode = match pick(*mode, file.mode.as_deref(), Some(simulate::Mode::DualityMc), "mode") {
                Ok(m) => m,
                Err(e) => return (None, Err(e)),
            };
            let run = || -> RunResult {
                let o = simulate::run(mode, p)?;
                Ok((o.verdict, o.outputs))
            };
            (Some(mode.name().into()), run())
        }
    }
}
