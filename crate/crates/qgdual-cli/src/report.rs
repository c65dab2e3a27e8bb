use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::params::{with_suffix, Params};
use crate::CliError;

/// Outcome of a run that got as far as producing results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

#[derive(Serialize)]
struct Versions {
    qgdual: &'static str,
    #[serde(rename = "qgdual-cli")]
    cli: &'static str,
}

/// One per run. `started_unix` and `wall_clock_seconds` are the only fields
/// that change between identical invocations.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub selector: Option<&'a str>,
    pub parameters: &'a Params,
    versions: Versions,
    pub outputs: Vec<PathBuf>,
    pub summary: Option<Verdict>,
    pub exit_code: i32,
    pub error: Option<String>,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
}

pub struct Clock {
    started: SystemTime,
    instant: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Self {
            started: SystemTime::now(),
            instant: Instant::now(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn emit_manifest(
    clock: &Clock,
    command: &str,
    selector: Option<&str>,
    params: &Params,
    outputs: Vec<PathBuf>,
    summary: Option<Verdict>,
    exit_code: i32,
    error: Option<String>,
) -> Result<(), CliError> {
    let manifest = RunManifest {
        command,
        selector,
        parameters: params,
        versions: Versions {
            qgdual: qgdual_version(),
            cli: env!("CARGO_PKG_VERSION"),
        },
        outputs,
        summary,
        exit_code,
        error,
        started_unix: clock.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        wall_clock_seconds: clock.instant.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    match &params.out {
        Some(out) => write_file(&with_suffix(out, ".manifest.json"), text.as_bytes()),
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}

fn qgdual_version() -> &'static str {
    // both crates are versioned together in the workspace
    env!("CARGO_PKG_VERSION")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}
