use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use qgdual::duality::Variant;
use qgdual::markov::RateTable;
use qgdual::{Algebra, Configuration, RatFunc, Rational};

use crate::CliError;

/// Flags shared by every subcommand. All optional so that a config file can
/// fill what the command line leaves out.
#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// Algebra: A2 or C2.
    #[arg(long)]
    pub alg: Option<String>,
    /// Lattice length.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Scalar ring: exact or float.
    #[arg(long)]
    pub ring: Option<String>,
    /// Numeric q for float runs.
    #[arg(long)]
    pub q: Option<f64>,
    /// Ground-state deformation parameter, a nonnegative rational such as 1/10.
    #[arg(long)]
    pub eps: Option<String>,
    /// Duality variant: A2_self, C2_self or C2_to_ASEP.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo trajectories.
    #[arg(long)]
    pub traj: Option<usize>,
    /// Time horizon.
    #[arg(long)]
    pub t: Option<f64>,
    /// Initial process configuration, e.g. 1202.
    #[arg(long)]
    pub x: Option<String>,
    /// Dual configuration.
    #[arg(long)]
    pub y: Option<String>,
    /// Primary output file; the manifest goes to <out>.manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace a reference rate, NAME=VALUE with NAME in L10,R10,L20,R20,L12,R12.
    #[arg(long = "rate-override")]
    pub rate_override: Vec<String>,
}

/// JSON config file; keys mirror the flag names.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub alg: Option<String>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub ring: Option<String>,
    pub q: Option<f64>,
    pub eps: Option<String>,
    pub variant: Option<String>,
    pub seed: Option<u64>,
    pub traj: Option<usize>,
    pub t: Option<f64>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(rename = "rate-override")]
    pub rate_override: Option<Vec<String>>,
    pub jobs: Option<usize>,
    pub scope: Option<String>,
    pub object: Option<String>,
    pub mode: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Exact,
    Float,
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ring::Exact => "exact",
            Ring::Float => "float",
        })
    }
}

/// A rate replacement for fault injection.
#[derive(Clone, Debug, Serialize)]
pub struct RateOverride {
    pub name: String,
    pub value: String,
}

impl RateOverride {
    fn parse(s: &str) -> Result<Self, CliError> {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("rate override {s:?} is not NAME=VALUE")))?;
        let name = name.trim().to_ascii_uppercase();
        if !["L10", "R10", "L20", "R20", "L12", "R12"].contains(&name.as_str()) {
            return Err(CliError::Usage(format!("unknown rate {name:?}")));
        }
        Ok(Self { name, value: value.trim().to_string() })
    }

    fn slot<'a, S>(&self, t: &'a mut RateTable<S>) -> &'a mut S {
        match self.name.as_str() {
            "L10" => &mut t.l10,
            "R10" => &mut t.r10,
            "L20" => &mut t.l20,
            "R20" => &mut t.r20,
            "L12" => &mut t.l12,
            _ => &mut t.r12,
        }
    }
}

pub fn apply_exact(rates: &mut RateTable<RatFunc>, overrides: &[RateOverride]) -> Result<(), CliError> {
    for o in overrides {
        let v: RatFunc = o
            .value
            .parse()
            .map_err(|e| CliError::Usage(format!("rate {}: {e}", o.name)))?;
        *o.slot(rates) = v;
    }
    Ok(())
}

pub fn apply_float(rates: &mut RateTable<f64>, overrides: &[RateOverride], q: f64) -> Result<(), CliError> {
    for o in overrides {
        let v = match o.value.parse::<f64>() {
            Ok(v) => v,
            Err(_) => o
                .value
                .parse::<RatFunc>()
                .and_then(|r| r.eval(q))
                .map_err(|e| CliError::Usage(format!("rate {}: {e}", o.name)))?,
        };
        *o.slot(rates) = v;
    }
    Ok(())
}

/// Fully resolved parameters: command line > config file > defaults.
#[derive(Clone, Debug, Serialize)]
pub struct Params {
    pub alg: Algebra,
    #[serde(rename = "L")]
    pub l: usize,
    pub ring: Ring,
    pub q: f64,
    pub eps: String,
    pub variant: Option<Variant>,
    pub seed: u64,
    pub traj: usize,
    pub t: f64,
    pub x: Option<String>,
    pub y: Option<String>,
    pub out: Option<PathBuf>,
    pub rate_override: Vec<RateOverride>,
    pub jobs: Option<usize>,
    #[serde(skip)]
    pub eps_value: Rational,
}

pub const DEFAULT_Q: f64 = 0.5;

fn parse_with<T: std::str::FromStr>(what: &str, s: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| CliError::Usage(format!("invalid {what} {s:?}: {e}")))
}

impl Params {
    pub fn resolve(cli: &Common, file: &FileConfig, jobs: Option<usize>) -> Result<Self, CliError> {
        let alg: Algebra = parse_with("algebra", cli.alg.as_deref().or(file.alg.as_deref()).unwrap_or("C2"))?;
        let variant = cli
            .variant
            .as_deref()
            .or(file.variant.as_deref())
            .map(|s| parse_with::<Variant>("variant", s))
            .transpose()?;
        // an explicit variant pins the algebra when --alg is absent
        let alg = match (cli.alg.as_ref().or(file.alg.as_ref()), variant) {
            (None, Some(v)) => v.algebra(),
            _ => alg,
        };
        if let Some(v) = variant {
            if v.algebra() != alg {
                return Err(CliError::Usage(format!("variant {v} belongs to {}, not {alg}", v.algebra())));
            }
        }
        let ring = match cli.ring.as_deref().or(file.ring.as_deref()).unwrap_or("exact") {
            s if s.eq_ignore_ascii_case("exact") || s.eq_ignore_ascii_case("symbolic") => Ring::Exact,
            s if s.eq_ignore_ascii_case("float") => Ring::Float,
            s => return Err(CliError::Usage(format!("unknown ring {s:?}"))),
        };
        let q = cli.q.or(file.q).unwrap_or(DEFAULT_Q);
        if !(q > 0.0 && q.is_finite()) {
            return Err(CliError::Usage(format!("q must be positive and finite, got {q}")));
        }
        let eps = cli.eps.clone().or_else(|| file.eps.clone()).unwrap_or_else(|| "0".into());
        let eps_value: Rational = parse_with("eps", &eps)?;
        if num::Signed::is_negative(&eps_value) {
            return Err(CliError::Usage(format!("eps must be nonnegative, got {eps}")));
        }
        let x = cli.x.clone().or_else(|| file.x.clone());
        let y = cli.y.clone().or_else(|| file.y.clone());
        let l_default = x.as_ref().map(|s| s.trim().chars().count()).unwrap_or(3);
        let l = cli.l.or(file.l).unwrap_or(l_default);
        let t = cli.t.or(file.t).unwrap_or(1.0);
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("t must be finite and nonnegative, got {t}")));
        }
        let raw_overrides = if cli.rate_override.is_empty() {
            file.rate_override.clone().unwrap_or_default()
        } else {
            cli.rate_override.clone()
        };
        let rate_override = raw_overrides.iter().map(|s| RateOverride::parse(s)).collect::<Result<_, _>>()?;
        let jobs = jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(Self {
            alg,
            l,
            ring,
            q,
            eps,
            variant,
            seed: cli.seed.or(file.seed).unwrap_or(0),
            traj: cli.traj.or(file.traj).unwrap_or(10_000),
            t,
            x,
            y,
            out: cli.out.clone().or_else(|| file.out.clone()),
            rate_override,
            jobs,
            eps_value,
        })
    }

    pub fn check_l(&self, range: std::ops::RangeInclusive<usize>, what: &str) -> Result<(), CliError> {
        if range.contains(&self.l) {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "{what} needs L in {}..={}, got {}",
                range.start(),
                range.end(),
                self.l
            )))
        }
    }

    pub fn configuration(&self, s: &str) -> Result<Configuration, CliError> {
        let c: Configuration = parse_with("configuration", s)?;
        if c.len() != self.l {
            return Err(CliError::Usage(format!("configuration {c} does not have length L = {}", self.l)));
        }
        Ok(c)
    }

    /// Variants to check: the requested one, or every variant of the algebra.
    pub fn variants(&self) -> Vec<Variant> {
        match self.variant {
            Some(v) => vec![v],
            None => Variant::ALL.into_iter().filter(|v| v.algebra() == self.alg).collect(),
        }
    }

    pub fn q_json(&self) -> serde_json::Value {
        match self.ring {
            Ring::Exact => serde_json::Value::String("symbolic".into()),
            Ring::Float => serde_json::json!(self.q),
        }
    }
}

/// `<out><suffix>` as a sibling path.
pub fn with_suffix(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
