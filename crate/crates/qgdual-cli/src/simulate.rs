use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use qgdual::duality::Variant;
use qgdual::markov::paper_rates;
use qgdual::sim::{
    current_moment_demo, mc_duality_check, moment_demo_initial, write_trajectory_csv, Dynamics, Estimate, SimConfig,
};
use qgdual::Configuration;

use crate::params::{apply_float, with_suffix, Params};
use crate::report::{write_file, write_json, Verdict};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
pub enum Mode {
    #[value(name = "trajectory")]
    #[serde(rename = "trajectory")]
    Trajectory,
    #[value(name = "duality_mc")]
    #[serde(rename = "duality_mc")]
    DualityMc,
    #[value(name = "moment_demo")]
    #[serde(rename = "moment_demo")]
    MomentDemo,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Trajectory => "trajectory",
            Mode::DualityMc => "duality_mc",
            Mode::MomentDemo => "moment_demo",
        }
    }
}

/// Standard errors a Monte Carlo comparison may be off by.
pub const AGREEMENT_SIGMAS: f64 = 3.0;

pub struct Outcome {
    pub verdict: Verdict,
    pub outputs: Vec<PathBuf>,
}

pub fn run(mode: Mode, p: &Params) -> Result<Outcome, CliError> {
    p.check_l(1..=64, "simulations")?;
    if p.traj == 0 {
        return Err(CliError::Usage("--traj must be at least 1".into()));
    }
    let x = match &p.x {
        Some(s) => p.configuration(s)?,
        None => moment_demo_initial(p.l),
    };
    if x.max_state() > 2 {
        return Err(CliError::Usage(format!("{x} is not a process configuration")));
    }
    match mode {
        Mode::Trajectory => trajectory(p, x),
        Mode::DualityMc | Mode::MomentDemo => duality(mode, p, x),
    }
}

fn trajectory(p: &Params, x: Configuration) -> Result<Outcome, CliError> {
    let mut rates = paper_rates(p.alg).eval(p.q)?;
    apply_float(&mut rates, &p.rate_override, p.q)?;
    let config = SimConfig {
        dynamics: Dynamics::two_species(rates).map_err(|e| CliError::Usage(e.to_string()))?,
        initial: x,
        t: p.t,
        seed: p.seed,
        trajectories: p.traj,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let (fin, events) = config.trajectory()?;
    let finals = config.run()?;
    // per-site occupation of each type across the ensemble
    let density = |state: u8| -> Vec<Estimate> {
        (1..=p.l)
            .map(|i| {
                let s: Vec<f64> = finals.iter().map(|c| f64::from(u8::from(c.at(i) == state))).collect();
                Estimate::from_samples(&s)
            })
            .collect()
    };
    let report = json!({
        "command": "simulate",
        "mode": "trajectory",
        "config": config,
        "recorded": {"final": fin.to_string(), "events": events.len()},
        "estimates": {"type1_density": density(1), "type2_density": density(2)},
    });
    println!(
        "trajectory {} L={} q={} t={} seed={}: {} events, final {}",
        p.alg,
        p.l,
        p.q,
        p.t,
        p.seed,
        events.len(),
        fin
    );
    let mut outputs = Vec::new();
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &events)?;
    match &p.out {
        Some(out) => {
            write_file(out, &csv)?;
            let rep = with_suffix(out, ".report.json");
            write_json(&rep, &report)?;
            outputs.push(out.clone());
            outputs.push(rep);
        }
        None => print!("{}", String::from_utf8_lossy(&csv)),
    }
    Ok(Outcome {
        verdict: Verdict::Pass,
        outputs,
    })
}

/// Single dual particle in the middle of the lattice.
pub fn default_dual(v: Variant, l: usize) -> Configuration {
    let mut y = Configuration::empty(l);
    y.set(l.div_ceil(2), if v == Variant::C2ToAsep { 1 } else { 2 });
    y
}

fn duality(mode: Mode, p: &Params, x: Configuration) -> Result<Outcome, CliError> {
    if !p.rate_override.is_empty() {
        return Err(CliError::Usage("rate overrides apply to trajectory runs only".into()));
    }
    let v = p.variants()[0];
    let y = match &p.y {
        Some(s) => p.configuration(s)?,
        None => default_dual(v, p.l),
    };
    if y.max_state() as usize >= v.dual_site_states() {
        return Err(CliError::Usage(format!("{y} lies outside the dual state space of {v}")));
    }
    let (report, agree): (Value, bool) = match mode {
        Mode::DualityMc => {
            let est = mc_duality_check(v, &x, &y, p.t, p.traj, p.seed, p.q)?;
            let agree = est.agrees(AGREEMENT_SIGMAS);
            println!(
                "duality_mc {v} x={} y={} t={}: lhs {:.6} ± {:.2e}, rhs {:.6} ± {:.2e}, exact {}: {}",
                est.x,
                est.y,
                p.t,
                est.lhs.mean,
                est.lhs.stderr,
                est.rhs.mean,
                est.rhs.stderr,
                est.exact.map(|(a, b)| format!("({a:.6}, {b:.6})")).unwrap_or_else(|| "n/a".into()),
                Verdict::from_bool(agree).label()
            );
            (
                json!({
                    "command": "simulate",
                    "mode": "duality_mc",
                    "seed": p.seed,
                    "estimate": est,
                    "combined_stderr": est.combined_stderr(),
                    "sigmas": AGREEMENT_SIGMAS,
                    "agree": agree,
                }),
                agree,
            )
        }
        _ => {
            let m = current_moment_demo(v, &x, &y, p.t, p.q, p.traj, p.seed)?;
            println!(
                "moment_demo {v} r={} forward {:.6} ± {:.2e}, backward {:.6} ± {:.2e}: {}",
                m.r,
                m.forward.mean,
                m.forward.stderr,
                m.backward.mean,
                m.backward.stderr,
                Verdict::from_bool(m.agree).label()
            );
            let agree = m.agree;
            (
                json!({
                    "command": "simulate",
                    "mode": "moment_demo",
                    "seed": p.seed,
                    "t": p.t,
                    "q": p.q,
                    "report": m,
                }),
                agree,
            )
        }
    };
    let mut outputs = Vec::new();
    if let Some(out) = &p.out {
        write_json(out, &report)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        verdict: Verdict::from_bool(agree),
        outputs,
    })
}
