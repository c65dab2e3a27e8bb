//! Continuous-time simulation, exact semigroup action and Monte Carlo duality.
//!
//! Random streams: trajectory k of a run with seed s draws from
//! `ChaCha20Rng::seed_from_u64(s)` with stream `2k` for the forward process and
//! `2k + 1` for the dual process.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::duality::{duality_exponent, Variant};
use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::markov::{paper_rates, reference_generator, RateTable};

/// Bond dynamics of a nearest-neighbour exclusion process with swaps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dynamics {
    pub rates: RateTable<f64>,
    /// Site states available (3 for the two-species processes, 2 for ASEP).
    pub site_states: usize,
}

impl Dynamics {
    pub fn two_species(rates: RateTable<f64>) -> Result<Self> {
        if let Some((name, r)) = rates.entries().into_iter().find(|(_, r)| !(**r >= 0.0 && r.is_finite())) {
            return Err(Error::Domain(format!("rate {name} = {r} is not a finite nonnegative number")));
        }
        Ok(Self { rates, site_states: 3 })
    }

    /// Single-species ASEP with left rate `left` and right rate `right`.
    pub fn asep(left: f64, right: f64) -> Result<Self> {
        let mut d = Self::two_species(RateTable {
            l10: left,
            r10: right,
            l20: 0.0,
            r20: 0.0,
            l12: 0.0,
            r12: 0.0,
        })?;
        d.site_states = 2;
        Ok(d)
    }

    /// The forward process for an algebra's rates at q.
    pub fn for_algebra(alg: crate::repkit::Algebra, q: f64) -> Result<Self> {
        check_q(q)?;
        Self::two_species(paper_rates(alg).eval(q)?)
    }

    /// The dual process of a duality variant at q.
    pub fn dual_of(variant: Variant, q: f64) -> Result<Self> {
        match variant {
            Variant::C2ToAsep => Self::asep(1.0, q.powi(-2)),
            v => Self::for_algebra(v.algebra(), q),
        }
    }

    fn bond_rate(&self, a: u8, b: u8) -> f64 {
        self.rates.bond_rate(a, b).copied().unwrap_or(0.0)
    }

    /// Float generator matrix on the configuration space of length `l`.
    pub fn generator(&self, l: usize) -> Result<Operator<f64>> {
        if l < 2 {
            return Err(Error::Domain("generators need L >= 2".into()));
        }
        if self.site_states == 3 {
            return reference_generator(&self.rates, l);
        }
        let d = self.site_states;
        let mut h = Vec::new();
        for a in 0..d as u8 {
            for b in 0..d as u8 {
                let r = self.bond_rate(a, b);
                if r > 0.0 {
                    let from = a as usize * d + b as usize;
                    h.push((from, b as usize * d + a as usize, r));
                    h.push((from, from, -r));
                }
            }
        }
        crate::central::hamiltonian(&Operator::from_triplets(d * d, d * d, h), d, l)
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

/// One jump: the pair on bond (site, site + 1) before and after.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub site: usize,
    pub from_state: String,
    pub to_state: String,
}

/// Per-trajectory random stream.
pub fn trajectory_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Event-driven simulation up to time `t`. All enabled clocks are resampled
/// after every event.
pub fn simulate<R: Rng>(
    dynamics: &Dynamics,
    initial: &Configuration,
    t: f64,
    rng: &mut R,
    mut trajectory: Option<&mut Vec<Event>>,
) -> Configuration {
    let mut eta = initial.clone();
    let l = eta.len();
    let mut now = 0.0;
    let mut rates = vec![0.0; l.saturating_sub(1)];
    loop {
        let mut total = 0.0;
        for i in 1..l {
            rates[i - 1] = dynamics.bond_rate(eta.at(i), eta.at(i + 1));
            total += rates[i - 1];
        }
        if total <= 0.0 {
            return eta;
        }
        let wait: f64 = rng.sample::<f64, _>(Exp1) / total;
        if now + wait > t {
            return eta;
        }
        now += wait;
        let mut u = rng.gen::<f64>() * total;
        let mut bond = l - 1;
        for (k, r) in rates.iter().enumerate() {
            if u < *r {
                bond = k + 1;
                break;
            }
            u -= r;
        }
        // guard against rounding leaving u past the last enabled bond
        while rates[bond - 1] == 0.0 {
            bond -= 1;
        }
        let (a, b) = (eta.at(bond), eta.at(bond + 1));
        eta.set(bond, b);
        eta.set(bond + 1, a);
        if let Some(tr) = trajectory.as_deref_mut() {
            tr.push(Event {
                time: now,
                site: bond,
                from_state: format!("{a}{b}"),
                to_state: format!("{b}{a}"),
            });
        }
    }
}

/// Time of the first event from a fixed configuration, or None if frozen.
pub fn first_event_time<R: Rng>(dynamics: &Dynamics, eta: &Configuration, rng: &mut R) -> Option<f64> {
    let total: f64 = (1..eta.len()).map(|i| dynamics.bond_rate(eta.at(i), eta.at(i + 1))).sum();
    (total > 0.0).then(|| rng.sample::<f64, _>(Exp1) / total)
}

pub fn write_trajectory_csv<W: Write>(w: &mut W, events: &[Event]) -> Result<()> {
    writeln!(w, "time,site,from_state,to_state")?;
    for e in events {
        writeln!(w, "{:.17e},{},{},{}", e.time, e.site, e.from_state, e.to_state)?;
    }
    Ok(())
}

/// Full simulation request.
#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub dynamics: Dynamics,
    pub initial: Configuration,
    pub t: f64,
    pub seed: u64,
    pub trajectories: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::Domain(format!("horizon t = {} must be finite and nonnegative", self.t)));
        }
        if self.initial.max_state() as usize >= self.dynamics.site_states {
            return Err(Error::Domain(format!("initial configuration {} has invalid states", self.initial)));
        }
        Ok(())
    }

    /// Final configurations of every trajectory, in trajectory order.
    pub fn run(&self) -> Result<Vec<Configuration>> {
        self.validate()?;
        Ok((0..self.trajectories as u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = trajectory_rng(self.seed, 2 * k);
                simulate(&self.dynamics, &self.initial, self.t, &mut rng, None)
            })
            .collect())
    }

    /// Single recorded trajectory (index 0).
    pub fn trajectory(&self) -> Result<(Configuration, Vec<Event>)> {
        self.validate()?;
        let mut events = Vec::new();
        let mut rng = trajectory_rng(self.seed, 0);
        let fin = simulate(&self.dynamics, &self.initial, self.t, &mut rng, Some(&mut events));
        Ok((fin, events))
    }
}

const POISSON_TAIL: f64 = 1e-14;
const MAX_STEP: f64 = 30.0;

fn uniformized(op: &Operator<f64>, v: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time {t} must be finite and nonnegative")));
    }
    let n = op.nrows();
    if v.len() != n {
        return Err(Error::Domain(format!("vector length {} does not match dimension {n}", v.len())));
    }
    let lambda = (0..n).map(|i| -op.get(i, i)).fold(0.0, f64::max);
    if lambda == 0.0 || t == 0.0 {
        return Ok(v.to_vec());
    }
    let p = Operator::identity(n).add(&op.scale(&(1.0 / lambda)));
    let steps = ((lambda * t) / MAX_STEP).ceil().max(1.0) as usize;
    let lt = lambda * t / steps as f64;
    let bound = (lt + 20.0 * lt.sqrt() + 60.0) as usize;
    let mut cur = v.to_vec();
    for _ in 0..steps {
        let mut w = (-lt).exp();
        let mut mass = w;
        let mut term = cur.clone();
        let mut acc: Vec<f64> = term.iter().map(|x| w * x).collect();
        let mut k = 0;
        while 1.0 - mass > POISSON_TAIL {
            k += 1;
            if k > bound {
                return Err(Error::Divergence(format!(
                    "Poisson tail {:.3e} after {k} terms (lambda*t = {lt})",
                    1.0 - mass
                )));
            }
            term = p.apply(&term);
            w *= lt / k as f64;
            mass += w;
            for (a, x) in acc.iter_mut().zip(&term) {
                *a += w * x;
            }
        }
        cur = acc;
    }
    Ok(cur)
}

/// e^{t L^T} v: evolves a probability vector.
pub fn expm_action(gen: &Operator<f64>, v: &[f64], t: f64) -> Result<Vec<f64>> {
    uniformized(&gen.transpose(), v, t)
}

/// e^{t L} f: expectation of an observable as a function of the start state.
pub fn expm_observable(gen: &Operator<f64>, f: &[f64], t: f64) -> Result<Vec<f64>> {
    uniformized(gen, f, t)
}

/// Kahan-compensated mean and standard error, summed in slice order.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let kahan = |it: &mut dyn Iterator<Item = f64>| {
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for x in it {
            let y = x - c;
            let t = s + y;
            c = (t - s) - y;
            s = t;
        }
        s
    };
    let mean = kahan(&mut samples.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = kahan(&mut samples.iter().map(|x| (x - mean).powi(2)));
    (mean, (ss / (n as f64 - 1.0)).sqrt() / (n as f64).sqrt())
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let (mean, stderr) = mean_stderr(samples);
        Self { mean, stderr, samples: samples.len() }
    }
}

/// Both sides of E_x[D(X(t), y)] = E_y[D(x, Y(t))].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityEstimate {
    pub variant: Variant,
    pub x: String,
    pub y: String,
    pub t: f64,
    pub q: f64,
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// Exact (lhs, rhs) from the semigroup, when computed.
    pub exact: Option<(f64, f64)>,
}

/// Absolute slack for zero-variance comparisons.
pub const ZERO_VARIANCE_SLACK: f64 = 1e-12;

impl DualityEstimate {
    pub fn combined_stderr(&self) -> f64 {
        self.lhs.stderr + self.rhs.stderr
    }

    /// |lhs - rhs| and each side against the exact values, within `k`
    /// combined standard errors.
    pub fn agrees(&self, k: f64) -> bool {
        let tol = k * self.combined_stderr() + ZERO_VARIANCE_SLACK;
        let mut ok = (self.lhs.mean - self.rhs.mean).abs() <= tol;
        if let Some((el, er)) = self.exact {
            ok &= (self.lhs.mean - el).abs() <= tol && (self.rhs.mean - er).abs() <= tol;
            ok &= (el - er).abs() <= 1e-9 * el.abs().max(er.abs()).max(1.0);
        }
        ok
    }
}

/// D(η, ξ) as a float at q.
pub fn duality_float(variant: Variant, eta: &Configuration, xi: &Configuration, q: f64) -> Result<f64> {
    Ok(match duality_exponent(variant, eta, xi)? {
        Some(n) => q.powi(n as i32),
        None => 0.0,
    })
}

/// Largest lattice for which the exact semigroup comparison is computed.
pub const EXACT_MAX_L: usize = 6;

pub fn mc_duality_check(
    variant: Variant,
    x: &Configuration,
    y: &Configuration,
    t: f64,
    n: usize,
    seed: u64,
    q: f64,
) -> Result<DualityEstimate> {
    check_q(q)?;
    duality_exponent(variant, x, y)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("horizon t = {t} must be finite and nonnegative")));
    }
    let alg = variant.algebra();
    let fwd = Dynamics::for_algebra(alg, q)?;
    let dual = Dynamics::dual_of(variant, q)?;
    let lhs: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, 2 * k);
            let xt = simulate(&fwd, x, t, &mut rng, None);
            duality_float(variant, &xt, y, q).expect("domain checked")
        })
        .collect();
    let rhs: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, 2 * k + 1);
            let yt = simulate(&dual, y, t, &mut rng, None);
            duality_float(variant, x, &yt, q).expect("domain checked")
        })
        .collect();
    let l = x.len();
    let exact = if (2..=EXACT_MAX_L).contains(&l) {
        let rows = Configuration::enumerate(3, l);
        let cols = Configuration::enumerate(dual.site_states, l);
        let f: Vec<f64> = rows.iter().map(|e| duality_float(variant, e, y, q)).collect::<Result<_>>()?;
        let g: Vec<f64> = cols.iter().map(|c| duality_float(variant, x, c, q)).collect::<Result<_>>()?;
        let el = expm_observable(&fwd.generator(l)?, &f, t)?[x.index(3)];
        let er = expm_observable(&dual.generator(l)?, &g, t)?[y.index(dual.site_states)];
        Some((el, er))
    } else {
        None
    };
    Ok(DualityEstimate {
        variant,
        x: x.to_string(),
        y: y.to_string(),
        t,
        q,
        lhs: Estimate::from_samples(&lhs),
        rhs: Estimate::from_samples(&rhs),
        exact,
    })
}

/// Moment of the duality observable computed forward (full process) and
/// backward (r-particle dual evolution).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub observable: String,
    pub variant: Variant,
    pub r: usize,
    pub initial: String,
    pub dual: String,
    pub forward: Estimate,
    pub backward: Estimate,
    pub exact: Option<(f64, f64)>,
    pub agree: bool,
}

pub fn current_moment_demo(
    variant: Variant,
    initial: &Configuration,
    dual: &Configuration,
    t: f64,
    q: f64,
    n: usize,
    seed: u64,
) -> Result<MomentReport> {
    let est = mc_duality_check(variant, initial, dual, t, n, seed, q)?;
    let agree = est.agrees(3.0);
    Ok(MomentReport {
        observable: "duality_function".into(),
        variant,
        r: dual.occupied(),
        initial: est.x,
        dual: est.y,
        forward: est.lhs,
        backward: est.rhs,
        exact: est.exact,
        agree,
    })
}

/// Default initial condition of the moment demo: type 1 on site 1, type 2 elsewhere.
pub fn moment_demo_initial(l: usize) -> Configuration {
    let mut c = Configuration::new(vec![2; l]).expect("valid states");
    c.set(1, 1);
    c
}

/// Kolmogorov-Smirnov statistic against Exp(rate) and its asymptotic p-value.
pub fn ks_exponential(samples: &[f64], rate: f64) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = 1.0 - (-rate * x).exp();
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let lam = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-2.0 * (k * k) as f64 * lam * lam).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}
