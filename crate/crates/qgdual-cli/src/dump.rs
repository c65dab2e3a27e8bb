use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use qgdual::central::LatticeHamiltonian;
use qgdual::duality::{duality_table, Variant};
use qgdual::groundstate::{ground_state, ground_state_entries};
use qgdual::markov::{local_generator, normalization_pair, write_generator, GeneratorSidecar};
use qgdual::repkit::{write_operator_csv, QRing};
use qgdual::{fundamental_rep, AtQ, Configuration, LaurentPoly, Scalar, SiteRep, Symbolic};

use crate::params::{with_suffix, Params, Ring};
use crate::report::{write_file, write_json};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Object {
    Generator,
    Duality,
    Groundstate,
    Hamiltonian,
}

impl Object {
    pub fn name(self) -> &'static str {
        match self {
            Object::Generator => "generator",
            Object::Duality => "duality",
            Object::Groundstate => "groundstate",
            Object::Hamiltonian => "hamiltonian",
        }
    }
}

/// Writes the requested object and returns the paths written.
pub fn run(object: Object, p: &Params) -> Result<Vec<PathBuf>, CliError> {
    let out = p
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("dump needs --out".into()))?;
    match object {
        Object::Generator => p.check_l(2..=8, "generator dumps")?,
        Object::Duality => p.check_l(1..=5, "duality dumps")?,
        Object::Groundstate => p.check_l(1..=5, "ground-state dumps")?,
        Object::Hamiltonian => p.check_l(1..=5, "Hamiltonian dumps")?,
    }
    match p.ring {
        Ring::Exact => dump_in(object, p, &fundamental_rep::<LaurentPoly, _>(p.alg, &Symbolic), &out),
        Ring::Float => dump_in(object, p, &fundamental_rep::<f64, _>(p.alg, &AtQ(p.q)), &out),
    }
}

fn dump_in<S: Scalar>(object: Object, p: &Params, rep: &SiteRep<S>, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut buf = Vec::new();
    match object {
        Object::Generator => {
            let op = local_generator(rep, p.l)?;
            write_generator(&mut buf, &op, p.alg, p.l)?;
            write_file(out, &buf)?;
            let (f, t) = normalization_pair(p.l);
            let sidecar = GeneratorSidecar {
                algebra: p.alg,
                l: p.l,
                q: p.q_json(),
                normalization_constant: op.get(f, t).to_text(),
            };
            let side = with_suffix(out, ".sidecar.json");
            write_json(&side, &sidecar)?;
            return Ok(vec![out.to_path_buf(), side]);
        }
        Object::Hamiltonian => {
            let h = LatticeHamiltonian::new(rep, p.l)?.full;
            write_operator_csv(&mut buf, &h, p.alg, p.l)?;
            write_file(out, &buf)?;
        }
        Object::Duality => {
            let v = match p.variant {
                Some(v) => v,
                None => default_variant(p),
            };
            write_file(out, duality_csv(v, p.l, rep.ring())?.as_bytes())?;
        }
        Object::Groundstate => {
            let entries: Vec<serde_json::Value> = match p.ring {
                Ring::Exact => {
                    // the exact dump prints each weight with its eps part
                    let exact = ground_state(&fundamental_rep::<LaurentPoly, _>(p.alg, &Symbolic), p.l, &p.eps_value)?;
                    ground_state_entries(&exact)
                        .into_iter()
                        .map(|e| json!({"state": e.state, "weight": e.weight}))
                        .collect()
                }
                Ring::Float => {
                    let g = ground_state(rep, p.l, &p.eps_value)?;
                    (0..g.base.len())
                        .filter(|&i| !g.weight(i).is_zero())
                        .map(|i| json!({"state": g.configuration(i).to_string(), "weight": g.weight(i).eval_at(p.q)}))
                        .collect()
                }
            };
            let doc = json!({
                "algebra": p.alg,
                "L": p.l,
                "ring": p.ring,
                "q": p.q_json(),
                "eps": p.eps,
                "entries": entries,
            });
            write_json(out, &doc)?;
        }
    }
    Ok(vec![out.to_path_buf()])
}

fn default_variant(p: &Params) -> Variant {
    p.variants()[0]
}

/// Dense table: one row per process configuration, one column per dual one.
fn duality_csv<S: Scalar>(v: Variant, l: usize, ring: &QRing<S>) -> Result<String, CliError> {
    let table = duality_table(v, l, ring)?;
    let cols = Configuration::enumerate(v.dual_site_states(), l);
    let mut s = String::new();
    let _ = writeln!(s, "# variant={v} L={l} ring={}", S::ring_name());
    s.push_str("eta\\xi");
    for c in &cols {
        let _ = write!(s, ",{c}");
    }
    s.push('\n');
    for (i, eta) in Configuration::enumerate(3, l).iter().enumerate() {
        let _ = write!(s, "{eta}");
        for j in 0..cols.len() {
            let _ = write!(s, ",{}", table.get(i, j).to_text());
        }
        s.push('\n');
    }
    Ok(s)
}
