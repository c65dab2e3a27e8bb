//! Duality functions, q-exponential symmetries and exact duality checks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::central::LatticeHamiltonian;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::groundstate::{closed_form_g_exponent, exp_base, q_exp_operator, tensor_index};
use crate::linalg::Operator;
use crate::markov::{asep_generator, constructed_generator, local_generator, normalization_pair};
use crate::qpoly::{LaurentPoly, RatFunc};
use crate::repkit::{fundamental_rep, Algebra, Generator, QRing, SiteRep};
use crate::scalar::{AtQ, Scalar, Symbolic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "A2_self")]
    A2Self,
    #[serde(rename = "C2_self")]
    C2Self,
    #[serde(rename = "C2_to_ASEP")]
    C2ToAsep,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::A2Self, Variant::C2Self, Variant::C2ToAsep];

    pub fn algebra(self) -> Algebra {
        match self {
            Variant::A2Self => Algebra::A2,
            _ => Algebra::C2,
        }
    }

    /// Number of site states available to the dual configuration.
    pub fn dual_site_states(self) -> usize {
        match self {
            Variant::C2ToAsep => 2,
            _ => 3,
        }
    }

    pub fn symmetry_recipe(self) -> Recipe {
        match self {
            Variant::C2Self => Recipe::ExpE2Only,
            _ => Recipe::ExpE2ExpE1,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::A2Self => "A2_self",
            Variant::C2Self => "C2_self",
            Variant::C2ToAsep => "C2_to_ASEP",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown duality variant {s:?}")))
    }
}

fn check_domain(variant: Variant, eta: &Configuration, xi: &Configuration) -> Result<()> {
    if eta.len() != xi.len() {
        return Err(Error::Domain(format!("length mismatch: {eta} vs {xi}")));
    }
    if eta.max_state() > 2 {
        return Err(Error::Domain(format!("{eta} is not a process configuration")));
    }
    let limit = variant.dual_site_states() as u8 - 1;
    if xi.max_state() > limit {
        return Err(Error::Domain(format!("{xi} lies outside the dual state space of {variant}")));
    }
    Ok(())
}

/// Exponent of D(η, ξ) = q^n, or None where D vanishes.
pub fn duality_exponent(variant: Variant, eta: &Configuration, xi: &Configuration) -> Result<Option<i64>> {
    check_domain(variant, eta, xi)?;
    let occ = |s: u8| s != 0;
    let mut exp = 0i64;
    for i in 1..=eta.len() {
        let (x, e, n) = (xi.at(i), eta.at(i), i as i64);
        match variant {
            Variant::A2Self => match x {
                0 => {}
                1 if e == 1 => exp += 2 * eta.count_right(i, |s| s == 1) as i64 + 2 * n,
                2 if e != 0 => exp += 2 * eta.count_right(i, occ) as i64 + 2 * n,
                _ => return Ok(None),
            },
            Variant::C2ToAsep => {
                if x == 1 {
                    if e == 0 {
                        return Ok(None);
                    }
                    exp += 2 * eta.count_right(i, occ) as i64 + 2 * n;
                }
            }
            Variant::C2Self => {
                let (nle, nlx) = (eta.count_left(i, occ) as i64, xi.count_left(i, occ) as i64);
                let c2 = xi.count_left(i, |s| s == 2) as i64;
                match (x, e) {
                    (0, 0) => {}
                    (2, 2) => exp += 2 * (n - 1),
                    (1, 1) => exp += 2 * (n - 1 + nle + nlx),
                    (2, 1) => exp += 2 * (nle + n - 1 + nlx - 2 * c2),
                    _ => return Ok(None),
                }
            }
        }
    }
    Ok(Some(exp))
}

pub fn duality_value(variant: Variant, eta: &Configuration, xi: &Configuration) -> Result<LaurentPoly> {
    Ok(match duality_exponent(variant, eta, xi)? {
        Some(n) => LaurentPoly::q_pow(n),
        None => LaurentPoly::zero(),
    })
}

/// Dense-backed D table: rows over {0,1,2}^L, columns over the dual space.
pub fn duality_table<S: Scalar>(variant: Variant, l: usize, ring: &QRing<S>) -> Result<Operator<S>> {
    let rows = Configuration::enumerate(3, l);
    let cols = Configuration::enumerate(variant.dual_site_states(), l);
    let mut t = Vec::new();
    for (i, eta) in rows.iter().enumerate() {
        for (j, xi) in cols.iter().enumerate() {
            if let Some(n) = duality_exponent(variant, eta, xi)? {
                t.push((i, j, ring.q_pow(n)));
            }
        }
    }
    Ok(Operator::from_triplets(rows.len(), cols.len(), t))
}

/// Which product of q-exponentials forms the symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recipe {
    #[serde(rename = "exp_e2_exp_e1")]
    ExpE2ExpE1,
    #[serde(rename = "exp_e2_only")]
    ExpE2Only,
}

/// Symmetry S on V^{⊗L}. For A2 the e2 exponential acts first, for C2 the
/// e1 exponential acts first.
pub fn symmetry_matrix<S: Scalar>(rep: &SiteRep<S>, recipe: Recipe, l: usize) -> Result<Operator<S>> {
    if !(1..=6).contains(&l) {
        return Err(Error::Domain(format!("symmetry matrices need L in 1..=6, got {l}")));
    }
    let alg = rep.alg;
    let exp = |i: usize| -> Result<Operator<S>> {
        q_exp_operator(&rep.lfold(&Generator::E(i), l)?, &exp_base(alg, i, rep.ring()))
    };
    match (alg, recipe) {
        (_, Recipe::ExpE2Only) => exp(2),
        (Algebra::A2, Recipe::ExpE2ExpE1) => Ok(exp(1)?.mul(&exp(2)?)),
        (Algebra::C2, Recipe::ExpE2ExpE1) => Ok(exp(2)?.mul(&exp(1)?)),
    }
}

/// Whether [S, A^(L)] = 0.
pub fn symmetry_commutes<S: Scalar>(rep: &SiteRep<S>, s: &Operator<S>, l: usize) -> Result<bool> {
    let h = LatticeHamiltonian::new(rep, l)?.full;
    let tol = if S::EXACT { 0.0 } else { 1e-9 };
    Ok(s.commutator(&h).first_nonzero(tol).is_none())
}

/// Tensor configuration used as the symmetry column for a dual configuration.
/// For the ASEP dual an occupied site carries the created type.
pub fn dual_column(variant: Variant, xi: &Configuration) -> Configuration {
    match variant {
        Variant::C2ToAsep => Configuration::new(xi.sites().iter().map(|&s| if s == 1 { 2 } else { 0 }).collect())
            .expect("states below 3"),
        _ => xi.clone(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProportionalityWitness {
    pub eta: String,
    pub xi: String,
    pub derived: String,
    pub closed_form: String,
}

/// Ratio between G^-1 S G^-1 and the closed-form table, per dual configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ProportionalityReport {
    pub variant: Variant,
    #[serde(rename = "L")]
    pub l: usize,
    /// (ξ, constant) for every column where both sides are proportional.
    pub constants: Vec<(String, String)>,
    /// True when every column is proportional.
    pub proportional: bool,
    /// True when one constant serves all columns.
    pub single_constant: bool,
    /// Symmetry columns vanish on doubly-occupied rows.
    pub doubly_occupied_rows_vanish: bool,
    pub witness: Option<ProportionalityWitness>,
    #[serde(skip)]
    pub column_constants: Vec<Option<RatFunc>>,
}

/// Computes G^-1 S G^-1 with the closed-form G and compares each column with
/// the closed-form duality table.
pub fn duality_from_symmetry(variant: Variant, l: usize) -> Result<ProportionalityReport> {
    if !(1..=4).contains(&l) {
        return Err(Error::Domain(format!("symmetry-derived duality needs L in 1..=4, got {l}")));
    }
    let alg = variant.algebra();
    let rep: SiteRep<LaurentPoly> = fundamental_rep(alg, &Symbolic);
    let s = symmetry_matrix(&rep, variant.symmetry_recipe(), l)?;
    let rows = Configuration::enumerate(3, l);
    let cols = Configuration::enumerate(variant.dual_site_states(), l);
    let d = alg.site_dim();
    let mut report = ProportionalityReport {
        variant,
        l,
        constants: Vec::new(),
        proportional: true,
        single_constant: true,
        doubly_occupied_rows_vanish: true,
        witness: None,
        column_constants: Vec::new(),
    };
    for xi in &cols {
        let col = dual_column(variant, xi);
        let cj = tensor_index(alg, &col);
        let gx = closed_form_g_exponent(alg, &col)?;
        for r in 0..s.nrows() {
            if Configuration::from_index(r, d, l).has_double() && !s.get(r, cj).is_zero() {
                report.doubly_occupied_rows_vanish = false;
            }
        }
        let mut constant: Option<RatFunc> = None;
        let mut ok = true;
        for eta in &rows {
            let derived = s
                .get(tensor_index(alg, eta), cj)
                .shift(-gx - closed_form_g_exponent(alg, eta)?);
            let closed = duality_value(variant, eta, xi)?;
            let mismatch = match (derived.is_zero(), closed.is_zero()) {
                (true, true) => false,
                (false, false) => {
                    let ratio = RatFunc::new(derived.clone(), closed.clone())?;
                    match &constant {
                        None => {
                            constant = Some(ratio);
                            false
                        }
                        Some(c) => *c != ratio,
                    }
                }
                _ => true,
            };
            if mismatch {
                ok = false;
                if report.witness.is_none() {
                    report.witness = Some(ProportionalityWitness {
                        eta: eta.to_string(),
                        xi: xi.to_string(),
                        derived: derived.to_string(),
                        closed_form: closed.to_string(),
                    });
                }
                break;
            }
        }
        if !ok {
            report.proportional = false;
            report.column_constants.push(None);
            continue;
        }
        if let Some(c) = &constant {
            report.constants.push((xi.to_string(), c.to_string()));
        }
        report.column_constants.push(constant);
    }
    let mut distinct = report.column_constants.iter().flatten();
    if let Some(first) = distinct.next() {
        report.single_constant = report.proportional && distinct.all(|c| c == first);
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityFailure {
    pub z: String,
    pub y: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub variant: Variant,
    #[serde(rename = "L")]
    pub l: usize,
    pub ring: String,
    pub pairs_checked: usize,
    pub failures: Vec<DualityFailure>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks (P D)(z, y) = (D Q^T)(z, y) for every pair, where P is the process
/// generator and Q the dual generator.
pub fn check_duality<S: Scalar>(
    variant: Variant,
    l: usize,
    process: &Operator<S>,
    dual: &Operator<S>,
    table: &Operator<S>,
) -> DualityReport {
    let lhs = process.mul(table);
    let rhs = table.mul(&dual.transpose());
    let tol = if S::EXACT {
        0.0
    } else {
        let scale = lhs
            .entries()
            .chain(rhs.entries())
            .map(|(_, _, v)| v.eval_at(0.0).abs())
            .fold(1.0, f64::max);
        1e-10 * scale
    };
    let cols = table.ncols();
    let failures: Vec<DualityFailure> = (0..table.nrows())
        .into_par_iter()
        .flat_map_iter(|z| {
            let (lhs, rhs) = (&lhs, &rhs);
            (0..cols).filter_map(move |y| {
                let (a, b) = (lhs.get(z, y), rhs.get(z, y));
                ((a.clone() - b.clone()).residual() > tol).then(|| DualityFailure {
                    z: Configuration::from_index(z, 3, l).to_string(),
                    y: Configuration::from_index(y, variant.dual_site_states(), l).to_string(),
                    lhs: a.to_text(),
                    rhs: b.to_text(),
                })
            })
        })
        .collect();
    DualityReport {
        variant,
        l,
        ring: S::ring_name().to_string(),
        pairs_checked: table.nrows() * cols,
        failures,
    }
}

/// Dual generator matching an unnormalized process generator: the process
/// itself for self-dualities, ASEP scaled by the process time scale otherwise.
pub fn dual_generator<S: Scalar>(variant: Variant, l: usize, process: &Operator<S>, ring: &QRing<S>) -> Result<Operator<S>> {
    match variant {
        Variant::C2ToAsep => {
            let (f, t) = normalization_pair(l);
            let c = process.get(f, t);
            asep_generator(&c, &c.mul_ref(&ring.q_pow(-2)), l)
        }
        _ => Ok(process.clone()),
    }
}

/// Exact check with the generator from the conjugation pipeline.
pub fn verify_duality_exact(variant: Variant, l: usize) -> Result<DualityReport> {
    if !(2..=4).contains(&l) {
        return Err(Error::Domain(format!("exact duality checks need L in 2..=4, got {l}")));
    }
    let alg = variant.algebra();
    let rep: SiteRep<LaurentPoly> = fundamental_rep(alg, &Symbolic);
    let process = constructed_generator(alg, l)?.raw;
    let dual = dual_generator(variant, l, &process, rep.ring())?;
    let table = duality_table(variant, l, rep.ring())?;
    Ok(check_duality(variant, l, &process, &dual, &table))
}

/// Float check at q with the bond-local generator.
pub fn verify_duality_float(variant: Variant, l: usize, q: f64) -> Result<DualityReport> {
    if !(2..=6).contains(&l) {
        return Err(Error::Domain(format!("float duality checks need L in 2..=6, got {l}")));
    }
    if q <= 0.0 || !q.is_finite() {
        return Err(Error::InvalidQ(q));
    }
    let rep: SiteRep<f64> = fundamental_rep(variant.algebra(), &AtQ(q));
    let process = local_generator(&rep, l)?;
    let dual = dual_generator(variant, l, &process, rep.ring())?;
    let table = duality_table(variant, l, rep.ring())?;
    Ok(check_duality(variant, l, &process, &dual, &table))
}
