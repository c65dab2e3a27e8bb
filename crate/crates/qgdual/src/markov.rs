//! Markov generators of the two-species processes.
//!
//! States are configurations over {0,1,2} indexed base 3 with site 1 most
//! significant. The constructed generator conjugates the lattice Hamiltonian by
//! the ground state and keeps the doubly-free block.

use std::io::Write;

use serde::Serialize;

use crate::central::LatticeHamiltonian;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::groundstate::{closed_form_g_exponent, ground_state, tensor_index};
use crate::linalg::Operator;
use crate::qpoly::{LaurentPoly, RatFunc, Rational};
use crate::repkit::{fundamental_rep, write_operator_csv, Algebra, QRing, SiteRep};
use crate::scalar::{AtQ, Scalar, Symbolic};

/// The six free jump rates. `l_ab` is the rate at which a type-a particle
/// jumps left onto a site holding b (b = 0 empty); `r_ab` likewise to the right.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateTable<S> {
    pub l10: S,
    pub r10: S,
    pub l20: S,
    pub r20: S,
    pub l12: S,
    pub r12: S,
}

impl<S: Scalar> RateTable<S> {
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RateTable<T> {
        RateTable {
            l10: f(&self.l10),
            r10: f(&self.r10),
            l20: f(&self.l20),
            r20: f(&self.r20),
            l12: f(&self.l12),
            r12: f(&self.r12),
        }
    }

    pub fn entries(&self) -> [(&'static str, &S); 6] {
        [
            ("L(1,0)", &self.l10),
            ("R(1,0)", &self.r10),
            ("L(2,0)", &self.l20),
            ("R(2,0)", &self.r20),
            ("L(1,2)", &self.l12),
            ("R(1,2)", &self.r12),
        ]
    }

    /// Rate of the bond move (a, b) -> (b, a), or None if the move is forbidden.
    pub fn bond_rate(&self, a: u8, b: u8) -> Option<&S> {
        match (a, b) {
            (0, 1) => Some(&self.l10),
            (1, 0) => Some(&self.r10),
            (0, 2) => Some(&self.l20),
            (2, 0) => Some(&self.r20),
            (2, 1) => Some(&self.l12),
            (1, 2) => Some(&self.r12),
            _ => None,
        }
    }
}

impl RateTable<RatFunc> {
    pub fn eval(&self, q: f64) -> Result<RateTable<f64>> {
        let e = |r: &RatFunc| r.eval(q);
        Ok(RateTable {
            l10: e(&self.l10)?,
            r10: e(&self.r10)?,
            l20: e(&self.l20)?,
            r20: e(&self.r20)?,
            l12: e(&self.l12)?,
            r12: e(&self.r12)?,
        })
    }
}

fn lp(s: &str) -> LaurentPoly {
    s.parse().expect("valid literal")
}

/// a = q^2 (q^2 + q^-2)^2 / (q^-4 + q^6).
pub fn c2_a() -> RatFunc {
    RatFunc::new(lp("q^2") * lp("q^2 + q^-2").pow(2), lp("q^-4 + q^6")).expect("nonzero denominator")
}

pub fn paper_rates(alg: Algebra) -> RateTable<RatFunc> {
    let one = RatFunc::from_poly(LaurentPoly::one());
    let qm2 = RatFunc::from_poly(LaurentPoly::q_pow(-2));
    match alg {
        Algebra::A2 => RateTable {
            l10: one.clone(),
            r10: qm2.clone(),
            l20: one.clone(),
            r20: qm2.clone(),
            l12: one,
            r12: qm2,
        },
        Algebra::C2 => {
            let a = c2_a();
            RateTable {
                l10: one.clone(),
                r10: qm2.clone(),
                l20: one,
                r20: qm2,
                r12: &a * &RatFunc::from_poly(LaurentPoly::q_pow(-4)),
                l12: a,
            }
        }
    }
}

/// Two-site block H on {0,1,2}^2, rows are the source state.
pub fn two_site_generator<S: Scalar>(rates: &RateTable<S>) -> Operator<S> {
    let mut t = Vec::new();
    for a in 0..3u8 {
        for b in 0..3u8 {
            if let Some(r) = rates.bond_rate(a, b) {
                let (from, to) = (a as usize * 3 + b as usize, b as usize * 3 + a as usize);
                t.push((from, to, r.clone()));
                t.push((from, from, -r.clone()));
            }
        }
    }
    Operator::from_triplets(9, 9, t)
}

/// Σ_i 1 ⊗ H ⊗ 1 on {0,1,2}^L with closed boundaries.
pub fn reference_generator<S: Scalar>(rates: &RateTable<S>, l: usize) -> Result<Operator<S>> {
    crate::central::hamiltonian(&two_site_generator(rates), 3, l)
}

/// Single-species ASEP on {0,1}^L: a particle jumps left at `left`, right at `right`.
pub fn asep_generator<S: Scalar>(left: &S, right: &S, l: usize) -> Result<Operator<S>> {
    let z = S::zero();
    let h = Operator::from_dense(&[
        vec![z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), -left.clone(), left.clone(), z.clone()],
        vec![z.clone(), right.clone(), -right.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), z],
    ]);
    crate::central::hamiltonian(&h, 2, l)
}

/// Indices of {0,1,2}^L inside the single-site tensor space of `alg`.
pub fn b1_indices(alg: Algebra, l: usize) -> Vec<usize> {
    Configuration::enumerate(3, l)
        .iter()
        .map(|c| tensor_index(alg, c))
        .collect()
}

/// An entry from a doubly-free state into a doubly-occupied one that is
/// present at ε > 0 and must vanish in the limit.
#[derive(Clone, Debug, Serialize)]
pub struct LeakEntry {
    pub from: String,
    pub to: String,
    /// Coefficient of ε in the expansion around ε = 0.
    pub eps_coefficient: String,
}

/// Exact output of the conjugation pipeline.
#[derive(Clone, Debug)]
pub struct ConstructedGenerator {
    pub alg: Algebra,
    pub l: usize,
    /// ε⁰ coefficient on {0,1,2}^L, before normalization.
    pub raw: Operator<LaurentPoly>,
    /// ε¹ coefficient of the doubly-free rows within {0,1,2}^L.
    pub eps_slope: Operator<LaurentPoly>,
    /// Entries into doubly-occupied states that vanish only in the limit.
    pub leaks: Vec<LeakEntry>,
    /// Value of the raw (0,1) -> (1,0) entry on the first bond.
    pub normalization: LaurentPoly,
    /// raw / normalization.
    pub normalized: Operator<RatFunc>,
}

/// Row (0,1,0,..) -> (1,0,0,..) used to fix the time scale.
pub fn normalization_pair(l: usize) -> (usize, usize) {
    let mut from = Configuration::empty(l);
    from.set(2, 1);
    let mut to = Configuration::empty(l);
    to.set(1, 1);
    (from.index(3), to.index(3))
}

/// Conjugates A^(L) by the ground state on the full tensor space and expands
/// around ε = 0 on the doubly-free rows.
pub fn constructed_generator(alg: Algebra, l: usize) -> Result<ConstructedGenerator> {
    if !(2..=4).contains(&l) {
        return Err(Error::Domain(format!("exact generators need L in 2..=4, got {l}")));
    }
    let rep: SiteRep<LaurentPoly> = fundamental_rep(alg, &Symbolic);
    let a = LatticeHamiltonian::new(&rep, l)?.full;
    let (base, corr) = match alg {
        Algebra::A2 => {
            let ring = rep.ring();
            let g = Configuration::enumerate(3, l)
                .iter()
                .map(|c| Ok(ring.q_pow(closed_form_g_exponent(alg, c)?)))
                .collect::<Result<Vec<_>>>()?;
            let n = g.len();
            (g, vec![LaurentPoly::zero(); n])
        }
        Algebra::C2 => {
            let gs = ground_state(&rep, l, &Rational::from_integer(1.into()))?;
            (gs.base, gs.correction)
        }
    };
    let b1 = b1_indices(alg, l);
    let mut pos = vec![usize::MAX; a.nrows()];
    for (k, &i) in b1.iter().enumerate() {
        pos[i] = k;
    }
    let n = b1.len();
    let (mut raw, mut slope, mut leaks) = (Vec::new(), Vec::new(), Vec::new());
    for (r, &x) in b1.iter().enumerate() {
        let bx = &base[x];
        let bx2 = bx * bx;
        for (y, axy) in a.row(x) {
            // d/dε [A(x,y) g_y / g_x] at ε = 0
            let num = axy * &(&(&corr[*y] * bx) - &(&base[*y] * &corr[x]));
            let d1 = num
                .div_exact(&bx2)
                .ok_or_else(|| Error::Inexact(format!("slope at row {x}")))?;
            if pos[*y] == usize::MAX {
                if !base[*y].is_zero() {
                    return Err(Error::Domain(format!("doubly-occupied state {y} has nonzero base weight")));
                }
                if !d1.is_zero() {
                    leaks.push(LeakEntry {
                        from: Configuration::from_index(x, alg.site_dim(), l).to_string(),
                        to: Configuration::from_index(*y, alg.site_dim(), l).to_string(),
                        eps_coefficient: d1.to_string(),
                    });
                }
                continue;
            }
            let v = (axy * &base[*y])
                .div_exact(bx)
                .ok_or_else(|| Error::Inexact(format!("conjugation at row {x}")))?;
            raw.push((r, pos[*y], v));
            slope.push((r, pos[*y], d1));
        }
    }
    let raw = Operator::from_triplets(n, n, raw);
    let eps_slope = Operator::from_triplets(n, n, slope);
    let (f, t) = normalization_pair(l);
    let normalization = raw.get(f, t);
    if normalization.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let c = RatFunc::from_poly(normalization.clone());
    let normalized = raw.map(|v| &RatFunc::from_poly(v.clone()) / &c);
    Ok(ConstructedGenerator {
        alg,
        l,
        raw,
        eps_slope,
        leaks,
        normalization,
        normalized,
    })
}

/// Bond-local form of G^-1 A^(L) G on {0,1,2}^L, usable at any L and in any
/// scalar ring. Unnormalized.
pub fn local_generator<S: Scalar>(rep: &SiteRep<S>, l: usize) -> Result<Operator<S>> {
    if l < 2 {
        return Err(Error::Domain("generators need L >= 2".into()));
    }
    let alg = rep.alg;
    let a = crate::central::normalized_a(rep)?;
    let ring: &QRing<S> = rep.ring();
    let d = alg.site_dim();
    let configs = Configuration::enumerate(3, l);
    let exps = configs
        .iter()
        .map(|c| closed_form_g_exponent(alg, c))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Vec::new();
    for (x, cx) in configs.iter().enumerate() {
        for i in 1..l {
            let (p, s) = (cx.at(i), cx.at(i + 1));
            for (col, v) in a.row(p as usize * d + s as usize) {
                let (p2, s2) = ((col / d) as u8, (col % d) as u8);
                if p2 > 2 || s2 > 2 {
                    continue;
                }
                let mut cy = cx.clone();
                cy.set(i, p2);
                cy.set(i + 1, s2);
                let y = cy.index(3);
                t.push((x, y, v.mul_ref(&ring.q_pow(exps[y] - exps[x]))));
            }
        }
    }
    let n = configs.len();
    Ok(Operator::from_triplets(n, n, t))
}

/// Divides every entry by the (0,1) -> (1,0) entry.
pub fn normalize<S: Scalar>(op: &Operator<S>, l: usize) -> Result<(S, Operator<S>)> {
    let (f, t) = normalization_pair(l);
    let c = op.get(f, t);
    if c.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let out = op.try_map(|v| {
        v.div_exact(&c)
            .ok_or_else(|| Error::Inexact(format!("{} / {}", v.to_text(), c.to_text())))
    })?;
    Ok((c, out))
}

/// Normalized float generator at q, built bond-locally.
pub fn float_generator(alg: Algebra, l: usize, q: f64) -> Result<Operator<f64>> {
    if q <= 0.0 || !q.is_finite() {
        return Err(Error::InvalidQ(q));
    }
    let rep: SiteRep<f64> = fundamental_rep(alg, &AtQ(q));
    Ok(normalize(&local_generator(&rep, l)?, l)?.1)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorWitness {
    pub check: String,
    pub from: String,
    pub to: String,
    pub value: String,
}

/// Outcome of the generator checks. Failures are data.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub row_sums_zero: bool,
    pub nonnegative: bool,
    pub local: bool,
    pub conserving: bool,
    pub witnesses: Vec<GeneratorWitness>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.row_sums_zero && self.nonnegative && self.local && self.conserving
    }
}

fn differs_on_one_bond(x: &Configuration, y: &Configuration) -> bool {
    let diff: Vec<usize> = (1..=x.len()).filter(|&i| x.at(i) != y.at(i)).collect();
    match diff.as_slice() {
        [i, j] => *j == *i + 1 && x.at(*i) == y.at(*j) && x.at(*j) == y.at(*i),
        _ => false,
    }
}

/// Row sums, off-diagonal nonnegativity at each q sample, locality and
/// conservation of both particle types.
pub fn validate_generator<S: Scalar>(op: &Operator<S>, l: usize, q_samples: &[f64]) -> ValidationReport {
    let tol = if S::EXACT { 0.0 } else { 1e-9 };
    let cfg = |i: usize| Configuration::from_index(i, 3, l);
    let mut rep = ValidationReport {
        row_sums_zero: true,
        nonnegative: true,
        local: true,
        conserving: true,
        witnesses: Vec::new(),
    };
    let note = |rep: &mut ValidationReport, check: &str, x: usize, y: usize, v: &S| {
        if rep.witnesses.len() < 16 {
            rep.witnesses.push(GeneratorWitness {
                check: check.into(),
                from: cfg(x).to_string(),
                to: cfg(y).to_string(),
                value: v.to_text(),
            });
        }
    };
    for (x, s) in op.row_sums().iter().enumerate() {
        if s.residual() > tol {
            rep.row_sums_zero = false;
            note(&mut rep, "row_sum", x, x, s);
        }
    }
    for (x, y, v) in op.entries() {
        if x == y {
            continue;
        }
        if q_samples.iter().any(|&q| v.eval_at(q) < -tol) {
            rep.nonnegative = false;
            note(&mut rep, "nonnegative", x, y, v);
        }
        let (cx, cy) = (cfg(x), cfg(y));
        if !differs_on_one_bond(&cx, &cy) {
            rep.local = false;
            note(&mut rep, "local", x, y, v);
        }
        if cx.count(1) != cy.count(1) || cx.count(2) != cy.count(2) {
            rep.conserving = false;
            note(&mut rep, "conserving", x, y, v);
        }
    }
    rep
}

/// Aggregates each row over states with equal occupation pattern and compares
/// with single-species ASEP. Returns the first mismatch as (from, to pattern, lhs, rhs).
pub fn lumping_mismatch<S: Scalar>(
    op: &Operator<S>,
    asep: &Operator<S>,
    l: usize,
) -> Option<(String, String, String, String)> {
    let tol = if S::EXACT { 0.0 } else { 1e-9 };
    for x in 0..op.nrows() {
        let cx = Configuration::from_index(x, 3, l);
        let ox = cx.occupation().index(2);
        let mut agg = vec![S::zero(); asep.ncols()];
        for (y, v) in op.row(x) {
            let oy = Configuration::from_index(*y, 3, l).occupation().index(2);
            agg[oy].add_ref(v);
        }
        for (oy, lhs) in agg.iter().enumerate() {
            let rhs = asep.get(ox, oy);
            if (lhs.clone() - rhs.clone()).residual() > tol {
                return Some((
                    cx.to_string(),
                    Configuration::from_index(oy, 2, l).to_string(),
                    lhs.to_text(),
                    rhs.to_text(),
                ));
            }
        }
    }
    None
}

/// Maximum deviation of the float ε-conjugated B1 block from its ε = 0 value.
pub fn epsilon_sweep(l: usize, q: f64, eps: &[Rational]) -> Result<Vec<(f64, f64)>> {
    let rep: SiteRep<f64> = fundamental_rep(Algebra::C2, &AtQ(q));
    let a = LatticeHamiltonian::new(&rep, l)?.full;
    let b1 = b1_indices(Algebra::C2, l);
    let block = |e: &Rational| -> Result<Vec<f64>> {
        let g = ground_state(&rep, l, e)?.vector();
        let mut out = Vec::new();
        for &x in &b1 {
            for &y in &b1 {
                out.push(a.get(x, y) * g[y] / g[x]);
            }
        }
        Ok(out)
    };
    let zero = block(&Rational::from_integer(0.into()))?;
    eps.iter()
        .map(|e| {
            let b = block(e)?;
            let dev = b.iter().zip(&zero).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            Ok((num::ToPrimitive::to_f64(e).unwrap_or(f64::NAN), dev))
        })
        .collect()
}

/// JSON sidecar written next to a generator CSV.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSidecar {
    pub algebra: Algebra,
    #[serde(rename = "L")]
    pub l: usize,
    pub q: serde_json::Value,
    pub normalization_constant: String,
}

pub fn write_generator<S: Scalar, W: Write>(
    csv: &mut W,
    op: &Operator<S>,
    alg: Algebra,
    l: usize,
) -> Result<()> {
    write_operator_csv(csv, op, alg, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_rate_solves_its_equation() {
        let a = c2_a();
        let lhs = &a * &RatFunc::from_poly(lp("q^-4 + q^6"));
        assert_eq!(lhs, RatFunc::from_poly(lp("q^2") * lp("q^2 + q^-2").pow(2)));
        assert_eq!(a.eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn two_site_rows_sum_to_zero() {
        let h = two_site_generator(&paper_rates(Algebra::C2));
        assert!(h.row_sums().iter().all(|s| s.is_zero()));
        assert!(h.row(4).is_empty());
    }
}
