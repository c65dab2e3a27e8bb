//! q-exponentials of lattice raising operators and ground-state vectors.

use serde::Serialize;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::linalg::{div_exact_entries, Operator};
use crate::qpoly::{LaurentPoly, Rational};
use crate::repkit::{digits, Algebra, Generator, QRing, SiteRep};
use crate::scalar::Scalar;

/// {m}_r = 1 + r + ... + r^(m-1) in the scalar ring.
fn brace<S: Scalar>(m: u32, r: &S) -> S {
    let mut acc = S::zero();
    let mut p = S::one();
    for _ in 0..m {
        acc.add_ref(&p);
        p = p.mul_ref(r);
    }
    acc
}

/// Σ_{n≥0} X^n / {n}_r! for nilpotent X.
pub fn q_exp_operator<S: Scalar>(x: &Operator<S>, r: &S) -> Result<Operator<S>> {
    let dim = x.dim();
    let mut acc = Operator::identity(dim);
    let mut power = Operator::identity(dim);
    let mut fact = S::one();
    for m in 1..=dim as u32 + 1 {
        power = power.mul(x);
        if power.is_zero() {
            return Ok(acc);
        }
        fact = fact.mul_ref(&brace(m, r));
        acc = acc.add(&div_exact_entries(&power, &fact)?);
    }
    Err(Error::NotNilpotent(dim))
}

/// exp_r(X) v without forming the operator.
pub fn q_exp_apply<S: Scalar>(x: &Operator<S>, r: &S, v: &[S]) -> Result<Vec<S>> {
    let dim = x.dim();
    let mut acc = v.to_vec();
    let mut cur = v.to_vec();
    let mut fact = S::one();
    for m in 1..=dim as u32 + 1 {
        cur = x.apply(&cur);
        if cur.iter().all(|c| c.is_zero()) {
            return Ok(acc);
        }
        fact = fact.mul_ref(&brace(m, r));
        for (a, c) in acc.iter_mut().zip(&cur) {
            let t = c
                .div_exact(&fact)
                .ok_or_else(|| Error::Inexact(format!("{} / {}", c.to_text(), fact.to_text())))?;
            a.add_ref(&t);
        }
    }
    Err(Error::NotNilpotent(dim))
}

/// Base of the q-exponential attached to e_i: r = q^{(α_i, α_i)}.
pub fn exp_base<S: Scalar>(alg: Algebra, i: usize, ring: &QRing<S>) -> S {
    ring.q_pow(alg.inner(i, i))
}

/// Compares exp_r(Δ^(L) e_i) with the ordered product Π_j exp_r(k^{⊗j-1} ⊗ e_i ⊗ 1).
pub fn verify_pseudofactorization<S: Scalar>(rep: &SiteRep<S>, i: usize, l: usize) -> Result<bool> {
    if !(1..=4).contains(&l) {
        return Err(Error::Domain(format!("pseudofactorization checks need L in 1..=4, got {l}")));
    }
    let alg = rep.alg;
    let d = rep.site_dim();
    let r = exp_base(alg, i, rep.ring());
    let series = q_exp_operator(&rep.lfold(&Generator::E(i), l)?, &r)?;
    let e = rep.generator(&Generator::E(i));
    let k = rep.generator(&Generator::k_simple(alg, i));
    let mut product = Operator::identity(d.pow(l as u32));
    for j in 0..l {
        let mut x = Operator::identity(1);
        for _ in 0..j {
            x = x.kron(&k);
        }
        x = x.kron(&e).kron(&Operator::identity(d.pow((l - j - 1) as u32)));
        product = product.mul(&q_exp_operator(&x, &r)?);
    }
    let tol = if S::EXACT { 0.0 } else { 1e-9 };
    Ok(series.first_difference(&product, tol).is_none())
}

/// Order in which the q-exponentials hit the vacuum: the first entry acts first.
pub fn ground_state_order(alg: Algebra) -> [usize; 2] {
    match alg {
        Algebra::A2 => [2, 1],
        Algebra::C2 => [1, 2],
    }
}

/// Zero-energy vector of A^(L), split as `base + eps * correction`.
#[derive(Clone, Debug)]
pub struct GroundState<S> {
    pub alg: Algebra,
    pub l: usize,
    pub eps: Rational,
    pub base: Vec<S>,
    pub correction: Vec<S>,
}

impl<S: Scalar> GroundState<S> {
    pub fn weight(&self, idx: usize) -> S {
        let mut w = self.base[idx].clone();
        w.add_ref(&S::from_rational(&self.eps).mul_ref(&self.correction[idx]));
        w
    }

    pub fn vector(&self) -> Vec<S> {
        (0..self.base.len()).map(|i| self.weight(i)).collect()
    }

    pub fn configuration(&self, idx: usize) -> Configuration {
        Configuration::from_index(idx, self.alg.site_dim(), self.l)
    }
}

/// Ground state: the q-exponential symmetry applied to the vacuum, plus for
/// C2 the ε-weighted sum of words e1^i e2^j e1^k, 1 ≤ i ≤ j ≤ k ≤ L.
pub fn ground_state<S: Scalar>(rep: &SiteRep<S>, l: usize, eps: &Rational) -> Result<GroundState<S>> {
    if l < 1 {
        return Err(Error::Domain("lattice length must be at least 1".into()));
    }
    if num::Signed::is_negative(eps) {
        return Err(Error::Domain("eps must be nonnegative".into()));
    }
    let alg = rep.alg;
    let n = alg.site_dim().pow(l as u32);
    let mut vac = vec![S::zero(); n];
    vac[0] = S::one();
    let e = [rep.lfold(&Generator::E(1), l)?, rep.lfold(&Generator::E(2), l)?];
    let mut base = vac.clone();
    for i in ground_state_order(alg) {
        base = q_exp_apply(&e[i - 1], &exp_base(alg, i, rep.ring()), &base)?;
    }
    let mut correction = vec![S::zero(); n];
    if alg == Algebra::C2 {
        for (_, t) in e2_word_images(rep, l)? {
            for (c, x) in correction.iter_mut().zip(&t) {
                c.add_ref(x);
            }
        }
    }
    Ok(GroundState {
        alg,
        l,
        eps: eps.clone(),
        base,
        correction,
    })
}

/// Images e1^i e2^j e1^k Ω for 1 ≤ i ≤ j ≤ k ≤ L, keyed by (i, j, k).
pub fn e2_word_images<S: Scalar>(rep: &SiteRep<S>, l: usize) -> Result<Vec<([usize; 3], Vec<S>)>> {
    let e1 = rep.lfold(&Generator::E(1), l)?;
    let e2 = rep.lfold(&Generator::E(2), l)?;
    let mut w = vec![S::zero(); rep.site_dim().pow(l as u32)];
    w[0] = S::one();
    let mut out = Vec::new();
    for k in 1..=l {
        w = e1.apply(&w);
        let mut u = w.clone();
        for j in 1..=k {
            u = e2.apply(&u);
            let mut t = u.clone();
            for i in 1..=j {
                t = e1.apply(&t);
                out.push(([i, j, k], t.clone()));
            }
        }
    }
    Ok(out)
}

/// One line of the ground-state dump.
#[derive(Clone, Debug, Serialize)]
pub struct GroundStateEntry {
    pub state: String,
    pub weight: String,
}

pub fn ground_state_entries(gs: &GroundState<LaurentPoly>) -> Vec<GroundStateEntry> {
    (0..gs.base.len())
        .filter(|&i| !gs.base[i].is_zero() || !gs.correction[i].is_zero())
        .map(|i| {
            let (b, c) = (&gs.base[i], &gs.correction[i]);
            let weight = match (b.is_zero(), c.is_zero()) {
                (false, true) => b.to_string(),
                (true, false) => format!("eps*({c})"),
                _ => format!("{b} + eps*({c})"),
            };
            GroundStateEntry {
                state: gs.configuration(i).to_string(),
                weight,
            }
        })
        .collect()
}

/// Exponent of the closed-form weight G(η) = q^n for η ∈ {0,1,2}^L.
///
/// G(η) = Π_i q^{1(η_i≠0)(1-i)} · q^{-c·1(η_i=1)·N^L_i(η)} with c = 1 for A2 and
/// c = 2 for C2.
pub fn closed_form_g_exponent(alg: Algebra, eta: &Configuration) -> Result<i64> {
    if eta.max_state() > 2 {
        return Err(Error::Domain(format!("closed form G needs states in {{0,1,2}}, got {eta}")));
    }
    let c = match alg {
        Algebra::A2 => 1,
        Algebra::C2 => 2,
    };
    let mut exp = 0i64;
    for i in 1..=eta.len() {
        let s = eta.at(i);
        if s != 0 {
            exp += 1 - i as i64;
        }
        if s == 1 {
            exp -= c * eta.count_left(i, |x| x != 0) as i64;
        }
    }
    Ok(exp)
}

pub fn closed_form_g(alg: Algebra, eta: &Configuration) -> Result<LaurentPoly> {
    Ok(LaurentPoly::q_pow(closed_form_g_exponent(alg, eta)?))
}

/// Diagonal of G on {0,1,2}^L in index order.
pub fn g_transform<S: Scalar>(alg: Algebra, l: usize, ring: &QRing<S>) -> Vec<S> {
    Configuration::enumerate(3, l)
        .iter()
        .map(|c| ring.q_pow(closed_form_g_exponent(alg, c).expect("states below 3")))
        .collect()
}

/// Index in V^{⊗L} of a configuration over {0,1,2,T}.
pub fn tensor_index(alg: Algebra, eta: &Configuration) -> usize {
    eta.index(alg.site_dim())
}

/// Whether every base coefficient on doubly-occupation-free states is
/// positive at each sampled q.
pub fn positive_on_b1(gs: &GroundState<LaurentPoly>, samples: &[f64]) -> bool {
    let d = gs.alg.site_dim();
    (0..gs.base.len())
        .filter(|&i| !digits(i, d, gs.l).contains(&3))
        .all(|i| samples.iter().all(|&q| gs.weight(i).eval_at(q) > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::fundamental_rep;
    use crate::scalar::Symbolic;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = Operator::<LaurentPoly>::zeros(3, 3);
        let r = LaurentPoly::q_pow(2);
        assert_eq!(q_exp_operator(&z, &r).unwrap(), Operator::identity(3));
    }

    #[test]
    fn single_site_exponential_truncates() {
        let rep = fundamental_rep::<LaurentPoly, _>(Algebra::C2, &Symbolic);
        let e1 = rep.generator(&Generator::E(1));
        let got = q_exp_operator(&e1, &LaurentPoly::q_pow(2)).unwrap();
        assert_eq!(got, Operator::identity(4).add(&e1));
    }

    #[test]
    fn non_nilpotent_is_rejected() {
        let x = Operator::<f64>::identity(2);
        assert!(matches!(q_exp_operator(&x, &0.5), Err(Error::NotNilpotent(2))));
    }
}
