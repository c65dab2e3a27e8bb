//! Explicit central elements, the two-site operator A and the lattice
//! Hamiltonian A^(L).

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{div_exact_entries, rank_at, Operator};
use crate::qpoly::{LaurentPoly, RatFunc, Rational};
use crate::repkit::{compare_scaled, Algebra, Generator, RelationReport, SiteRep};
use crate::scalar::Scalar;

/// A noncommutative polynomial in the generators with Laurent coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Element {
    pub terms: Vec<(LaurentPoly, Vec<Generator>)>,
}

impl Element {
    pub fn gen(g: Generator) -> Self {
        Self {
            terms: vec![(LaurentPoly::one(), vec![g])],
        }
    }

    pub fn scalar(c: LaurentPoly) -> Self {
        Self {
            terms: vec![(c, vec![])],
        }
    }

    pub fn e(i: usize) -> Self {
        Self::gen(Generator::E(i))
    }

    pub fn f(i: usize) -> Self {
        Self::gen(Generator::F(i))
    }

    pub fn k(w: &[i64]) -> Self {
        Self::gen(Generator::K(w.to_vec()))
    }

    /// Image under the L-fold coproduct representation.
    pub fn evaluate<S: Scalar>(&self, rep: &SiteRep<S>, l: usize) -> Result<Operator<S>> {
        let n = rep.site_dim().pow(l as u32);
        let mut cache: HashMap<Generator, Operator<S>> = HashMap::new();
        let mut acc = Operator::zeros(n, n);
        for (c, word) in &self.terms {
            let mut prod = Operator::identity(n);
            for g in word {
                if !cache.contains_key(g) {
                    cache.insert(g.clone(), rep.lfold(g, l)?);
                }
                prod = prod.mul(&cache[g]);
            }
            acc = acc.add(&prod.scale(&rep.ring().lift(c)));
        }
        Ok(acc)
    }
}

impl Mul<&Element> for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        let mut terms = Vec::new();
        for (a, wa) in &self.terms {
            for (b, wb) in &rhs.terms {
                let mut w = wa.clone();
                w.extend(wb.iter().cloned());
                terms.push((a * b, w));
            }
        }
        Element { terms }
    }
}

impl Mul<Element> for Element {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        &self * &rhs
    }
}

impl Mul<LaurentPoly> for Element {
    type Output = Element;
    fn mul(self, c: LaurentPoly) -> Element {
        Element {
            terms: self.terms.into_iter().map(|(a, w)| (&a * &c, w)).collect(),
        }
    }
}

impl Add for Element {
    type Output = Element;
    fn add(mut self, rhs: Element) -> Element {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        self + rhs * LaurentPoly::from_int(-1)
    }
}

/// A central element given as an explicit word expansion divided by a
/// Laurent polynomial.
#[derive(Clone, Debug)]
pub struct CentralElement {
    pub alg: Algebra,
    pub element: Element,
    pub divisor: LaurentPoly,
}

fn qp(n: i64) -> LaurentPoly {
    LaurentPoly::q_pow(n)
}

fn lp(s: &str) -> LaurentPoly {
    s.parse().expect("valid polynomial literal")
}

impl CentralElement {
    pub fn for_algebra(alg: Algebra) -> Self {
        match alg {
            Algebra::A2 => Self::gl3(),
            Algebra::C2 => Self::sp4(),
        }
    }

    /// Fully expanded central element of U_q(sp4).
    pub fn sp4() -> Self {
        let c = lp("q - q^-1").pow(2);
        let (e1, e2, f1, f2) = (Element::e(1), Element::e(2), Element::f(1), Element::f(2));
        let k = Element::k;
        let q2sum = lp("q^-2 + q^2");

        let mut x = k(&[-2, 0]) * qp(-4) + k(&[0, -2]) * qp(-2) + k(&[2, 0]) * qp(4) + k(&[0, 2]) * qp(2);
        x = x + f1.clone() * k(&[-1, -1]) * e1.clone() * (&c * &qp(-3));
        x = x + f1.clone() * k(&[1, 1]) * e1.clone() * (&c * &qp(3));
        x = x + f2.clone() * e2.clone() * lp("q^2 - q^-2").pow(2);
        let ff12 = f1.clone() * f2.clone() * qp(1) - f2.clone() * f1.clone() * qp(-1);
        let ee21 = e2.clone() * e1.clone() * qp(1) - e1.clone() * e2.clone() * qp(-1);
        let ff21 = f2.clone() * f1.clone() * qp(1) - f1.clone() * f2.clone() * qp(-1);
        let ee12 = e1.clone() * e2.clone() * qp(1) - e2.clone() * e1.clone() * qp(-1);
        x = x + ff12 * k(&[-1, 1]) * ee21 * (&c * &qp(-1));
        x = x + ff21 * k(&[1, -1]) * ee12 * (&c * &qp(1));
        let fff = f1.clone() * f1.clone() * f2.clone() - f1.clone() * f2.clone() * f1.clone() * q2sum.clone()
            + f2.clone() * f1.clone() * f1.clone();
        let eee = e1.clone() * e1.clone() * e2.clone() - e1.clone() * e2.clone() * e1.clone() * q2sum
            + e2 * e1.clone() * e1;
        x = x + fff * eee * c;
        Self {
            alg: Algebra::C2,
            element: x,
            divisor: LaurentPoly::one(),
        }
    }

    /// Central element of U_q(gl3), shifted so that it vanishes on v3⊗v3.
    pub fn gl3() -> Self {
        let c = lp("q - q^-1").pow(2);
        let (e1, e2, f1, f2) = (Element::e(1), Element::e(2), Element::f(1), Element::f(2));
        let k = Element::k;
        let mut x = Element::scalar(-lp("q^-2 + 1 + q^6"));
        x = x + k(&[2, 0, 0]) * qp(-2) + k(&[0, 2, 0]) + k(&[0, 0, 2]) * qp(2);
        x = x + k(&[1, 1, 0]) * e1.clone() * f1.clone() * (&c * &qp(-1));
        x = x + k(&[0, 1, 1]) * e2.clone() * f2.clone() * (&c * &qp(1));
        let ee = e1.clone() * e2.clone() - e2 * e1.clone() * qp(-1);
        let ff = f2.clone() * f1.clone() - f1 * f2 * qp(-1);
        x = x + k(&[1, 0, 1]) * ee * ff * (&c * &qp(1));
        Self {
            alg: Algebra::A2,
            element: x,
            divisor: &c * &qp(2),
        }
    }

    /// Eigenvalue of the sp4 element on V⊗V restricted to the vacuum.
    pub fn c2_vacuum_eigenvalue() -> LaurentPoly {
        lp("q^-8 + q^-2 + q^2 + q^8")
    }

    /// Scalar by which the sp4 element acts on V.
    pub fn c2_site_eigenvalue() -> LaurentPoly {
        lp("q^-6 + q^-2 + q^2 + q^6")
    }
}

/// Image of the central element on V^{⊗L}.
///
/// For gl3 the bracket is divided by q^2(q-q^-1)^2, which is exact from two
/// sites on but not on one site, where this returns `Error::Inexact`.
pub fn build_central<S: Scalar>(rep: &SiteRep<S>, l: usize) -> Result<Operator<S>> {
    if !(1..=4).contains(&l) {
        return Err(Error::Domain(format!("central element images need L in 1..=4, got {l}")));
    }
    let ce = CentralElement::for_algebra(rep.alg);
    let raw = ce.element.evaluate(rep, l)?;
    let d = rep.ring().lift(&ce.divisor);
    div_exact_entries(&raw, &d)
}

/// Two-site operator A. For C2 this is (q-q^-1)^-2 Δ(C - c) with the
/// remaining scalar prefactor returned separately by [`c2_prefactor`].
pub fn normalized_a<S: Scalar>(rep: &SiteRep<S>) -> Result<Operator<S>> {
    let dc = build_central(rep, 2)?;
    match rep.alg {
        Algebra::A2 => Ok(dc),
        Algebra::C2 => {
            let ring = rep.ring();
            let shift = Operator::identity(16).scale(&ring.lift(&CentralElement::c2_vacuum_eigenvalue()));
            let d = ring.lift(&lp("q - q^-1").pow(2));
            div_exact_entries(&dc.sub(&shift), &d)
        }
    }
}

/// q^-2 (q^2 + q^-2)^-2, the overall factor omitted from the C2 operator A.
pub fn c2_prefactor() -> RatFunc {
    RatFunc::new(qp(-2), lp("q^2 + q^-2").pow(2)).expect("nonzero denominator")
}

/// Σ_i 1^{⊗i-1} ⊗ A ⊗ 1^{⊗L-i-1}.
pub fn hamiltonian<S: Scalar>(a: &Operator<S>, d: usize, l: usize) -> Result<Operator<S>> {
    if l < 2 {
        return Err(Error::Domain("the lattice Hamiltonian needs L >= 2".into()));
    }
    let n = d.pow(l as u32);
    let mut acc = Operator::zeros(n, n);
    for i in 0..l - 1 {
        let left = Operator::<S>::identity(d.pow(i as u32));
        let right = Operator::<S>::identity(d.pow((l - i - 2) as u32));
        acc = acc.add(&left.kron(a).kron(&right));
    }
    Ok(acc)
}

/// Lattice Hamiltonian together with its two-site building block.
#[derive(Clone, Debug)]
pub struct LatticeHamiltonian<S> {
    pub alg: Algebra,
    pub l: usize,
    pub two_site: Operator<S>,
    pub full: Operator<S>,
}

impl<S: Scalar> LatticeHamiltonian<S> {
    pub fn new(rep: &SiteRep<S>, l: usize) -> Result<Self> {
        let two_site = normalized_a(rep)?;
        let full = hamiltonian(&two_site, rep.site_dim(), l)?;
        Ok(Self { alg: rep.alg, l, two_site, full })
    }
}

/// Commutators of C (and of A^(L) when L >= 2) with every generator image.
pub fn verify_centrality<S: Scalar>(rep: &SiteRep<S>, l: usize) -> Result<RelationReport> {
    if !(1..=3).contains(&l) {
        return Err(Error::Domain(format!("centrality checks need L in 1..=3, got {l}")));
    }
    let alg = rep.alg;
    let n = rep.site_dim().pow(l as u32);
    let zero = Operator::<S>::zeros(n, n);
    // the scalar divisor is irrelevant for commutators and is not exact on one site
    let c = CentralElement::for_algebra(alg).element.evaluate(rep, l)?;
    let cn = if S::EXACT { 1.0 } else { c.norm_inf() };
    let ham = if l >= 2 {
        Some(LatticeHamiltonian::new(rep, l)?.full)
    } else {
        None
    };
    let gens = [
        Generator::E(1),
        Generator::E(2),
        Generator::F(1),
        Generator::F(2),
        Generator::k_simple(alg, 1),
        Generator::k_simple(alg, 2),
    ];
    let mut checks = Vec::new();
    for g in &gens {
        let img = rep.lfold(g, l)?;
        let gn = if S::EXACT { 1.0 } else { img.norm_inf() };
        checks.push(compare_scaled(format!("[C, {g}] = 0"), &c.commutator(&img), &zero, false, cn * gn));
        if let Some(h) = &ham {
            let hn = if S::EXACT { 1.0 } else { h.norm_inf() };
            checks.push(compare_scaled(format!("[A^(L), {g}] = 0"), &h.commutator(&img), &zero, false, hn * gn));
        }
    }
    Ok(RelationReport {
        algebra: alg,
        l,
        ring: S::ring_name().to_string(),
        checks,
    })
}

/// One probe vector of the kernel report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelVector {
    pub word: String,
    pub annihilated: bool,
    pub nonzero: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelReport {
    pub algebra: Algebra,
    pub vectors: Vec<KernelVector>,
    pub rank: usize,
    pub independent: bool,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.independent && self.vectors.iter().all(|v| v.annihilated && v.nonzero)
    }
}

/// The ten raising words applied to v3⊗v3, written left to right.
pub fn kernel_words() -> Vec<(&'static str, Vec<usize>)> {
    vec![
        ("1", vec![]),
        ("e1", vec![1]),
        ("e1^2", vec![1, 1]),
        ("e2e1", vec![2, 1]),
        ("e2e1^2", vec![2, 1, 1]),
        ("e1e2e1", vec![1, 2, 1]),
        ("e1^2e2e1", vec![1, 1, 2, 1]),
        ("(e2e1)^2", vec![2, 1, 2, 1]),
        ("e1(e2e1)^2", vec![1, 2, 1, 2, 1]),
        ("e1^2(e2e1)^2", vec![1, 1, 2, 1, 2, 1]),
    ]
}

/// Vectors Δ(word)(v3⊗v3) for the kernel words.
pub fn kernel_vectors(rep: &SiteRep<LaurentPoly>) -> Result<Vec<(String, Vec<LaurentPoly>)>> {
    let e = [rep.coproduct(&Generator::E(1)), rep.coproduct(&Generator::E(2))];
    let mut out = Vec::new();
    for (name, word) in kernel_words() {
        let mut v = vec![LaurentPoly::zero(); 16];
        v[0] = LaurentPoly::one();
        for &g in word.iter().rev() {
            v = e[g - 1].apply(&v);
        }
        out.push((name.to_string(), v));
    }
    Ok(out)
}

/// Checks that A annihilates each kernel vector and that they are independent.
pub fn kernel_probe(rep: &SiteRep<LaurentPoly>) -> Result<KernelReport> {
    if rep.alg != Algebra::C2 {
        return Err(Error::Domain("the kernel probe is defined for C2".into()));
    }
    let a = normalized_a(rep)?;
    let vecs = kernel_vectors(rep)?;
    let vectors = vecs
        .iter()
        .map(|(w, v)| KernelVector {
            word: w.clone(),
            annihilated: a.apply(v).iter().all(LaurentPoly::is_zero),
            nonzero: v.iter().any(|x| !x.is_zero()),
        })
        .collect();
    let only: Vec<Vec<LaurentPoly>> = vecs.into_iter().map(|(_, v)| v).collect();
    let rank = rank_at(&only, &Rational::new(2.into(), 3.into()));
    Ok(KernelReport {
        algebra: rep.alg,
        vectors,
        rank,
        independent: rank == only.len(),
    })
}
