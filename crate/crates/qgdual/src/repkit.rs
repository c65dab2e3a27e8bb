//! Fundamental representations, coproducts and relation checks.
//!
//! Site states and weight vectors:
//!
//! | algebra | state | vector | weight |
//! |---------|-------|--------|--------|
//! | A2 | 0 | v3 | (0,0,1) |
//! | A2 | 1 | v1 | (1,0,0) |
//! | A2 | 2 | v2 | (0,1,0) |
//! | C2 | 0 | v3 | (-1,0) |
//! | C2 | 1 | v2 | (0,1) |
//! | C2 | 2 | v4 | (0,-1) |
//! | C2 | T | v1 | (1,0) |
//!
//! With this dictionary the conjugated Hamiltonians reproduce the jump rates
//! of the two-species processes exactly (type 1 may displace type 2).

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::qpoly::{q_binomial, LaurentPoly};
use crate::scalar::{Deformation, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algebra {
    A2,
    C2,
}

impl Algebra {
    pub fn site_dim(self) -> usize {
        match self {
            Algebra::A2 => 3,
            Algebra::C2 => 4,
        }
    }

    /// Length of weight vectors (gl3 uses three coordinates).
    pub fn weight_rank(self) -> usize {
        match self {
            Algebra::A2 => 3,
            Algebra::C2 => 2,
        }
    }

    /// (α_i, α_j) for 1-based i, j.
    pub fn inner(self, i: usize, j: usize) -> i64 {
        let m = match self {
            Algebra::A2 => [[2, -1], [-1, 2]],
            Algebra::C2 => [[2, -2], [-2, 4]],
        };
        m[i - 1][j - 1]
    }

    /// q_i = q^{d_i} with d_i = (α_i, α_i)/2.
    pub fn d(self, i: usize) -> i64 {
        self.inner(i, i) / 2
    }

    pub fn cartan(self, i: usize, j: usize) -> i64 {
        2 * self.inner(i, j) / self.inner(i, i)
    }

    /// Weight of k_i, i.e. k_i = k_{(a,b[,c])}.
    pub fn simple_k(self, i: usize) -> Vec<i64> {
        match (self, i) {
            (Algebra::A2, 1) => vec![1, -1, 0],
            (Algebra::A2, 2) => vec![0, 1, -1],
            (Algebra::C2, 1) => vec![1, -1],
            (Algebra::C2, 2) => vec![0, 2],
            _ => panic!("simple root index {i} out of range"),
        }
    }

    pub fn weights(self) -> Vec<Vec<i64>> {
        match self {
            Algebra::A2 => vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]],
            Algebra::C2 => vec![vec![-1, 0], vec![0, 1], vec![0, -1], vec![1, 0]],
        }
    }

    /// Site state carrying the basis vector v_n.
    pub fn state_of_vector(self, n: u8) -> u8 {
        match (self, n) {
            (Algebra::A2, 1) => 1,
            (Algebra::A2, 2) => 2,
            (Algebra::A2, 3) => 0,
            (Algebra::C2, 1) => 3,
            (Algebra::C2, 2) => 1,
            (Algebra::C2, 3) => 0,
            (Algebra::C2, 4) => 2,
            _ => panic!("no vector v{n} for {self}"),
        }
    }

    /// Index in V⊗V of v_a ⊗ v_b.
    pub fn two_site_index(self, a: u8, b: u8) -> usize {
        self.state_of_vector(a) as usize * self.site_dim() + self.state_of_vector(b) as usize
    }

    /// Tensor basis order used when the C2 two-site matrices are displayed
    /// (weight-space order), as pairs (a, b) meaning v_a ⊗ v_b.
    pub fn c2_display_order() -> [(u8, u8); 16] {
        [
            (1, 1),
            (2, 1),
            (1, 2),
            (2, 2),
            (4, 1),
            (1, 4),
            (2, 4),
            (4, 2),
            (3, 1),
            (1, 3),
            (3, 2),
            (2, 3),
            (4, 4),
            (3, 4),
            (4, 3),
            (3, 3),
        ]
    }

    /// Display order for the gl3 two-site matrices.
    pub fn a2_display_order() -> [(u8, u8); 9] {
        [(1, 1), (2, 2), (3, 3), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3)]
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl FromStr for Algebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A2" | "a2" => Ok(Algebra::A2),
            "C2" | "c2" => Ok(Algebra::C2),
            other => Err(Error::Parse(format!("unknown algebra {other:?}"))),
        }
    }
}

/// Chevalley generators and Cartan elements k_{(a,b[,c])}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    E(usize),
    F(usize),
    K(Vec<i64>),
}

impl Generator {
    pub fn k_simple(alg: Algebra, i: usize) -> Self {
        Generator::K(alg.simple_k(i))
    }

    pub fn k_inv_simple(alg: Algebra, i: usize) -> Self {
        Generator::K(alg.simple_k(i).iter().map(|x| -x).collect())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::E(i) => write!(f, "e{i}"),
            Generator::F(i) => write!(f, "f{i}"),
            Generator::K(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "k({})", parts.join(","))
            }
        }
    }
}

/// Cached powers q^n in a scalar ring.
#[derive(Clone, Debug)]
pub struct QRing<S> {
    offset: i64,
    powers: Vec<S>,
    numeric: Option<f64>,
}

impl<S: Scalar> QRing<S> {
    const SPAN: i64 = 160;

    pub fn new<D: Deformation<S>>(qv: &D) -> Self {
        let powers = (-Self::SPAN..=Self::SPAN).map(|n| qv.q_pow(n)).collect();
        Self {
            offset: Self::SPAN,
            powers,
            numeric: qv.numeric_q(),
        }
    }

    pub fn q_pow(&self, n: i64) -> S {
        assert!(n.abs() <= Self::SPAN, "q-power {n} outside cached range");
        self.powers[(n + self.offset) as usize].clone()
    }

    pub fn lift(&self, p: &LaurentPoly) -> S {
        let mut acc = S::zero();
        for (e, c) in p.terms() {
            acc.add_ref(&S::from_rational(c).mul_ref(&self.q_pow(e)));
        }
        acc
    }

    pub fn numeric_q(&self) -> Option<f64> {
        self.numeric
    }
}

/// Single-site matrices of one fundamental representation.
#[derive(Clone, Debug)]
pub struct SiteRep<S> {
    pub alg: Algebra,
    e: [Operator<S>; 2],
    f: [Operator<S>; 2],
    weights: Vec<Vec<i64>>,
    ring: QRing<S>,
}

pub fn fundamental_rep<S: Scalar, D: Deformation<S>>(alg: Algebra, qv: &D) -> SiteRep<S> {
    let d = alg.site_dim();
    let unit = |pairs: &[(usize, usize)]| {
        Operator::from_triplets(d, d, pairs.iter().map(|&(r, c)| (r, c, S::one())))
    };
    let (e1, e2) = match alg {
        Algebra::A2 => (unit(&[(1, 2)]), unit(&[(2, 0)])),
        Algebra::C2 => (unit(&[(3, 1), (2, 0)]), unit(&[(1, 2)])),
    };
    let f1 = e1.transpose();
    let f2 = e2.transpose();
    SiteRep {
        alg,
        e: [e1, e2],
        f: [f1, f2],
        weights: alg.weights(),
        ring: QRing::new(qv),
    }
}

impl<S: Scalar> SiteRep<S> {
    pub fn ring(&self) -> &QRing<S> {
        &self.ring
    }

    pub fn site_dim(&self) -> usize {
        self.alg.site_dim()
    }

    fn pairing(&self, a: &[i64], state: usize) -> i64 {
        assert_eq!(a.len(), self.alg.weight_rank(), "k weight has wrong length");
        a.iter().zip(&self.weights[state]).map(|(x, y)| x * y).sum()
    }

    /// Exponent n with k_a v = q^n v on a tensor basis element.
    pub fn k_exponent(&self, a: &[i64], states: &[u8]) -> i64 {
        states.iter().map(|&s| self.pairing(a, s as usize)).sum()
    }

    pub fn k(&self, a: &[i64]) -> Operator<S> {
        Operator::diagonal(
            (0..self.site_dim())
                .map(|s| self.ring.q_pow(self.pairing(a, s)))
                .collect(),
        )
    }

    /// Single-site matrix of a generator.
    pub fn generator(&self, g: &Generator) -> Operator<S> {
        match g {
            Generator::E(i) => self.e[*i - 1].clone(),
            Generator::F(i) => self.f[*i - 1].clone(),
            Generator::K(a) => self.k(a),
        }
    }

    /// Two-site coproduct: Δe = e⊗1 + k⊗e, Δf = 1⊗f + f⊗k⁻¹, Δk = k⊗k.
    pub fn coproduct(&self, g: &Generator) -> Operator<S> {
        let one = Operator::identity(self.site_dim());
        match g {
            Generator::E(i) => {
                let e = &self.e[*i - 1];
                let k = self.k(&self.alg.simple_k(*i));
                e.kron(&one).add(&k.kron(e))
            }
            Generator::F(i) => {
                let f = &self.f[*i - 1];
                let kinv = self.k(&neg(&self.alg.simple_k(*i)));
                one.kron(f).add(&f.kron(&kinv))
            }
            Generator::K(a) => {
                let k = self.k(a);
                k.kron(&k)
            }
        }
    }

    /// L-fold coproduct image on V^{⊗L}.
    pub fn lfold(&self, g: &Generator, l: usize) -> Result<Operator<S>> {
        if l < 1 {
            return Err(Error::Domain("lattice length must be at least 1".into()));
        }
        let d = self.site_dim();
        let n = d.pow(l as u32);
        let mut entries = Vec::new();
        match g {
            Generator::K(a) => {
                let diag = (0..n)
                    .map(|x| {
                        let st = digits(x, d, l);
                        self.ring.q_pow(self.k_exponent(a, &st))
                    })
                    .collect();
                return Ok(Operator::diagonal(diag));
            }
            Generator::E(i) | Generator::F(i) => {
                let raising = matches!(g, Generator::E(_));
                let local = if raising { &self.e[*i - 1] } else { &self.f[*i - 1] };
                let a = self.alg.simple_k(*i);
                for x in 0..n {
                    let st = digits(x, d, l);
                    for j in 0..l {
                        // local column st[j] -> rows of the local matrix
                        for (r, c, v) in local.entries() {
                            if c != st[j] as usize {
                                continue;
                            }
                            let tail = if raising { &st[..j] } else { &st[j + 1..] };
                            let mut exp = self.k_exponent(&a, tail);
                            if !raising {
                                exp = -exp;
                            }
                            let mut y = st.clone();
                            y[j] = r as u8;
                            let row = undigits(&y, d);
                            entries.push((row, x, v.mul_ref(&self.ring.q_pow(exp))));
                        }
                    }
                }
            }
        }
        Ok(Operator::from_triplets(n, n, entries))
    }
}

fn neg(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}

pub(crate) fn digits(mut x: usize, d: usize, l: usize) -> Vec<u8> {
    let mut out = vec![0u8; l];
    for k in (0..l).rev() {
        out[k] = (x % d) as u8;
        x /= d;
    }
    out
}

pub(crate) fn undigits(st: &[u8], d: usize) -> usize {
    st.iter().fold(0, |acc, &s| acc * d + s as usize)
}

/// Location and values of the first failing entry of a matrix identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
    /// Informational checks do not count towards the verdict.
    pub informational: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub algebra: Algebra,
    #[serde(rename = "L")]
    pub l: usize,
    pub ring: String,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed && !c.informational)
    }
}

/// Tolerance for identity checks: zero for exact rings.
pub fn default_tol<S: Scalar>() -> f64 {
    if S::EXACT {
        0.0
    } else {
        1e-9
    }
}

pub(crate) fn compare<S: Scalar>(
    name: impl Into<String>,
    lhs: &Operator<S>,
    rhs: &Operator<S>,
    informational: bool,
) -> RelationCheck {
    compare_scaled(name, lhs, rhs, informational, 1.0)
}

/// As `compare`, with the float tolerance multiplied by the size of the
/// terms being cancelled.
pub(crate) fn compare_scaled<S: Scalar>(
    name: impl Into<String>,
    lhs: &Operator<S>,
    rhs: &Operator<S>,
    informational: bool,
    scale: f64,
) -> RelationCheck {
    let diff = lhs.first_difference(rhs, if S::EXACT { 0.0 } else { default_tol::<S>() * scale.max(1.0) });
    RelationCheck {
        name: name.into(),
        passed: diff.is_none(),
        informational,
        witness: diff.map(|d| Witness {
            row: d.row,
            col: d.col,
            lhs: d.lhs.to_text(),
            rhs: d.rhs.to_text(),
        }),
    }
}

/// Checks every defining relation on the L-fold coproduct images.
pub fn verify_relations<S: Scalar>(rep: &SiteRep<S>, l: usize) -> Result<RelationReport> {
    if !(1..=3).contains(&l) {
        return Err(Error::Domain(format!("relation checks need L in 1..=3, got {l}")));
    }
    let alg = rep.alg;
    let ring = rep.ring();
    let n = alg.site_dim().pow(l as u32);
    let id = Operator::<S>::identity(n);
    let e: Vec<Operator<S>> = (1..=2).map(|i| rep.lfold(&Generator::E(i), l)).collect::<Result<_>>()?;
    let f: Vec<Operator<S>> = (1..=2).map(|i| rep.lfold(&Generator::F(i), l)).collect::<Result<_>>()?;
    let k: Vec<Operator<S>> = (1..=2)
        .map(|i| rep.lfold(&Generator::k_simple(alg, i), l))
        .collect::<Result<_>>()?;
    let kinv: Vec<Operator<S>> = (1..=2)
        .map(|i| rep.lfold(&Generator::k_inv_simple(alg, i), l))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();

    for i in 0..2 {
        checks.push(compare(format!("k{0} k{0}^-1 = 1", i + 1), &k[i].mul(&kinv[i]), &id, false));
    }
    checks.push(compare("k1 k2 = k2 k1", &k[0].mul(&k[1]), &k[1].mul(&k[0]), false));

    for i in 0..2 {
        for j in 0..2 {
            let c = ring.q_pow(alg.inner(i + 1, j + 1));
            let cinv = ring.q_pow(-alg.inner(i + 1, j + 1));
            checks.push(compare(
                format!("k{} e{} k{}^-1 = q^({}) e{}", i + 1, j + 1, i + 1, alg.inner(i + 1, j + 1), j + 1),
                &k[i].mul(&e[j]).mul(&kinv[i]),
                &e[j].scale(&c),
                false,
            ));
            checks.push(compare(
                format!("k{} f{} k{}^-1 = q^({}) f{}", i + 1, j + 1, i + 1, -alg.inner(i + 1, j + 1), j + 1),
                &k[i].mul(&f[j]).mul(&kinv[i]),
                &f[j].scale(&cinv),
                false,
            ));
        }
    }

    // Weight-lattice Cartan elements k_{ε_m}.
    for m in 0..alg.weight_rank() {
        let mut unit = vec![0i64; alg.weight_rank()];
        unit[m] = 1;
        let km = rep.lfold(&Generator::K(unit.clone()), l)?;
        let kminv = rep.lfold(&Generator::K(neg(&unit)), l)?;
        for j in 0..2 {
            // e_j shifts weights by the difference of the images of k_j's root.
            let shift = root_shift(alg, j + 1);
            let c = ring.q_pow(shift[m]);
            checks.push(compare(
                format!("k_eps{} e{} k_eps{}^-1 = q^({}) e{}", m + 1, j + 1, m + 1, shift[m], j + 1),
                &km.mul(&e[j]).mul(&kminv),
                &e[j].scale(&c),
                false,
            ));
        }
    }

    for i in 0..2 {
        for j in 0..2 {
            let br = e[i].commutator(&f[j]);
            if i == j {
                let di = alg.d(i + 1);
                let qi = ring.q_pow(di) - ring.q_pow(-di);
                checks.push(compare(
                    format!("(q{0} - q{0}^-1)[e{0},f{0}] = k{0} - k{0}^-1", i + 1),
                    &br.scale(&qi),
                    &k[i].sub(&kinv[i]),
                    false,
                ));
            } else {
                checks.push(compare(
                    format!("[e{},f{}] = 0", i + 1, j + 1),
                    &br,
                    &Operator::zeros(n, n),
                    false,
                ));
            }
        }
    }

    for (label, gens) in [("e", &e), ("f", &f)] {
        for i in 0..2 {
            for j in 0..2 {
                if i == j {
                    continue;
                }
                let lhs = serre(alg, ring, &gens[i], &gens[j], i + 1, j + 1)?;
                checks.push(compare(
                    format!("Serre({label}{}, {label}{})", i + 1, j + 1),
                    &lhs,
                    &Operator::zeros(n, n),
                    false,
                ));
            }
        }
    }

    checks.push(compare("[e1,e2] = 0 (not a defining relation)", &e[0].commutator(&e[1]), &Operator::zeros(n, n), true));
    checks.push(compare("[f1,f2] = 0 (not a defining relation)", &f[0].commutator(&f[1]), &Operator::zeros(n, n), true));

    Ok(RelationReport {
        algebra: alg,
        l,
        ring: S::ring_name().to_string(),
        checks,
    })
}

/// Weight shift of e_i on the weight lattice. The simple k_i were chosen
/// with the same coordinates, so this coincides with [`Algebra::simple_k`].
pub fn root_shift(alg: Algebra, i: usize) -> Vec<i64> {
    alg.simple_k(i)
}

/// Σ_r (-1)^r [n r]_{q_i} x_i^{n-r} x_j x_i^r with n = 1 - a_ij.
pub fn serre<S: Scalar>(
    alg: Algebra,
    ring: &QRing<S>,
    xi: &Operator<S>,
    xj: &Operator<S>,
    i: usize,
    j: usize,
) -> Result<Operator<S>> {
    let n = (1 - alg.cartan(i, j)) as u32;
    let dim = xi.dim();
    let mut acc = Operator::zeros(dim, dim);
    for r in 0..=n {
        let c = q_binomial(n, r)?.dilate(alg.d(i));
        let mut c = ring.lift(&c);
        if r % 2 == 1 {
            c = -c;
        }
        let term = xi.pow(n - r).mul(xj).mul(&xi.pow(r)).scale(&c);
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// CSV dump with a one-line header.
pub fn write_operator_csv<S: Scalar, W: Write>(
    w: &mut W,
    op: &Operator<S>,
    basis: Algebra,
    l: usize,
) -> Result<()> {
    writeln!(
        w,
        "# dim={} ring={} basis={} L={}",
        op.nrows(),
        S::ring_name(),
        basis,
        l
    )?;
    writeln!(w, "row_index,col_index,value")?;
    for (i, j, v) in op.entries() {
        writeln!(w, "{},{},{}", i, j, v.to_text())?;
    }
    Ok(())
}
