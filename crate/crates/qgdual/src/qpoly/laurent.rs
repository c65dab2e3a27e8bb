use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;
use crate::error::{Error, Result};

/// An element of Q[q, q^-1], stored as exponent -> nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The indeterminate q.
    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(exp, Rational::one())
    }

    pub fn monomial(exp: i64, coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    /// Builds from (exponent, integer coefficient) pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, Rational::from_integer(BigInt::from(c)));
        }
        p
    }

    fn add_term(&mut self, exp: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Returns `(exp, coeff)` when the polynomial has a single term.
    pub fn as_monomial(&self) -> Option<(i64, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by q^k.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// Substitutes q -> q^k.
    pub fn dilate(&self, k: i64) -> Self {
        if k == 0 {
            let mut s = Rational::zero();
            for c in self.terms.values() {
                s += c;
            }
            return Self::constant(s);
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (e * k, v.clone())).collect(),
        }
    }

    /// Substitutes q -> q^-1.
    pub fn bar(&self) -> Self {
        self.dilate(-1)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a positive real q.
    pub fn eval(&self, q: f64) -> Result<f64> {
        if q <= 0.0 || !q.is_finite() {
            return Err(Error::InvalidQ(q));
        }
        Ok(self.eval_unchecked(q))
    }

    pub(crate) fn eval_unchecked(&self, q: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * q.powi(*e as i32))
            .sum()
    }

    /// Exact evaluation at a nonzero rational q.
    pub fn eval_rational(&self, q: &Rational) -> Rational {
        let mut s = Rational::zero();
        for (e, c) in &self.terms {
            let p = if *e >= 0 {
                num::pow(q.clone(), *e as usize)
            } else {
                num::pow(q.recip(), (-*e) as usize)
            };
            s += c * p;
        }
        s
    }

    /// Quotient when `self` is an exact multiple of `d` in Q[q, q^-1].
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some((e, c)) = d.as_monomial() {
            let inv = c.recip();
            return Some(self.shift(-e).scale(&inv));
        }
        // Long division from the top degree on ordinary polynomials.
        let dmin = d.min_exp().unwrap();
        let dmax = d.max_exp().unwrap();
        let lead = d.coeff(dmax);
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        let floor = self.min_exp().unwrap() - dmin;
        while !rem.is_zero() {
            let rmax = rem.max_exp().unwrap();
            let qe = rmax - dmax;
            if qe < floor {
                return None;
            }
            let qc = rem.coeff(rmax) / &lead;
            let t = LaurentPoly::monomial(qe, qc);
            rem = &rem - &(&t * d);
            quot = quot + t;
        }
        Some(quot)
    }

    /// Ordinary-polynomial view: (q^-shift) * self has exponents starting at 0.
    pub(crate) fn normalized_shift(&self) -> i64 {
        self.min_exp().unwrap_or(0)
    }

    /// Leading coefficient (highest exponent).
    pub fn leading(&self) -> Rational {
        self.max_exp()
            .map(|e| self.coeff(e))
            .unwrap_or_else(Rational::zero)
    }

    /// The canonical text form: ascending exponents, `c*q^e` per term.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Nonnegative for every q in (0, 1), judged by sampling.
    pub fn nonnegative_on(&self, samples: &[f64]) -> bool {
        samples.iter().all(|&q| self.eval_unchecked(q) >= -1e-12)
    }

    pub fn abs_coeff_sum(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).fold(Rational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *e == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{}*q^{}", c, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self)
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;

    /// Accepts the canonical form and the usual shorthand (`q`, `q^-2`, `- 3/2*q^4`).
    fn from_str(s: &str) -> Result<Self> {
        let src = s.trim();
        if src.is_empty() {
            return Err(Error::Parse(format!("empty polynomial text: {s:?}")));
        }
        let mut out = LaurentPoly::zero();
        let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut i = 0;
        let mut expect_term = true;
        while i < chars.len() {
            let mut sign = Rational::one();
            // separators and unary signs
            while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                if chars[i] == '-' {
                    sign = -sign;
                }
                i += 1;
                expect_term = true;
            }
            if !expect_term || i >= chars.len() {
                return Err(Error::Parse(format!("malformed polynomial text: {s:?}")));
            }
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                i += 1;
            }
            let coeff_txt: String = chars[start..i].iter().collect();
            let mut coeff = if coeff_txt.is_empty() {
                Rational::one()
            } else {
                Rational::from_str(&coeff_txt)
                    .map_err(|_| Error::Parse(format!("bad coefficient {coeff_txt:?} in {s:?}")))?
            };
            coeff *= sign;
            if i < chars.len() && chars[i] == '*' {
                i += 1;
            }
            let mut exp = 0i64;
            if i < chars.len() && chars[i] == 'q' {
                i += 1;
                exp = 1;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let es = i;
                    if i < chars.len() && chars[i] == '-' {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let et: String = chars[es..i].iter().collect();
                    exp = et
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent {et:?} in {s:?}")))?;
                }
            } else if coeff_txt.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {s:?}")));
            }
            out.add_term(exp, coeff);
            expect_term = false;
            if i < chars.len() && chars[i] != '+' && chars[i] != '-' {
                return Err(Error::Parse(format!("unexpected {:?} in {s:?}", chars[i])));
            }
        }
        Ok(out)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        // Numeric exponent order rather than string order.
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let m: BTreeMap<String, String> = BTreeMap::deserialize(de)?;
        let mut p = LaurentPoly::zero();
        for (e, c) in m {
            let exp: i64 = e.parse().map_err(serde::de::Error::custom)?;
            let coeff = Rational::from_str(&c).map_err(serde::de::Error::custom)?;
            p.add_term(exp, coeff);
        }
        Ok(p)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        Self {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Zero for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        LaurentPoly::one()
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::from_int(c)
    }
}

impl From<Rational> for LaurentPoly {
    fn from(c: Rational) -> Self {
        LaurentPoly::constant(c)
    }
}
