use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{LaurentPoly, Rational};
use crate::error::{Error, Result};

/// A quotient of Laurent polynomials kept in lowest terms.
///
/// The denominator is normalized to a monic ordinary polynomial with nonzero
/// constant term, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }

    /// The Laurent polynomial this equals, if any.
    pub fn as_poly(&self) -> Option<LaurentPoly> {
        self.num.div_exact(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn eval(&self, q: f64) -> Result<f64> {
        let d = self.den.eval(q)?;
        if d == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(q)? / d)
    }

    pub fn eval_rational(&self, q: &Rational) -> Option<Rational> {
        let d = self.den.eval_rational(q);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_rational(q) / d)
        }
    }

    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self {
                num,
                den: LaurentPoly::one(),
            };
        }
        let g = poly_gcd(&num, &den);
        let mut n = num.div_exact(&g).expect("gcd divides numerator");
        let mut d = den.div_exact(&g).expect("gcd divides denominator");
        // Move powers of q into the numerator and make the denominator monic.
        let s = d.normalized_shift();
        n = n.shift(-s);
        d = d.shift(-s);
        let lead = d.leading().recip();
        Self {
            num: n.scale(&lead),
            den: d.scale(&lead),
        }
    }
}

/// Monic gcd of the ordinary-polynomial parts (powers of q are units).
fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let mut x = a.shift(-a.normalized_shift());
    let mut y = b.shift(-b.normalized_shift());
    while !y.is_zero() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    let lead = x.leading();
    if lead.is_zero() {
        return LaurentPoly::one();
    }
    x.scale(&lead.recip())
}

fn poly_rem(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let bmax = b.max_exp().unwrap();
    let blead = b.leading();
    let mut r = a.clone();
    while let Some(rmax) = r.max_exp() {
        if rmax < bmax {
            break;
        }
        let t = LaurentPoly::monomial(rmax - bmax, r.coeff(rmax) / &blead);
        r = &r - &(&t * b);
    }
    r
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self)
    }
}

impl std::str::FromStr for RatFunc {
    type Err = Error;
    /// Accepts `p` or `(p)/(p)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('(') {
            if let Some(idx) = rest.find(")/(") {
                let n: LaurentPoly = rest[..idx].parse()?;
                let d_txt = rest[idx + 3..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unbalanced quotient {s:?}")))?;
                let d: LaurentPoly = d_txt.parse()?;
                return RatFunc::new(n, d);
            }
        }
        Ok(RatFunc::from_poly(t.parse()?))
    }
}

impl From<LaurentPoly> for RatFunc {
    fn from(p: LaurentPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::reduce(&self.num + &rhs.num, self.den.clone());
        }
        RatFunc::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    /// Panics on division by zero; use [`RatFunc::recip`] for a checked form.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.recip().expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(LaurentPoly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::from_poly(LaurentPoly::one())
    }
}
