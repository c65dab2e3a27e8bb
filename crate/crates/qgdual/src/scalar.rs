use std::fmt::Debug;
use std::ops::{Neg, Sub};

use num::{One, ToPrimitive, Zero};

use crate::qpoly::{LaurentPoly, RatFunc, Rational};

/// Coefficient ring for operators: exact (Laurent polynomials, rational
/// functions) or floating point at a fixed q.
pub trait Scalar:
    Clone + Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;
    fn from_rational(r: &Rational) -> Self;
    /// Quotient, when it exists in the ring.
    fn div_exact(&self, d: &Self) -> Option<Self>;
    /// Size used by tolerance checks: exact types report 0 or infinity.
    fn residual(&self) -> f64;
    fn to_text(&self) -> String;
    /// Numeric value at q; float types ignore the argument.
    fn eval_at(&self, q: f64) -> f64;

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn add_ref(&mut self, other: &Self) {
        *self = self.clone() + other.clone();
    }
    fn ring_name() -> &'static str {
        if Self::EXACT {
            "exact"
        } else {
            "float"
        }
    }
}

impl Scalar for LaurentPoly {
    const EXACT: bool = true;
    fn from_rational(r: &Rational) -> Self {
        LaurentPoly::constant(r.clone())
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        LaurentPoly::div_exact(self, d)
    }
    fn residual(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn eval_at(&self, q: f64) -> f64 {
        self.eval_unchecked(q)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Scalar for RatFunc {
    const EXACT: bool = true;
    fn from_rational(r: &Rational) -> Self {
        RatFunc::from_poly(LaurentPoly::constant(r.clone()))
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        d.recip().ok().map(|inv| self * &inv)
    }
    fn residual(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn eval_at(&self, q: f64) -> f64 {
        self.eval(q).unwrap_or(f64::NAN)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_ref(&mut self, other: &Self) {
        *self = &*self + other;
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            fn from_rational(r: &Rational) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn div_exact(&self, d: &Self) -> Option<Self> {
                if *d == 0.0 {
                    None
                } else {
                    Some(self / d)
                }
            }
            fn residual(&self) -> f64 {
                (*self as f64).abs()
            }
            fn to_text(&self) -> String {
                format!("{:e}", self)
            }
            fn eval_at(&self, _q: f64) -> f64 {
                *self as f64
            }
            fn mul_ref(&self, other: &Self) -> Self {
                self * other
            }
            fn add_ref(&mut self, other: &Self) {
                *self += other;
            }
        }
    };
}
float_scalar!(f64);
float_scalar!(f32);

/// Supplies powers of q in a scalar ring: symbolically, or at a numeric q.
pub trait Deformation<S: Scalar>: Sync {
    fn q_pow(&self, n: i64) -> S;

    /// Image of a Laurent polynomial in `S`.
    fn lift(&self, p: &LaurentPoly) -> S {
        let mut acc = S::zero();
        for (e, c) in p.terms() {
            acc.add_ref(&S::from_rational(c).mul_ref(&self.q_pow(e)));
        }
        acc
    }

    /// Numeric q if this deformation is evaluated, `None` when symbolic.
    fn numeric_q(&self) -> Option<f64>;
}

/// Keeps q as an indeterminate.
#[derive(Clone, Copy, Debug, Default)]
pub struct Symbolic;

impl Deformation<LaurentPoly> for Symbolic {
    fn q_pow(&self, n: i64) -> LaurentPoly {
        LaurentPoly::q_pow(n)
    }
    fn lift(&self, p: &LaurentPoly) -> LaurentPoly {
        p.clone()
    }
    fn numeric_q(&self) -> Option<f64> {
        None
    }
}

impl Deformation<RatFunc> for Symbolic {
    fn q_pow(&self, n: i64) -> RatFunc {
        RatFunc::from_poly(LaurentPoly::q_pow(n))
    }
    fn lift(&self, p: &LaurentPoly) -> RatFunc {
        RatFunc::from_poly(p.clone())
    }
    fn numeric_q(&self) -> Option<f64> {
        None
    }
}

/// Evaluates q at a fixed positive number.
#[derive(Clone, Copy, Debug)]
pub struct AtQ<T>(pub T);

impl Deformation<f64> for AtQ<f64> {
    fn q_pow(&self, n: i64) -> f64 {
        self.0.powi(n as i32)
    }
    fn numeric_q(&self) -> Option<f64> {
        Some(self.0)
    }
}

impl Deformation<f32> for AtQ<f32> {
    fn q_pow(&self, n: i64) -> f32 {
        self.0.powi(n as i32)
    }
    fn numeric_q(&self) -> Option<f64> {
        Some(self.0 as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_agrees_with_evaluation() {
        let p: LaurentPoly = "2*q^-3 + 1/2 + q^5".parse().unwrap();
        let v: f64 = AtQ(0.7).lift(&p);
        assert!((v - p.eval(0.7).unwrap()).abs() < 1e-12);
        let s: LaurentPoly = Symbolic.lift(&p);
        assert_eq!(s, p);
    }
}
