//! Exact arithmetic in Q[q, q^-1] and the q-combinatorics built on it.

mod laurent;
mod qcomb;
mod ratfunc;

pub use laurent::LaurentPoly;
pub use qcomb::{q_binomial, q_brace, q_brace_factorial, q_factorial_symmetric, q_int_symmetric};
pub use ratfunc::RatFunc;

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = num::BigRational;

/// Ring operation selector for [`lp_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

pub fn lp_arith(a: &LaurentPoly, b: &LaurentPoly, op: RingOp) -> LaurentPoly {
    match op {
        RingOp::Add => a + b,
        RingOp::Sub => a - b,
        RingOp::Mul => a * b,
    }
}

pub fn lp_eval(p: &LaurentPoly, q: f64) -> crate::Result<f64> {
    p.eval(q)
}

/// Parses `a/b` or an integer into a [`Rational`].
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| crate::Error::Parse(format!("not a rational number: {s:?}")))
}
