use super::LaurentPoly;
use crate::error::{Error, Result};

/// Balanced q-integer (q^n - q^-n)/(q - q^-1), obtained by exact division.
pub fn q_int_symmetric(n: u32) -> LaurentPoly {
    let n = n as i64;
    let numer = &LaurentPoly::q_pow(n) - &LaurentPoly::q_pow(-n);
    let denom = &LaurentPoly::q() - &LaurentPoly::q_pow(-1);
    numer
        .div_exact(&denom)
        .expect("q - q^-1 divides q^n - q^-n")
}

/// Balanced q-factorial (1)_q (2)_q ... (n)_q.
pub fn q_factorial_symmetric(n: u32) -> LaurentPoly {
    (1..=n).fold(LaurentPoly::one(), |acc, k| &acc * &q_int_symmetric(k))
}

/// Balanced q-binomial coefficient.
pub fn q_binomial(n: u32, m: u32) -> Result<LaurentPoly> {
    if m > n {
        return Err(Error::Domain(format!("q_binomial needs m <= n, got n={n}, m={m}")));
    }
    let numer = q_factorial_symmetric(n);
    let denom = &q_factorial_symmetric(m) * &q_factorial_symmetric(n - m);
    Ok(numer
        .div_exact(&denom)
        .expect("q-binomial coefficients are Laurent polynomials"))
}

/// {k}_r = 1 + r + ... + r^(k-1).
pub fn q_brace(k: u32, r: &LaurentPoly) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    let mut p = LaurentPoly::one();
    for _ in 0..k {
        acc += &p;
        p = &p * r;
    }
    acc
}

/// {1}_r {2}_r ... {n}_r, with {0}_r! = 1.
pub fn q_brace_factorial(n: u32, r: &LaurentPoly) -> LaurentPoly {
    (1..=n).fold(LaurentPoly::one(), |acc, k| &acc * &q_brace(k, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn small_q_integers() {
        assert!(q_int_symmetric(0).is_zero());
        assert_eq!(q_int_symmetric(1), LaurentPoly::one());
        assert_eq!(q_int_symmetric(3), lp("q^2 + 1 + q^-2"));
    }

    #[test]
    fn binomials() {
        assert_eq!(q_binomial(2, 1).unwrap(), lp("q + q^-1"));
        assert_eq!(q_binomial(3, 0).unwrap(), LaurentPoly::one());
        assert_eq!(q_binomial(4, 2).unwrap(), lp("q^4 + q^2 + 2 + q^-2 + q^-4"));
        assert!(q_binomial(2, 3).is_err());
    }

    #[test]
    fn brace_factorials() {
        assert_eq!(q_brace_factorial(0, &lp("q^2")), LaurentPoly::one());
        assert_eq!(q_brace_factorial(2, &lp("q^2")), lp("1 + q^2"));
        assert_eq!(
            q_brace_factorial(3, &lp("q^4")),
            &lp("1 + q^4") * &lp("1 + q^4 + q^8")
        );
    }
}
