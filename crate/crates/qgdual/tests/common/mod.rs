//! Reference tables transcribed by hand, shared by the integration tests.
#![allow(dead_code)]

use qgdual::{Algebra, LaurentPoly, RatFunc};

pub fn lp(s: &str) -> LaurentPoly {
    s.parse().unwrap()
}

pub fn qp(n: i64) -> LaurentPoly {
    LaurentPoly::q_pow(n)
}

/// Basis of the printed two-site generator H.
pub const H_BASIS: [(u8, u8); 9] = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 1), (1, 2), (2, 2), (0, 2), (2, 0)];

/// Printed H in `H_BASIS` order; rates in the order L10, R10, L20, R20, L12, R12.
pub fn printed_h(r: [RatFunc; 6]) -> Vec<Vec<RatFunc>> {
    let [l10, r10, l20, r20, l12, r12] = r;
    let z = RatFunc::from_poly(LaurentPoly::zero());
    let mut m = vec![vec![z; 9]; 9];
    let mut pair = |i: usize, a: &RatFunc, b: &RatFunc| {
        m[i][i] = -a.clone();
        m[i][i + 1] = a.clone();
        m[i + 1][i] = b.clone();
        m[i + 1][i + 1] = -b.clone();
    };
    pair(1, &l10, &r10);
    pair(4, &l12, &r12);
    pair(7, &l20, &r20);
    m
}

/// Printed gl3 two-site matrix in the basis v1v1, v2v2, v3v3, v2v1, v1v2, v3v1, v1v3, v3v2, v2v3.
pub fn a2gen_printed() -> Vec<Vec<LaurentPoly>> {
    let z = LaurentPoly::zero();
    let mut m = vec![vec![z; 9]; 9];
    for b in [3, 5, 7] {
        m[b][b] = -qp(2);
        m[b][b + 1] = qp(1);
        m[b + 1][b] = qp(1);
        m[b + 1][b + 1] = -LaurentPoly::one();
    }
    m
}

/// Printed 2x2 block shared by the four one-dimensional-weight-pair sectors.
pub fn c2_a11_printed() -> Vec<Vec<LaurentPoly>> {
    vec![
        vec![-lp("q^-4 + q^6"), lp("q^-5 + q^5")],
        vec![lp("q^-5 + q^5"), -lp("q^-6 + q^4")],
    ]
}

/// Printed 4x4 zero-weight block, in the basis v4v2, v2v4, v3v1, v1v3.
pub fn c2_a00_printed() -> Vec<Vec<LaurentPoly>> {
    let s = lp("q^2 + q^-2").pow(2);
    vec![
        vec![-(qp(2) * s.clone()), s.clone(), lp("-q^-3 + q^-1 + 2*q^3"), lp("-2*q^-1 - q^3 + q^5")],
        vec![s.clone(), -(qp(-2) * s.clone()), lp("q^-5 - q^-3 - 2*q"), lp("2*q^-3 + q - q^3")],
        vec![lp("-q^-3 + q^-1 + 2*q^3"), lp("q^-5 - q^-3 - 2*q"), lp("-q^-4 + q^-2 - 1 - 2*q^4 - q^6"), s.clone()],
        vec![lp("-2*q^-1 - q^3 + q^5"), lp("2*q^-3 + q - q^3"), s, lp("-q^-6 - 2*q^-4 - 1 + q^2 - q^4")],
    ]
}

pub const C2_A00_BASIS: [(u8, u8); 4] = [(4, 2), (2, 4), (3, 1), (1, 3)];

/// Two-site tensor indices of a list of v_a ⊗ v_b pairs.
pub fn indices(alg: Algebra, pairs: &[(u8, u8)]) -> Vec<usize> {
    pairs.iter().map(|&(a, b)| alg.two_site_index(a, b)).collect()
}
