mod common;

use common::*;
use qgdual::markov::*;
use qgdual::{Algebra, Configuration, LaurentPoly, Operator, RatFunc, Rational};

fn rf(p: LaurentPoly) -> RatFunc {
    RatFunc::from_poly(p)
}

fn rate_list(r: &RateTable<RatFunc>) -> [RatFunc; 6] {
    [r.l10.clone(), r.r10.clone(), r.l20.clone(), r.r20.clone(), r.l12.clone(), r.r12.clone()]
}

fn idx(c: &str) -> usize {
    c.parse::<Configuration>().unwrap().index(3)
}

#[test]
fn two_site_block_matches_printed_h() {
    for alg in [Algebra::A2, Algebra::C2] {
        let rates = paper_rates(alg);
        let h = two_site_generator(&rates);
        let perm: Vec<usize> = H_BASIS.iter().map(|&(a, b)| a as usize * 3 + b as usize).collect();
        assert_eq!(h.submatrix(&perm, &perm).to_dense(), printed_h(rate_list(&rates)));
    }
}

#[test]
fn reference_generator_entries() {
    let rates = paper_rates(Algebra::C2);
    let g = reference_generator(&rates, 2).unwrap();
    assert_eq!(g.get(idx("01"), idx("10")), rates.l10);
    assert_eq!(g.get(idx("10"), idx("01")), rates.r10);
    assert_eq!(g.get(idx("21"), idx("12")), rates.l12);
    assert!(g.row(idx("11")).is_empty());
    assert!(reference_generator(&rates, 1).is_err());
}

#[test]
fn a2_rates_are_symmetric_at_q_one() {
    let r = paper_rates(Algebra::A2).eval(1.0).unwrap();
    for (_, v) in r.entries() {
        assert_eq!(*v, 1.0);
    }
    // the float path divides by (q - q^-1)^2, so evaluate the exact generator
    let g = constructed_generator(Algebra::A2, 3).unwrap().normalized.map(|v| v.eval(1.0).unwrap());
    assert!(g.first_difference(&g.transpose(), 1e-12).is_none());
}

#[test]
fn c2_rate_equation_in_floats() {
    let q: f64 = 0.7;
    let a = paper_rates(Algebra::C2).eval(q).unwrap().l12;
    let resid = (q.powi(-4) + q.powi(6)) * a - q * q * (q * q + q.powi(-2)).powi(2);
    assert!(resid.abs() < 1e-12);
    assert_eq!(c2_a().eval(1.0).unwrap(), 2.0);
}

#[test]
fn constructed_equals_reference() {
    for alg in [Algebra::A2, Algebra::C2] {
        for l in 2..=3 {
            let c = constructed_generator(alg, l).unwrap();
            let r = reference_generator(&paper_rates(alg), l).unwrap();
            let diff = c.normalized.first_difference(&r, 0.0);
            assert!(diff.is_none(), "{alg} L={l}: {diff:?}");
        }
    }
}

#[test]
fn normalization_constants() {
    assert_eq!(constructed_generator(Algebra::A2, 2).unwrap().normalization, qp(2));
    assert_eq!(constructed_generator(Algebra::C2, 2).unwrap().normalization, lp("q^-4 + q^6"));
}

#[test]
fn worked_entries() {
    let a2 = constructed_generator(Algebra::A2, 2).unwrap();
    assert_eq!(a2.normalized.get(idx("10"), idx("01")), rf(qp(-2)));
    let c2 = constructed_generator(Algebra::C2, 2).unwrap();
    let ratio = &c2.normalized.get(idx("21"), idx("12")) / &c2.normalized.get(idx("01"), idx("10"));
    assert_eq!(ratio, c2_a());
    assert_eq!(c2.normalized.get(idx("12"), idx("21")), &c2_a() * &rf(qp(-4)));
}

#[test]
fn constructed_rows_sum_to_zero() {
    for alg in [Algebra::A2, Algebra::C2] {
        for l in 2..=4 {
            let c = constructed_generator(alg, l).unwrap();
            assert!(c.raw.row_sums().iter().all(|s| s.is_zero()), "{alg} L={l}");
        }
    }
}

#[test]
fn validation_passes_and_catches_faults() {
    let a2 = constructed_generator(Algebra::A2, 3).unwrap();
    let report = validate_generator(&a2.normalized, 3, &[0.3, 0.5, 0.9]);
    assert!(report.passed(), "{report:?}");
    let c2 = constructed_generator(Algebra::C2, 2).unwrap();
    let report = validate_generator(&c2.normalized, 2, &[0.3, 0.5, 0.9]);
    assert!(report.conserving && report.passed());

    let mut bad = paper_rates(Algebra::A2);
    bad.l12 = -bad.l12;
    let report = validate_generator(&reference_generator(&bad, 3).unwrap(), 3, &[0.5]);
    assert!(!report.nonnegative);
    assert!(report.row_sums_zero);

    let jump = Operator::from_triplets(9, 9, vec![(idx("10"), idx("00"), 1.0), (idx("10"), idx("10"), -1.0)]);
    let report = validate_generator(&jump, 2, &[0.5]);
    assert!(!report.local && !report.conserving);
}

#[test]
fn occupation_projection_is_asep() {
    for alg in [Algebra::A2, Algebra::C2] {
        for l in 2..=3 {
            let c = constructed_generator(alg, l).unwrap();
            let asep = asep_generator(&rf(LaurentPoly::one()), &rf(qp(-2)), l).unwrap();
            assert_eq!(lumping_mismatch(&c.normalized, &asep, l), None, "{alg} L={l}");
        }
    }
}

#[test]
fn limit_entries_into_doubly_occupied_states() {
    let c = constructed_generator(Algebra::C2, 3).unwrap();
    assert!(!c.leaks.is_empty());
    for leak in &c.leaks {
        assert!(leak.to.contains('T'));
        assert!(!leak.from.contains('T'));
        assert_ne!(leak.eps_coefficient, "0");
    }
    assert!(constructed_generator(Algebra::A2, 3).unwrap().leaks.is_empty());
}

#[test]
fn eps_slope_within_doubly_free_block() {
    // the correction words also reach doubly-free states, so the block is
    // eps-dependent at first order; only its eps -> 0 value is the generator
    let c = constructed_generator(Algebra::C2, 2).unwrap();
    assert!(!c.eps_slope.is_zero());
    assert!(constructed_generator(Algebra::A2, 2).unwrap().eps_slope.is_zero());
}

#[test]
fn local_float_generator_matches_reference() {
    for alg in [Algebra::A2, Algebra::C2] {
        for (l, q) in [(3, 0.4), (5, 0.8), (8, 0.6)] {
            let g = float_generator(alg, l, q).unwrap();
            let r = reference_generator(&paper_rates(alg).eval(q).unwrap(), l).unwrap();
            assert!(g.first_difference(&r, 1e-9).is_none(), "{alg} L={l}");
        }
    }
    assert!(float_generator(Algebra::A2, 3, -0.5).is_err());
}

#[test]
fn epsilon_sweep_converges_linearly() {
    let eps: Vec<Rational> = (1..=4).map(|k| Rational::new(1.into(), 10i64.pow(k).into())).collect();
    let sweep = epsilon_sweep(3, 0.6, &eps).unwrap();
    for w in sweep.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    for (e, dev) in &sweep {
        assert!(dev / e < 1e3, "eps={e} dev={dev}");
    }
}
