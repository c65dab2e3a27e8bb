mod common;

use common::*;
use qgdual::duality::*;
use qgdual::groundstate::{ground_state, tensor_index};
use qgdual::{fundamental_rep, Algebra, Configuration, LaurentPoly, RatFunc, Rational, Symbolic};

fn exact(alg: Algebra) -> qgdual::SiteRep<LaurentPoly> {
    fundamental_rep(alg, &Symbolic)
}

fn c(s: &str) -> Configuration {
    s.parse().unwrap()
}

#[test]
fn exact_duality_holds() {
    for v in Variant::ALL {
        for l in 2..=3 {
            let r = verify_duality_exact(v, l).unwrap();
            assert!(r.passed(), "{v} L={l}: {:?}", r.failures.first());
        }
    }
    assert_eq!(verify_duality_exact(Variant::A2Self, 3).unwrap().pairs_checked, 27 * 27);
    assert_eq!(verify_duality_exact(Variant::C2ToAsep, 3).unwrap().pairs_checked, 27 * 8);
}

#[test]
fn exact_duality_at_four_sites() {
    for v in Variant::ALL {
        assert!(verify_duality_exact(v, 4).unwrap().passed(), "{v}");
    }
}

#[test]
fn float_duality_holds() {
    for v in Variant::ALL {
        for (l, q) in [(4, 0.45), (6, 0.8)] {
            let r = verify_duality_float(v, l, q).unwrap();
            assert!(r.passed(), "{v} L={l}: {:?}", r.failures.first());
        }
    }
}

#[test]
fn wrong_table_is_caught() {
    let rep = exact(Algebra::C2);
    let process = qgdual::markov::constructed_generator(Algebra::C2, 2).unwrap().raw;
    let mut table = duality_table(Variant::C2Self, 2, rep.ring()).unwrap();
    table = table.add(&qgdual::Operator::from_triplets(9, 9, vec![(1, 1, LaurentPoly::one())]));
    let report = check_duality(Variant::C2Self, 2, &process, &process, &table);
    assert!(!report.passed());
    let json = serde_json::to_value(&report).unwrap();
    for key in ["variant", "L", "ring", "pairs_checked", "failures"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert!(json["failures"][0].get("lhs").is_some());
}

#[test]
fn symmetries_commute_with_the_hamiltonian() {
    for (alg, recipe) in [
        (Algebra::A2, Recipe::ExpE2ExpE1),
        (Algebra::C2, Recipe::ExpE2ExpE1),
        (Algebra::C2, Recipe::ExpE2Only),
    ] {
        let rep = exact(alg);
        for l in 2..=4 {
            let s = symmetry_matrix(&rep, recipe, l).unwrap();
            assert!(symmetry_commutes(&rep, &s, l).unwrap(), "{alg} {recipe:?} L={l}");
        }
    }
}

#[test]
fn vacuum_column_is_the_ground_state() {
    for alg in [Algebra::A2, Algebra::C2] {
        let rep = exact(alg);
        let s = symmetry_matrix(&rep, Recipe::ExpE2ExpE1, 3).unwrap();
        let g = ground_state(&rep, 3, &Rational::from_integer(0.into())).unwrap();
        for (i, b) in g.base.iter().enumerate() {
            assert_eq!(&s.get(i, 0), b);
        }
    }
}

/// Explicit product formula for exp_{q^4}(e2) on {0,1,2}^L.
fn e2_only_oracle(eta: &Configuration, xi: &Configuration) -> LaurentPoly {
    let mut exp = 0i64;
    for i in 1..=eta.len() {
        let (x, e) = (xi.at(i), eta.at(i));
        if x == e {
            continue;
        }
        if x == 2 && e == 1 {
            exp += 2 * (xi.count_left(i, |s| s == 1) as i64 - xi.count_left(i, |s| s == 2) as i64);
        } else {
            return LaurentPoly::zero();
        }
    }
    qp(exp)
}

/// Explicit product formula for the full C2 symmetry on columns without the promoted type.
fn full_s_oracle(eta: &Configuration, xi: &Configuration) -> LaurentPoly {
    let mut exp = 0i64;
    for i in 1..=eta.len() {
        let (x, e) = (xi.at(i), eta.at(i));
        if x != 0 && e == 0 {
            return LaurentPoly::zero();
        }
        if x == 0 && e != 0 {
            exp += xi.count_left(i, |s| s == 2) as i64 - xi.count_left(i, |s| s == 0) as i64;
        }
        if e == 1 {
            let n = (1..i).filter(|&j| (xi.at(j) == 0 && eta.at(j) != 0) || xi.at(j) == 2).count() as i64;
            exp -= 2 * n;
        }
    }
    qp(exp)
}

#[test]
fn symmetry_entries_follow_the_product_formulas() {
    let rep = exact(Algebra::C2);
    for l in 1..=3 {
        let only = symmetry_matrix(&rep, Recipe::ExpE2Only, l).unwrap();
        let full = symmetry_matrix(&rep, Recipe::ExpE2ExpE1, l).unwrap();
        for eta in Configuration::enumerate(3, l) {
            for xi in Configuration::enumerate(3, l) {
                let (r, col) = (tensor_index(Algebra::C2, &eta), tensor_index(Algebra::C2, &xi));
                assert_eq!(only.get(r, col), e2_only_oracle(&eta, &xi), "{eta} {xi}");
                if xi.count(1) == 0 {
                    assert_eq!(full.get(r, col), full_s_oracle(&eta, &xi), "{eta} {xi}");
                }
            }
        }
    }
}

#[test]
fn symmetry_only_adds_or_promotes() {
    for alg in [Algebra::A2, Algebra::C2] {
        let rep = exact(alg);
        let s = symmetry_matrix(&rep, Recipe::ExpE2ExpE1, 3).unwrap();
        let d = alg.site_dim();
        for (r, col, _) in s.entries() {
            let (eta, xi) = (Configuration::from_index(r, d, 3), Configuration::from_index(col, d, 3));
            assert!(eta.occupied() >= xi.occupied(), "{eta} {xi}");
            for i in 1..=3 {
                assert!(xi.at(i) == 0 || eta.at(i) != 0);
            }
        }
    }
}

#[test]
fn c2_self_is_the_symmetry_exactly() {
    for l in 1..=3 {
        let r = duality_from_symmetry(Variant::C2Self, l).unwrap();
        assert!(r.proportional && r.single_constant, "{:?}", r.witness);
        let one = RatFunc::from_poly(LaurentPoly::one());
        assert!(r.column_constants.iter().flatten().all(|c| *c == one));
    }
}

#[test]
fn c2_to_asep_constants_depend_on_particle_number() {
    for l in 1..=4 {
        let r = duality_from_symmetry(Variant::C2ToAsep, l).unwrap();
        assert!(r.proportional, "{:?}", r.witness);
        assert!(r.doubly_occupied_rows_vanish);
        for (xi, k) in Configuration::enumerate(2, l).iter().zip(&r.column_constants) {
            let n = xi.occupied() as i64;
            assert_eq!(k.clone().unwrap(), RatFunc::from_poly(qp(-2 * n - (n - 1) * n)), "{xi}");
        }
    }
}

#[test]
fn a2_symmetry_is_not_column_proportional() {
    let r = duality_from_symmetry(Variant::A2Self, 2).unwrap();
    assert!(!r.proportional);
    assert!(r.witness.is_some());
}

#[test]
fn a2_specializes_to_asep_monomials() {
    for l in 1..=4 {
        for eta in Configuration::enumerate(3, l) {
            for occ in Configuration::enumerate(2, l) {
                let xi = Configuration::new(occ.sites().iter().map(|&s| s * 2).collect()).unwrap();
                assert_eq!(
                    duality_value(Variant::A2Self, &eta, &xi).unwrap(),
                    duality_value(Variant::C2ToAsep, &eta, &occ).unwrap()
                );
            }
        }
    }
}

#[test]
fn worked_examples() {
    assert_eq!(duality_value(Variant::A2Self, &c("000"), &c("000")).unwrap(), LaurentPoly::one());
    assert_eq!(duality_value(Variant::C2ToAsep, &c("110"), &c("010")).unwrap(), qp(4));
    assert_eq!(duality_value(Variant::A2Self, &c("101"), &c("100")).unwrap(), qp(4));
}
