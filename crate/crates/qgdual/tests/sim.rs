use qgdual::duality::Variant;
use qgdual::sim::*;
use qgdual::{Algebra, Configuration};
use rand::{Rng, SeedableRng};

fn c(s: &str) -> Configuration {
    s.parse().unwrap()
}

/// P(type-2 particle on site 2 at time t | site 1 at time 0) for rates (right q^-2, left 1).
fn two_state(q: f64, t: f64) -> f64 {
    let r = q.powi(-2);
    r / (1.0 + r) * (1.0 - (-(1.0 + r) * t).exp())
}

#[test]
fn semigroup_matches_two_state_solution() {
    let q = 0.5;
    let dynm = Dynamics::for_algebra(Algebra::A2, q).unwrap();
    let gen = dynm.generator(2).unwrap();
    for t in [0.0, 0.1, 0.7, 3.0, 40.0] {
        let mut p0 = vec![0.0; 9];
        p0[c("20").index(3)] = 1.0;
        let p = expm_action(&gen, &p0, t).unwrap();
        assert!((p[c("02").index(3)] - two_state(q, t)).abs() < 1e-10, "t={t}");
        assert!(p.iter().all(|&x| x >= -1e-15));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    assert!(expm_action(&gen, &[1.0; 3], 1.0).is_err());
}

#[test]
fn simulation_matches_two_state_solution() {
    let q = 0.5;
    let cfg = SimConfig {
        dynamics: Dynamics::for_algebra(Algebra::A2, q).unwrap(),
        initial: c("20"),
        t: 0.3,
        seed: 7,
        trajectories: 100_000,
    };
    let hits: Vec<f64> = cfg.run().unwrap().iter().map(|x| f64::from(*x == c("02"))).collect();
    let est = Estimate::from_samples(&hits);
    assert!((est.mean - two_state(q, 0.3)).abs() < 4.0 * est.stderr);
}

#[test]
fn empirical_transitions_match_semigroup() {
    let (q, t, n) = (0.6, 0.8, 100_000);
    for alg in [Algebra::A2, Algebra::C2] {
        let dynm = Dynamics::for_algebra(alg, q).unwrap();
        let gen = dynm.generator(2).unwrap();
        for (s, start) in Configuration::enumerate(3, 2).iter().enumerate() {
            let mut p0 = vec![0.0; 9];
            p0[s] = 1.0;
            let exact = expm_action(&gen, &p0, t).unwrap();
            let cfg = SimConfig { dynamics: dynm.clone(), initial: start.clone(), t, seed: 11 + s as u64, trajectories: n };
            let mut counts = [0usize; 9];
            for fin in cfg.run().unwrap() {
                counts[fin.index(3)] += 1;
            }
            for (k, &p) in exact.iter().enumerate() {
                let freq = counts[k] as f64 / n as f64;
                let se = (p * (1.0 - p) / n as f64).sqrt();
                assert!((freq - p).abs() <= 4.0 * se + 1e-12, "{alg} {start}->{k}: {freq} vs {p}");
            }
        }
    }
}

#[test]
fn long_horizons_are_split() {
    let dynm = Dynamics::for_algebra(Algebra::C2, 0.3).unwrap();
    let gen = dynm.generator(3).unwrap();
    let mut p0 = vec![0.0; 27];
    p0[c("120").index(3)] = 1.0;
    let once = expm_action(&gen, &p0, 5.0).unwrap();
    let twice = expm_action(&gen, &expm_action(&gen, &p0, 2.5).unwrap(), 2.5).unwrap();
    for (a, b) in once.iter().zip(&twice) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn trajectories_conserve_particles_and_reproduce() {
    let cfg = SimConfig {
        dynamics: Dynamics::for_algebra(Algebra::C2, 0.5).unwrap(),
        initial: c("12012021"),
        t: 5.0,
        seed: 42,
        trajectories: 1,
    };
    let (fin, events) = cfg.trajectory().unwrap();
    let (again_fin, again) = cfg.trajectory().unwrap();
    assert_eq!(events, again);
    assert_eq!(fin, again_fin);
    assert!(!events.is_empty());
    let mut eta = cfg.initial.clone();
    for e in &events {
        assert_eq!(format!("{}{}", eta.at(e.site), eta.at(e.site + 1)), e.from_state);
        eta = eta.swapped(e.site);
        assert_eq!(eta.count(1), 3);
        assert_eq!(eta.count(2), 3);
    }
    assert_eq!(eta, fin);
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &events).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with("time,site,from_state,to_state\n"));
}

#[test]
fn blocked_configurations_stay_put() {
    let dynm = Dynamics::for_algebra(Algebra::A2, 0.5).unwrap();
    let mut rng = trajectory_rng(3, 0);
    assert_eq!(simulate(&dynm, &c("111"), 10.0, &mut rng, None), c("111"));
    assert!(first_event_time(&dynm, &c("22"), &mut rng).is_none());
}

#[test]
fn waiting_times_are_exponential() {
    let q: f64 = 0.5;
    let dynm = Dynamics::for_algebra(Algebra::C2, q).unwrap();
    let eta = c("0100");
    let rate = 1.0 + q.powi(-2);
    let mut rng = trajectory_rng(5, 0);
    let samples: Vec<f64> = (0..20_000).map(|_| first_event_time(&dynm, &eta, &mut rng).unwrap()).collect();
    let (_, p) = ks_exponential(&samples, rate);
    assert!(p > 1e-3, "p = {p}");
    let (_, p_wrong) = ks_exponential(&samples, 2.0 * rate);
    assert!(p_wrong < 1e-3);
}

#[test]
fn zero_horizon_duality_is_exact() {
    for v in Variant::ALL {
        let y = if v == Variant::C2ToAsep { c("0101") } else { c("0201") };
        let est = mc_duality_check(v, &c("1221"), &y, 0.0, 100, 1, 0.5).unwrap();
        assert_eq!(est.lhs.stderr, 0.0);
        assert_eq!(est.lhs.mean, est.rhs.mean);
    }
}

#[test]
fn asep_duality_at_six_sites() {
    let est = mc_duality_check(Variant::C2ToAsep, &c("121020"), &c("010100"), 1.0, 100_000, 2024, 0.5).unwrap();
    assert!(est.agrees(3.0), "{est:?}");
    assert!(est.exact.is_some());
}

#[test]
fn a2_duality_against_exact_values() {
    let est = mc_duality_check(Variant::A2Self, &c("1122"), &c("0120"), 0.7, 100_000, 9, 0.5).unwrap();
    let (el, er) = est.exact.unwrap();
    assert!((el - er).abs() < 1e-10);
    assert!((est.lhs.mean - el).abs() <= 3.0 * est.lhs.stderr.max(1e-12));
    assert!((est.rhs.mean - er).abs() <= 3.0 * est.rhs.stderr.max(1e-12));
}

#[test]
fn randomized_probes_agree() {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(77);
    for v in Variant::ALL {
        for _ in 0..3 {
            let x = Configuration::new((0..4).map(|_| rng.gen_range(0..3)).collect()).unwrap();
            let y = Configuration::new((0..4).map(|_| rng.gen_range(0..v.dual_site_states() as u8)).collect()).unwrap();
            let t = rng.gen_range(0.1..1.5);
            let est = mc_duality_check(v, &x, &y, t, 20_000, rng.gen(), 0.6).unwrap();
            assert!(est.agrees(3.0), "{est:?}");
        }
    }
}

#[test]
fn moment_demo_cases() {
    let init = moment_demo_initial(5);
    assert_eq!(init, c("12222"));
    let r0 = current_moment_demo(Variant::A2Self, &init, &c("00000"), 1.0, 0.5, 1000, 1).unwrap();
    assert_eq!((r0.forward.mean, r0.backward.mean), (1.0, 1.0));
    let r1 = current_moment_demo(Variant::C2ToAsep, &c("10210"), &c("00100"), 1.0, 0.5, 50_000, 2).unwrap();
    assert_eq!(r1.r, 1);
    assert!(r1.agree, "{r1:?}");
    let r2 = current_moment_demo(Variant::A2Self, &init, &c("01002"), 1.0, 0.5, 50_000, 3).unwrap();
    assert_eq!(r2.r, 2);
    assert!(r2.agree, "{r2:?}");
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(mc_duality_check(Variant::C2ToAsep, &c("12"), &c("02"), 1.0, 10, 1, 0.5).is_err());
    assert!(mc_duality_check(Variant::A2Self, &c("12"), &c("02"), -1.0, 10, 1, 0.5).is_err());
    assert!(mc_duality_check(Variant::A2Self, &c("12"), &c("02"), 1.0, 10, 1, 0.0).is_err());
}
