//! Acceptance run: one PASS/FAIL line per criterion.

#[path = "../../qgdual/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use qgdual::central::{build_central, kernel_probe, normalized_a, verify_centrality, CentralElement, LatticeHamiltonian};
use qgdual::duality::{verify_duality_exact, Variant};
use qgdual::groundstate::{closed_form_g, ground_state, tensor_index};
use qgdual::markov::{
    asep_generator, b1_indices, c2_a, constructed_generator, lumping_mismatch, paper_rates, reference_generator,
};
use qgdual::repkit::verify_relations;
use qgdual::sim::{duality_float, mc_duality_check};
use qgdual::{fundamental_rep, Algebra, Configuration, LaurentPoly, Operator, RatFunc, Rational, SiteRep, Symbolic};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact(alg: Algebra) -> SiteRep<LaurentPoly> {
    fundamental_rep(alg, &Symbolic)
}

const ALGS: [Algebra; 2] = [Algebra::A2, Algebra::C2];

fn relations() -> Outcome {
    for alg in ALGS {
        for l in 1..=2 {
            let r = verify_relations(&exact(alg), l).map_err(|e| e.to_string())?;
            ensure(r.passed(), || {
                format!("{alg} L={l}: {:?}", r.failures().map(|c| &c.name).collect::<Vec<_>>())
            })?;
        }
    }
    Ok("gl3 and sp4, one and two sites".into())
}

fn centrality() -> Outcome {
    for alg in ALGS {
        for l in 1..=3 {
            let r = verify_centrality(&exact(alg), l).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("{alg} L={l} not central"))?;
        }
    }
    let rep = exact(Algebra::C2);
    let c = build_central(&rep, 1).map_err(|e| e.to_string())?;
    let want = Operator::identity(4).scale(&CentralElement::c2_site_eigenvalue());
    ensure(c == want, || "sp4 element is not the expected scalar on V".into())?;
    ensure(CentralElement::c2_site_eigenvalue() == lp("q^-6 + q^-2 + q^2 + q^6"), || {
        "unexpected eigenvalue".into()
    })?;
    Ok("L = 1..3, both algebras; scalar on V".into())
}

fn printed_matrices() -> Outcome {
    let block = |op: &Operator<LaurentPoly>, idx: &[usize]| op.submatrix(idx, idx).to_dense();
    let dc = build_central(&exact(Algebra::A2), 2).map_err(|e| e.to_string())?;
    ensure(
        block(&dc, &indices(Algebra::A2, &Algebra::a2_display_order())) == a2gen_printed(),
        || "gl3 two-site matrix differs".into(),
    )?;
    let a = normalized_a(&exact(Algebra::C2)).map_err(|e| e.to_string())?;
    let order = Algebra::c2_display_order();
    for (i, j) in [(1, 2), (4, 5), (10, 11), (13, 14)] {
        ensure(
            block(&a, &indices(Algebra::C2, &[order[i], order[j]])) == c2_a11_printed(),
            || format!("sp4 2x2 block at {i},{j} differs"),
        )?;
    }
    ensure(block(&a, &indices(Algebra::C2, &C2_A00_BASIS)) == c2_a00_printed(), || {
        "sp4 zero-weight block differs".into()
    })?;
    Ok("gl3 9x9, sp4 2x2 and 4x4 blocks".into())
}

fn kernel() -> Outcome {
    let r = kernel_probe(&exact(Algebra::C2)).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.rank == 10, || format!("rank {}", r.rank))?;
    Ok("ten vectors, rank 10".into())
}

fn ground_states() -> Outcome {
    for alg in ALGS {
        let rep = exact(alg);
        for l in 1..=4 {
            let d = alg.site_dim();
            let mut closed = vec![LaurentPoly::zero(); d.pow(l as u32)];
            let g0 = ground_state(&rep, l, &Rational::from_integer(0.into())).map_err(|e| e.to_string())?;
            for eta in Configuration::enumerate(3, l) {
                let w = closed_form_g(alg, &eta).map_err(|e| e.to_string())?;
                let i = tensor_index(alg, &eta);
                ensure(g0.base[i] == w, || format!("{alg} L={l} {eta}: constructed and closed form differ"))?;
                closed[i] = w;
            }
            if l < 2 {
                continue;
            }
            let h = LatticeHamiltonian::new(&rep, l).map_err(|e| e.to_string())?.full;
            ensure(h.apply(&closed).iter().all(LaurentPoly::is_zero), || {
                format!("{alg} L={l}: closed form not annihilated")
            })?;
            for eps in [Rational::from_integer(0.into()), Rational::new(1.into(), 10.into())] {
                let g = ground_state(&rep, l, &eps).map_err(|e| e.to_string())?;
                ensure(h.apply(&g.vector()).iter().all(LaurentPoly::is_zero), || {
                    format!("{alg} L={l} eps={eps}: not annihilated")
                })?;
            }
        }
    }
    Ok("L <= 4, eps in {0, 1/10}, closed forms".into())
}

fn generator_match() -> Outcome {
    let lhs = &c2_a() * &RatFunc::from_poly(lp("q^-4 + q^6"));
    ensure(lhs == RatFunc::from_poly(lp("q^2") * lp("q^2 + q^-2").pow(2)), || "rate a".into())?;
    for alg in ALGS {
        let rep = exact(alg);
        for l in 2..=3 {
            let c = constructed_generator(alg, l).map_err(|e| e.to_string())?;
            let r = reference_generator(&paper_rates(alg), l).map_err(|e| e.to_string())?;
            if let Some(d) = c.normalized.first_difference(&r, 0.0) {
                return Err(format!("{alg} L={l} entry ({}, {}): {} vs {}", d.row, d.col, d.lhs, d.rhs));
            }
            // B1 -> B2 entries at eps = 0 carry the vanishing base weight
            let a = LatticeHamiltonian::new(&rep, l).map_err(|e| e.to_string())?.full;
            let g = ground_state(&rep, l, &Rational::from_integer(0.into())).map_err(|e| e.to_string())?;
            let b1 = b1_indices(alg, l);
            for &x in &b1 {
                for (y, v) in a.row(x) {
                    if !b1.contains(y) && !(v.clone() * g.base[*y].clone()).is_zero() {
                        return Err(format!("{alg} L={l}: B1 -> B2 entry {x} -> {y} survives"));
                    }
                }
            }
        }
    }
    let c2 = constructed_generator(Algebra::C2, 2).map_err(|e| e.to_string())?;
    let idx = |s: &str| s.parse::<Configuration>().unwrap().index(3);
    ensure(
        c2.normalized.get(idx("12"), idx("21")) == &c2_a() * &RatFunc::from_poly(qp(-4)),
        || "R(1,2) != a q^-4".into(),
    )?;
    Ok("L = 2, 3, both algebras, exact".into())
}

fn duality_exact() -> Outcome {
    let mut pairs = 0;
    for v in Variant::ALL {
        for l in 2..=4 {
            let r = verify_duality_exact(v, l).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("{v} L={l}: {} failures, first {:?}", r.failures.len(), r.failures.first()))?;
            pairs += r.pairs_checked;
        }
    }
    Ok(format!("three variants, L = 2..4, {pairs} pairs"))
}

fn random_config(rng: &mut ChaCha8Rng, states: u8, l: usize) -> Configuration {
    Configuration::new((0..l).map(|_| rng.gen_range(0..states)).collect()).unwrap()
}

fn stochastic() -> Outcome {
    let (l, q, t, n) = (6, 0.5, 1.0, 100_000);
    let mut worst: f64 = 0.0;
    for (vi, v) in Variant::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + vi as u64);
        for probe in 0..10 {
            // probes with D(x, y) != 0 at time zero, so both sides carry signal
            let (x, y) = loop {
                let x = random_config(&mut rng, 3, l);
                let y = random_config(&mut rng, v.dual_site_states() as u8, l);
                if y.occupied() > 0 && duality_float(v, &x, &y, q).map_err(|e| e.to_string())? > 0.0 {
                    break (x, y);
                }
            };
            let seed = 7919 * (vi as u64 + 1) + probe;
            let est = mc_duality_check(v, &x, &y, t, n, seed, q).map_err(|e| e.to_string())?;
            let (el, er) = est.exact.ok_or("missing exact values")?;
            let sigma = est.combined_stderr();
            let dev = [(est.lhs.mean - est.rhs.mean).abs(), (est.lhs.mean - el).abs(), (est.rhs.mean - er).abs()]
                .into_iter()
                .fold(0.0, f64::max);
            if sigma > 0.0 {
                worst = worst.max(dev / sigma);
            }
            ensure(est.agrees(3.0), || {
                format!(
                    "{v} x={x} y={y}: lhs {} ± {}, rhs {} ± {}, exact ({el}, {er})",
                    est.lhs.mean, est.lhs.stderr, est.rhs.mean, est.rhs.stderr
                )
            })?;
        }
    }
    Ok(format!("30 probes, worst deviation {worst:.2} combined stderr"))
}

fn lumping() -> Outcome {
    let one = RatFunc::from_poly(LaurentPoly::one());
    for alg in ALGS {
        for l in 2..=3 {
            let c = constructed_generator(alg, l).map_err(|e| e.to_string())?;
            let asep = asep_generator(&one, &RatFunc::from_poly(qp(-2)), l).map_err(|e| e.to_string())?;
            if let Some(m) = lumping_mismatch(&c.normalized, &asep, l) {
                return Err(format!("{alg} L={l}: {m:?}"));
            }
        }
    }
    Ok("both algebras, L = 2, 3".into())
}

fn run_cli(args: &[&str]) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_qgdual"))
        .args(args)
        .env("QGDUAL_LOG", "error")
        .output()
        .map_err(|e| e.to_string())?
        .status;
    status.code().ok_or_else(|| "killed by signal".to_string())
}

/// Every file in `dir`, with timing fields removed from manifests.
fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let mut bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
        if name.ends_with(".manifest.json") {
            let mut v: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
            let obj = v.as_object_mut().ok_or("manifest is not an object")?;
            obj.remove("started_unix");
            obj.remove("wall_clock_seconds");
            bytes = serde_json::to_vec(&v).map_err(|e| e.to_string())?;
        }
        out.insert(name, bytes);
    }
    Ok(out)
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let p = |f: &str| d.join(f).to_string_lossy().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["verify".into(), "--scope".into(), "all".into(), "--alg".into(), "C2".into(), "--L".into(), "2".into()],
        vec!["simulate", "--mode", "duality_mc", "--variant", "C2_to_ASEP", "--L", "4", "--traj", "4000", "--seed", "7"]
            .into_iter()
            .map(String::from)
            .collect(),
        vec!["simulate", "--mode", "moment_demo", "--variant", "A2_self", "--L", "4", "--traj", "4000", "--seed", "9"]
            .into_iter()
            .map(String::from)
            .collect(),
        vec!["simulate", "--mode", "trajectory", "--alg", "A2", "--L", "8", "--q", "0.5", "--seed", "42", "--traj", "500"]
            .into_iter()
            .map(String::from)
            .collect(),
        vec!["dump".into(), "generator".into(), "--alg".into(), "A2".into(), "--L".into(), "3".into()],
    ];
    let outs = ["verify.json", "mc.json", "moment.json", "trajectory.csv", "generator.csv"];
    let run_all = |extra: &[&str]| -> Result<BTreeMap<String, Vec<u8>>, String> {
        for (args, out) in runs.iter().zip(outs) {
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            let target = p(out);
            a.extend(["--out", target.as_str()]);
            a.extend(extra);
            let code = run_cli(&a)?;
            ensure(code == 0, || format!("{a:?} exited with {code}"))?;
        }
        snapshot(d)
    };
    let first = run_all(&[])?;
    let second = run_all(&[])?;
    ensure(first.len() >= 2 * outs.len(), || format!("only {} files written", first.len()))?;
    for (name, bytes) in &first {
        ensure(second.get(name) == Some(bytes), || format!("{name} differs between identical runs"))?;
    }
    // worker count changes scheduling but not the reports
    let single = run_all(&["--jobs", "1"])?;
    for (name, bytes) in first.iter().filter(|(n, _)| !n.ends_with(".manifest.json")) {
        ensure(single.get(name) == Some(bytes), || format!("{name} depends on --jobs"))?;
    }
    Ok(format!("{} files byte-identical across runs", first.len()))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [Criterion; 10] = [
        ("relations", relations),
        ("centrality", centrality),
        ("printed matrices", printed_matrices),
        ("kernel", kernel),
        ("ground states", ground_states),
        ("generator match", generator_match),
        ("exact duality", duality_exact),
        ("stochastic consistency", stochastic),
        ("lumping", lumping),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(note) => println!("criterion {:>2} PASS  {name}: {note} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
