//! Small randomized property checks runnable from the binary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use mecode::codebook::words_are_prefix_free;
use mecode::fixedopt::scan;
use mecode::varopt::{build_tree, parent_child_pairs};
use mecode::{
    average_cost_exact, decode, encode, energy_saving, fixed_cost_exact, optimize_fixed, optimize_prefix,
    oracle_fixed_cost, oracle_prefix, uniform_source, CostModel, SymbolSource,
};

use super::Outcome;

type Property = fn(&mut ChaCha8Rng, bool) -> Result<(), String>;

const PROPERTIES: [(&str, Property); 8] = [
    ("fixed-closed-form", fixed_closed_form),
    ("prefix-oracle", prefix_oracle),
    ("prefix-free", prefix_free),
    ("codec-roundtrip", codec_roundtrip),
    ("prefix-dominates-fixed", dominance),
    ("gamma-only", gamma_only),
    ("parent-child-pairs", parent_child),
    ("n-opt-monotone", n_opt_monotone),
];

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: mecode::Error) -> String {
    e.to_string()
}

fn random_model(rng: &mut ChaCha8Rng) -> CostModel {
    CostModel::new(1.0, rng.random_range(1.0..50.0), 1.0, 1.0).expect("valid model")
}

fn random_source(rng: &mut ChaCha8Rng, m: usize) -> SymbolSource {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    SymbolSource::new(raw.iter().map(|x| x / total).collect()).expect("valid source")
}

fn fixed_closed_form(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    for _ in 0..20 {
        let n = rng.random_range(2..=8u32);
        let m = rng.random_range(2..=(1usize << n).min(40));
        let cm = random_model(rng);
        let closed = fixed_cost_exact(if fault { n + 1 } else { n }, m, &cm).map_err(err)?;
        let brute = oracle_fixed_cost(n, m, &cm).map_err(err)?;
        check(closed == brute, || format!("n={n} m={m}: {closed} vs {brute}"))?;
    }
    Ok(())
}

fn prefix_oracle(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    for _ in 0..6 {
        let m = rng.random_range(3..=4usize);
        let dp = rng.random_range(2..=3u32);
        let src = random_source(rng, m);
        let cm = random_model(rng);
        let a = optimize_prefix(&src, &cm, Some(dp)).map_err(err)?;
        let b = oracle_prefix(&src, &cm, dp).map_err(err)?;
        let mut ca = average_cost_exact(&src, &a, &cm).map_err(err)?;
        if fault {
            ca += num_rational::BigRational::from_integer(1.into());
        }
        let cb = average_cost_exact(&src, &b, &cm).map_err(err)?;
        check(ca == cb, || format!("M={m} dp={dp}: solver {ca} vs oracle {cb}"))?;
    }
    Ok(())
}

fn prefix_free(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    for _ in 0..6 {
        let m = rng.random_range(2..=10usize);
        let cb = optimize_prefix(&random_source(rng, m), &random_model(rng), None).map_err(err)?;
        let mut words = cb.entries().to_vec();
        if fault {
            let longest = words.iter().max_by_key(|w| w.len()).expect("non-empty").clone();
            words.push(mecode::Codeword::from_bits(longest.bits()[..longest.len() - 1].to_vec()));
        }
        check(words_are_prefix_free(&words), || format!("M={m}: not prefix free"))?;
        check(cb.kraft_sum() <= 1.0, || format!("M={m}: Kraft sum {}", cb.kraft_sum()))?;
    }
    Ok(())
}

fn codec_roundtrip(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    let m = rng.random_range(2..=12usize);
    let src = uniform_source(m).map_err(err)?;
    let cm = random_model(rng);
    let (fixed, _) = optimize_fixed(m, &cm, None).map_err(err)?;
    let prefix = optimize_prefix(&src, &cm, None).map_err(err)?;
    let symbols: Vec<usize> = (0..500).map(|_| rng.random_range(0..m)).collect();
    for cb in [fixed, prefix] {
        let bs = encode(&symbols, &cb).map_err(err)?;
        let bs = if fault { bs.iter().enumerate().map(|(i, b)| b ^ (i == 0)).collect() } else { bs };
        let back = decode(&bs, &cb);
        check(back.as_ref().ok() == Some(&symbols), || format!("{} codebook: round trip failed", cb.kind()))?;
    }
    Ok(())
}

fn dominance(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    for _ in 0..4 {
        let m = rng.random_range(2..=10usize);
        let src = uniform_source(m).map_err(err)?;
        let cm = random_model(rng);
        let (fixed, _) = optimize_fixed(m, &cm, None).map_err(err)?;
        let prefix = optimize_prefix(&src, &cm, None).map_err(err)?;
        let cf = average_cost_exact(&src, &fixed, &cm).map_err(err)?;
        let cp = average_cost_exact(&src, &prefix, &cm).map_err(err)?;
        let holds = if fault { cp > cf } else { cp <= cf };
        check(holds, || format!("M={m}: prefix {cp} vs fixed {cf}"))?;
    }
    Ok(())
}

fn gamma_only(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    let m = rng.random_range(2..=10usize);
    let src = uniform_source(m).map_err(err)?;
    let cm = random_model(rng);
    let k = rng.random_range(1e-3..1e3);
    let scaled = if fault {
        CostModel::new(cm.beta0() * k, cm.beta1(), cm.t0(), cm.t1()).map_err(err)?
    } else {
        cm.scaled(k).map_err(err)?
    };
    let a = energy_saving(&src, &optimize_prefix(&src, &cm, None).map_err(err)?, &cm).map_err(err)?;
    let b = energy_saving(&src, &optimize_prefix(&src, &scaled, None).map_err(err)?, &scaled).map_err(err)?;
    check((a - b).abs() <= 1e-12, || format!("M={m}: epsilon {a} vs {b} after scaling by {k}"))
}

fn parent_child(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    let dp = rng.random_range(1..=6u32);
    let tree = build_tree(dp, &CostModel::new(1.0, 1.0, 1.0, 1.0).map_err(err)?).map_err(err)?;
    let nodes = tree.nodes();
    let mut brute = Vec::new();
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if a.codeword.is_proper_prefix_of(&b.codeword) {
                brute.push((i, j));
            }
        }
    }
    let mut rows = parent_child_pairs(dp).map_err(err)?.rows().to_vec();
    if fault {
        rows.push((0, 0));
    }
    rows.sort();
    check(rows == brute, || format!("dp={dp}: {} rows vs {} ancestor pairs", rows.len(), brute.len()))
}

fn n_opt_monotone(rng: &mut ChaCha8Rng, fault: bool) -> Result<(), String> {
    let m = rng.random_range(3..=40usize);
    let src = uniform_source(m).map_err(err)?;
    let mut gammas: Vec<f64> = (0..12).map(|i| 10f64.powf(i as f64 / 2.0)).collect();
    if fault {
        gammas.reverse();
    }
    let mut last = 0;
    for g in gammas {
        let n = scan(&src, &CostModel::new(1.0, g, 1.0, 1.0).map_err(err)?, None).map_err(err)?.n_opt;
        check(n >= last, || format!("M={m}: n_opt falls to {n} at gamma {g}"))?;
        last = n;
    }
    Ok(())
}

pub fn run(seed: u64, inject: Option<&str>) -> Outcome {
    let mut results = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    if let Some(name) = inject {
        if !PROPERTIES.iter().any(|(p, _)| *p == name) {
            ok = false;
            text.push_str(&format!("FAIL  inject-fault: no property named {name:?}\n"));
            results.push(json!({ "name": "inject-fault", "passed": false, "detail": format!("no property named {name:?}") }));
        }
    }
    for (i, (name, property)) in PROPERTIES.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let outcome = property(&mut rng, inject == Some(*name));
        match &outcome {
            Ok(()) => text.push_str(&format!("PASS  {name}\n")),
            Err(detail) => {
                ok = false;
                text.push_str(&format!("FAIL  {name}: {detail}\n"));
            }
        }
        results.push(json!({ "name": name, "passed": outcome.is_ok(), "detail": outcome.err() }));
    }
    Outcome { report: json!({ "seed": seed, "passed": ok, "results": results }), text, ok }
}
