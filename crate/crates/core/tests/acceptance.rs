//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mecode::codebook::Codeword;
use mecode::fixedopt::{fixed_cost_exact, scan};
use mecode::metrics::{parse_grid, sweep, SweepSpec, SweepVar};
use mecode::varopt::{build_tree, parent_child_pairs};
use mecode::{
    average_cost, average_cost_exact, decode, encode, energy_saving, epsilon_max_fixed, optimize_fixed,
    optimize_prefix, oracle_prefix, stream_cost, uniform_source, CodeKind, CostModel, Error, Regime, RfidLink,
    SymbolSource,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn model(beta0: f64, beta1: f64) -> CostModel {
    CostModel::new(beta0, beta1, 1.0, 1.0).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn table_iv() -> Check {
    let start = Instant::now();
    let src = uniform_source(8).unwrap();
    let cm = model(1.0, 5.0);
    let (fixed, _) = optimize_fixed(8, &cm, None).map_err(|e| e.to_string())?;
    let prefix = optimize_prefix(&src, &cm, None).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let fixed_cost = average_cost_exact(&src, &fixed, &cm).unwrap();
    let prefix_cost = average_cost_exact(&src, &prefix, &cm).unwrap();
    ensure(fixed_cost == q(9, 1), format!("fixed cost {fixed_cost}"))?;
    ensure(prefix_cost == q(31, 4), format!("prefix cost {prefix_cost}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("fixed 9, prefix 7.75 in {elapsed:.2?}"))
}

fn saving_at_gamma_5() -> Check {
    let src = uniform_source(8).unwrap();
    let cm = model(1.0, 5.0);
    let cb = optimize_prefix(&src, &cm, None).unwrap();
    let eps = energy_saving(&src, &cb, &cm).unwrap();
    let expected = 1.0 - 15.5 / 18.0;
    ensure((eps - expected).abs() < 1e-12, format!("epsilon {eps}"))?;
    ensure((eps - 0.1389).abs() < 5e-5, format!("epsilon {eps} does not round to 0.1389"))?;
    Ok(format!("epsilon {eps:.6}"))
}

fn fixed_length_properties() -> Check {
    for m in [4usize, 8, 16, 128] {
        let src = uniform_source(m).unwrap();
        let log2m = m.trailing_zeros();
        let at_one = scan(&src, &model(1.0, 1.0), None).unwrap().n_opt;
        ensure(at_one == log2m, format!("M={m}: n_opt(1) = {at_one}"))?;
        let free_zero = scan(&src, &model(0.0, 1.0), None).unwrap().n_opt;
        ensure(free_zero as usize == m - 1, format!("M={m}: n_opt(inf) = {free_zero}"))?;
        let huge = scan(&src, &model(1.0, 1e8), None).unwrap().n_opt;
        ensure(huge as usize == m - 1, format!("M={m}: n_opt(1e8) = {huge}"))?;
        let mut last = 0;
        for g in parse_grid("1:1e8:log25").unwrap() {
            let n = scan(&src, &model(1.0, g), None).unwrap().n_opt;
            ensure(n >= last, format!("M={m}: n_opt drops to {n} at gamma {g}"))?;
            last = n;
        }
    }
    Ok("log2 M at gamma 1, M-1 at gamma inf and 1e8, monotone on 25 points".into())
}

fn epsilon_max() -> Check {
    let limit = epsilon_max_fixed(128);
    ensure((limit - (1.0 - 254.0 / 896.0)).abs() < 1e-15, format!("epsilon_max {limit}"))?;
    let src = uniform_source(128).unwrap();
    let cm = model(1.0, 1e6);
    let (cb, _) = optimize_fixed(128, &cm, None).unwrap();
    let eps = energy_saving(&src, &cb, &cm).unwrap();
    ensure((eps - limit).abs() < 1e-3, format!("epsilon {eps} vs limit {limit}"))?;
    Ok(format!("limit {limit:.4}, achieved {eps:.4}"))
}

fn random_source(rng: &mut ChaCha8Rng, m: usize) -> SymbolSource {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    SymbolSource::new(raw.iter().map(|x| x / total).collect()).unwrap()
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut instances = 0;
    for m in [3usize, 4, 5] {
        let sources = [uniform_source(m).unwrap(), random_source(&mut rng, m), random_source(&mut rng, m)];
        for dp in [2u32, 3, 4] {
            for g in [1.0, 2.0, 5.0, 100.0] {
                let cm = model(1.0, g);
                for src in &sources {
                    instances += 1;
                    let solved = optimize_prefix(src, &cm, Some(dp));
                    let oracle = oracle_prefix(src, &cm, dp);
                    match (solved, oracle) {
                        (Ok(a), Ok(b)) => {
                            let (ca, cb) =
                                (average_cost_exact(src, &a, &cm).unwrap(), average_cost_exact(src, &b, &cm).unwrap());
                            ensure(ca == cb, format!("M={m} dp={dp} gamma={g}: {ca} vs {cb}"))?;
                        }
                        (Err(Error::InfeasibleDepth { .. }), Err(Error::InfeasibleDepth { .. })) => {}
                        (a, b) => return Err(format!("M={m} dp={dp} gamma={g}: {a:?} vs {b:?}")),
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("{instances} instances agree in {elapsed:.2?}"))
}

fn dominance() -> Check {
    let mut strict = false;
    for m in [4usize, 8] {
        let src = uniform_source(m).unwrap();
        for g in [1.0, 2.0, 5.0, 20.0, 100.0] {
            let cm = model(1.0, g);
            let (fixed, _) = optimize_fixed(m, &cm, None).unwrap();
            let prefix = optimize_prefix(&src, &cm, None).unwrap();
            let (cf, cp) = (average_cost_exact(&src, &fixed, &cm).unwrap(), average_cost_exact(&src, &prefix, &cm).unwrap());
            ensure(cp <= cf, format!("M={m} gamma={g}: prefix {cp} > fixed {cf}"))?;
            if m == 8 && g >= 2.0 && cp < cf {
                strict = true;
            }
        }
    }
    ensure(strict, "prefix never strictly better at M=8")?;
    let spec = SweepSpec {
        var: SweepVar::Gamma,
        grid: parse_grid("1:100:log25").unwrap(),
        ms: vec![8],
        gammas: vec![],
        kinds: vec![CodeKind::Fixed, CodeKind::Prefix],
        dp: None,
    };
    let rows = sweep(&spec).unwrap();
    let (fixed, prefix): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r.kind == CodeKind::Fixed);
    let mut gap: f64 = 0.0;
    for (f, p) in fixed.iter().zip(&prefix) {
        ensure(f.gamma == p.gamma, "grid mismatch")?;
        gap = gap.max(p.epsilon - f.epsilon);
    }
    ensure(gap >= 0.10, format!("max epsilon gap {gap}"))?;
    Ok(format!("prefix <= fixed everywhere, max epsilon gap {gap:.4}"))
}

/// Average of the `m` cheapest `n`-bit words, every word costed directly.
fn brute_force_fixed(n: u32, m: usize, beta0: &BigRational, beta1: &BigRational) -> BigRational {
    let mut costs: Vec<BigRational> = (0u32..1 << n)
        .map(|v| {
            let ones = v.count_ones() as i64;
            beta0 * BigRational::from_integer((n as i64 - ones).into()) + beta1 * BigRational::from_integer(ones.into())
        })
        .collect();
    costs.sort();
    costs.into_iter().take(m).fold(BigRational::zero(), |a, c| a + c) / BigRational::from_integer((m as i64).into())
}

fn fixed_cost_brute_force() -> Check {
    let mut cases = 0;
    for g in [1.0, 2.5, 7.0, 1e3] {
        let cm = model(1.0, g);
        let (b0, b1) = (BigRational::from_float(1.0).unwrap(), BigRational::from_float(g).unwrap());
        for n in 1..=10u32 {
            for m in 2..=(1usize << n).min(32) {
                let closed = fixed_cost_exact(n, m, &cm).unwrap();
                let brute = brute_force_fixed(n, m, &b0, &b1);
                ensure(closed == brute, format!("n={n} m={m} gamma={g}: {closed} vs {brute}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases exact"))
}

fn codec_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let src = uniform_source(8).unwrap();
    let cm = model(1.0, 5.0);
    let (fixed, _) = optimize_fixed(8, &cm, None).unwrap();
    let prefix = optimize_prefix(&src, &cm, None).unwrap();
    let symbols: Vec<usize> = (0..100_000).map(|_| rng.random_range(0..8)).collect();
    let mut report = Vec::new();
    for cb in [&fixed, &prefix] {
        let bs = encode(&symbols, cb).unwrap();
        ensure(decode(&bs, cb).unwrap() == symbols, format!("{} round trip differs", cb.kind()))?;
        let empirical = stream_cost(&symbols, cb, &cm).unwrap() / symbols.len() as f64;
        let expected = average_cost(&src, cb, &cm).unwrap();
        let rel = (empirical - expected).abs() / expected;
        ensure(rel < 0.02, format!("{}: empirical {empirical} vs {expected}", cb.kind()))?;
        report.push(format!("{} {:.3}%", cb.kind(), rel * 100.0));
    }
    Ok(format!("1e5 symbols round trip; cost deviation {}", report.join(", ")))
}

fn parent_child_fixture() -> Check {
    let dense = parent_child_pairs(2).unwrap().to_dense();
    let displayed: Vec<Vec<u8>> = vec![
        vec![1, 1, 0, 0, 0, 0],
        vec![1, 0, 1, 0, 0, 0],
        vec![0, 0, 0, 1, 1, 0],
        vec![0, 0, 0, 1, 0, 1],
    ];
    ensure(dense == displayed, format!("dp=2 matrix {dense:?}"))?;
    let cm = model(1.0, 2.0);
    for dp in [3u32, 4, 5] {
        let tree = build_tree(dp, &cm).unwrap();
        let words: Vec<&Codeword> = tree.nodes().iter().map(|n| &n.codeword).collect();
        let mut brute = Vec::new();
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                if a.is_proper_prefix_of(b) {
                    brute.push((i, j));
                }
            }
        }
        let mut rows = parent_child_pairs(dp).unwrap().rows().to_vec();
        rows.sort();
        ensure(rows == brute, format!("dp={dp}: {} rows vs {} ancestor pairs", rows.len(), brute.len()))?;
    }
    Ok("dp=2 matches the displayed matrix; dp 3..5 match ancestor enumeration".into())
}

fn rfid_regimes() -> Check {
    let base = RfidLink {
        p_t: 4.0,
        g_t: 1.0,
        g_r: 1.64,
        lambda: mecode::rfid::wavelength(915e6),
        r: 1.0,
        l_p: 0.5,
        r_ant: 50.0,
        n_stages: 3,
        v_t: 0.2,
        p_tag: 1e-5,
        t0: 12.5e-6,
        t1: 12.5e-6,
        mismatch: 1.0,
    };
    let distances = parse_grid("0.1:30:log40").unwrap();
    let links: Vec<RfidLink> = distances.iter().map(|&r| base.at_distance(r)).collect();
    let first = links[0].tag_costs();
    ensure(first.regime == Regime::Surplus && first.beta0 == 0.0, "short range is not in surplus")?;
    ensure(links[0].cost_ratio().is_infinite(), "surplus gamma is finite")?;
    ensure(links.last().unwrap().tag_costs().regime == Regime::Deficit, "long range is not in deficit")?;
    let flips = links.windows(2).filter(|w| w[0].tag_costs().regime != w[1].tag_costs().regime).count();
    ensure(flips == 1, format!("{flips} regime changes"))?;

    let src = uniform_source(8).unwrap();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for link in links.iter().filter(|l| l.tag_costs().regime == Regime::Deficit) {
        let gamma = link.cost_ratio().finite().unwrap();
        let physical = link.cost_model(mecode::rfid::DEFAULT_ENERGY_SCALE).unwrap();
        let pure = model(1.0, gamma);
        let (fp, _) = optimize_fixed(8, &physical, None).unwrap();
        let (fq, _) = optimize_fixed(8, &pure, None).unwrap();
        let pp = optimize_prefix(&src, &physical, None).unwrap();
        let pq = optimize_prefix(&src, &pure, None).unwrap();
        for (a, b) in [(energy_saving(&src, &fp, &physical), energy_saving(&src, &fq, &pure)), (
            energy_saving(&src, &pp, &physical),
            energy_saving(&src, &pq, &pure),
        )] {
            let d = (a.unwrap() - b.unwrap()).abs();
            worst = worst.max(d);
        }
        checked += 1;
    }
    ensure(checked > 0, "no deficit points")?;
    ensure(worst <= 1e-12, format!("epsilon differs by {worst:e}"))?;
    Ok(format!("surplus to deficit at {:.2} m; {checked} deficit points, max epsilon difference {worst:e}", base.surplus_range()))
}

fn table_ii_length() -> Check {
    for k in 2..=4u32 {
        let m = 1usize << k;
        let src = uniform_source(m).unwrap();
        let cb = optimize_prefix(&src, &model(0.0, 1.0), None).unwrap();
        let avg: f64 = cb.entries().iter().map(|w| w.len() as f64).sum::<f64>() / m as f64;
        let formula = 0.5 * ((1u64 << k) as f64 + 1.0 - 2f64.powi(-(k as i32 - 1)));
        ensure((avg - formula).abs() < 1e-12, format!("k={k}: {avg} vs {formula}"))?;
    }
    Ok("k = 2, 3, 4 match".into())
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 table IV costs", table_iv),
        ("2 saving at gamma 5", saving_at_gamma_5),
        ("3 fixed-length n_opt", fixed_length_properties),
        ("4 epsilon_max", epsilon_max),
        ("5 prefix oracle equivalence", oracle_equivalence),
        ("6 prefix dominance", dominance),
        ("7 fixed cost brute force", fixed_cost_brute_force),
        ("8 codec round trip", codec_round_trip),
        ("9 parent-child pairs", parent_child_fixture),
        ("10 rfid regimes", rfid_regimes),
        ("11 table II average length", table_ii_length),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
