//! Optimal fixed-length minimum-energy codebooks.
//!
//! For a length `n` the cheapest `M` words are the ones with the fewest ones,
//! so only the popcount profile matters. The average cost for a uniform
//! source has a closed form in binomial sums; the optimizer scans `n` over
//! `[⌈log₂M⌉, n_max]` and keeps the cheapest (smallest `n` on ties).

use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::codebook::{CodeKind, Codebook, Codeword};
use crate::costmodel::{uniform_source, CostModel, SymbolSource};
use crate::error::{Error, Result};
use crate::exact;

/// Longest word the exhaustive oracle will enumerate.
pub const ORACLE_MAX_LENGTH: u32 = 20;

/// `⌈log₂ m⌉`, the shortest length that can hold `m` distinct words.
pub fn min_length(m: usize) -> u32 {
    assert!(m >= 1);
    usize::BITS - (m - 1).leading_zeros()
}

fn check_feasible(n: u32, m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid("m", format!("need at least 2 symbols, got {m}")));
    }
    if n == 0 || n < min_length(m) {
        return Err(Error::InfeasibleLength { n, m });
    }
    Ok(())
}

/// Binomial coefficients `C(n, 0), C(n, 1), …` until their running sum
/// reaches `m` (or the row ends).
fn binomials_covering(n: u32, m: usize) -> Vec<BigUint> {
    let target = BigUint::from(m);
    let mut row = Vec::new();
    let mut c = BigUint::one();
    let mut total = BigUint::zero();
    for k in 0..=n {
        total += &c;
        row.push(c.clone());
        if total >= target {
            break;
        }
        c = c * BigUint::from(n - k) / BigUint::from(k + 1);
    }
    row
}

/// Smallest `l` with `Σ_{k=0}^{l} C(n, k) ≥ m`.
pub fn l_min(n: u32, m: usize) -> Result<u32> {
    check_feasible(n, m)?;
    Ok(binomials_covering(n, m).len() as u32 - 1)
}

/// Exact average cost of the cheapest length-`n` code for `m` equiprobable
/// symbols:
///
/// `n·β₀ + (Δβ/M)·[Σ_{i<l} i·C(n,i) + l·(M − Σ_{k<l} C(n,k))]` with `l = l_min(n)`.
pub fn fixed_cost_exact(n: u32, m: usize, cm: &CostModel) -> Result<BigRational> {
    check_feasible(n, m)?;
    let row = binomials_covering(n, m);
    let l = row.len() - 1;
    let mut below = BigUint::zero();
    let mut weighted = BigUint::zero();
    for (i, c) in row[..l].iter().enumerate() {
        below += c;
        weighted += c * BigUint::from(i);
    }
    let ones = weighted + BigUint::from(l) * (BigUint::from(m) - below);
    let beta0 = exact::rational(cm.beta0());
    let delta = exact::rational(cm.beta1()) - &beta0;
    Ok(exact::from_int(n) * beta0 + delta * exact::from_int(ones) / exact::from_int(m))
}

/// [`fixed_cost_exact`] rounded to `f64`.
pub fn fixed_cost(n: u32, m: usize, cm: &CostModel) -> Result<f64> {
    fixed_cost_exact(n, m, cm).map(|c| exact::to_f64(&c))
}

/// Popcounts of the `m` cheapest length-`n` words, ascending, as
/// `(weight, count)` runs.
pub fn weight_profile(n: u32, m: usize) -> Result<Vec<(u32, usize)>> {
    check_feasible(n, m)?;
    let mut remaining = m;
    let mut profile = Vec::new();
    for (w, c) in binomials_covering(n, m).into_iter().enumerate() {
        let take = c.to_usize().map_or(remaining, |c| c.min(remaining));
        profile.push((w as u32, take));
        remaining -= take;
    }
    debug_assert_eq!(remaining, 0);
    Ok(profile)
}

/// Exact expected cost `Σ p_(i)·f(c_(i))` of the cheapest length-`n` code
/// with cheaper words paired to more probable symbols.
///
/// Uniform sources use the closed form with an exact `1/M`.
pub fn assignment_cost_exact(src: &SymbolSource, n: u32, cm: &CostModel) -> Result<BigRational> {
    if src.is_uniform() {
        return fixed_cost_exact(n, src.m(), cm);
    }
    let probs = src.descending_probs();
    let mut p = probs.iter();
    let mut total = BigRational::zero();
    for (w, count) in weight_profile(n, src.m())? {
        let cost = cm.exact_cost_of_counts(u64::from(n - w), u64::from(w));
        let mass = p.by_ref().take(count).fold(BigRational::zero(), |acc, &q| acc + exact::rational(q));
        total += cost * mass;
    }
    Ok(total)
}

/// One row of the length scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub n: u32,
    pub l_min: u32,
    pub cost: f64,
}

/// Average cost for every length in `[n_min, n_max]` and the winning length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedScan {
    pub n_min: u32,
    pub n_max: u32,
    pub points: Vec<ScanPoint>,
    pub n_opt: u32,
}

impl FixedScan {
    pub fn optimal_cost(&self) -> f64 {
        self.points[(self.n_opt - self.n_min) as usize].cost
    }

    /// `n,lmin,cost` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "lmin", "cost"])?;
        for p in &self.points {
            w.write_record([p.n.to_string(), p.l_min.to_string(), p.cost.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Default search ceiling `M − 1`, never below `⌈log₂M⌉`.
pub fn default_n_max(m: usize) -> u32 {
    let cap = u32::try_from(m - 1).unwrap_or(u32::MAX);
    cap.max(min_length(m))
}

/// Scan code lengths for `src` without materializing a codebook.
pub fn scan(src: &SymbolSource, cm: &CostModel, n_max: Option<u32>) -> Result<FixedScan> {
    let m = src.m();
    let n_min = min_length(m);
    let n_max = n_max.unwrap_or_else(|| default_n_max(m));
    if n_max < n_min {
        return Err(Error::invalid("n_max", format!("{n_max} is below the minimum length {n_min} for {m} symbols")));
    }
    let evaluate = |n: u32| -> Result<(BigRational, ScanPoint)> {
        let cost = assignment_cost_exact(src, n, cm)?;
        let point = ScanPoint { n, l_min: l_min(n, m)?, cost: exact::to_f64(&cost) };
        Ok((cost, point))
    };
    #[cfg(feature = "parallel")]
    let evaluated: Vec<_> = {
        use rayon::prelude::*;
        (n_min..=n_max).into_par_iter().map(evaluate).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let evaluated: Vec<_> = (n_min..=n_max).map(evaluate).collect::<Result<_>>()?;

    let mut best = 0;
    for (i, (cost, _)) in evaluated.iter().enumerate() {
        // strict: ties keep the shorter length
        if *cost < evaluated[best].0 {
            best = i;
        }
    }
    let n_opt = evaluated[best].1.n;
    Ok(FixedScan { n_min, n_max, points: evaluated.into_iter().map(|(_, p)| p).collect(), n_opt })
}

/// Iterates `n`-bit words in increasing popcount, ascending numeric value
/// within a popcount.
struct CheapestWords {
    n: usize,
    /// Bit positions (from the least significant end) of the current word's ones.
    ones: Vec<usize>,
    started: bool,
}

impl CheapestWords {
    fn new(n: usize) -> Self {
        CheapestWords { n, ones: Vec::new(), started: false }
    }

    fn word(&self) -> Codeword {
        let mut bits = vec![false; self.n];
        for &p in &self.ones {
            bits[self.n - 1 - p] = true;
        }
        Codeword::from_bits(bits)
    }

    /// Next position set in colexicographic order, which is ascending
    /// numeric order for a fixed popcount.
    fn advance(&mut self) -> bool {
        let k = self.ones.len();
        for j in 0..k {
            let limit = if j + 1 < k { self.ones[j + 1] } else { self.n };
            if self.ones[j] + 1 < limit {
                self.ones[j] += 1;
                for (i, p) in self.ones[..j].iter_mut().enumerate() {
                    *p = i;
                }
                return true;
            }
        }
        if k < self.n {
            self.ones = (0..=k).collect();
            true
        } else {
            false
        }
    }
}

impl Iterator for CheapestWords {
    type Item = Codeword;

    fn next(&mut self) -> Option<Codeword> {
        if !self.started {
            self.started = true;
            return Some(self.word());
        }
        self.advance().then(|| self.word())
    }
}

/// The `m` cheapest words of length `n`, cheapest first.
pub fn cheapest_words(n: u32, m: usize) -> Result<Vec<Codeword>> {
    check_feasible(n, m)?;
    Ok(CheapestWords::new(n as usize).take(m).collect())
}

/// Fixed-length codebook of length `n` for `src`; cheaper words go to more
/// probable symbols.
pub fn fixed_codebook(src: &SymbolSource, n: u32, cm: &CostModel) -> Result<Codebook> {
    Codebook::assign(CodeKind::Fixed, src, cheapest_words(n, src.m())?, cm.inverted())
}

/// Optimal fixed-length codebook for `m` equiprobable symbols.
pub fn optimize_fixed(m: usize, cm: &CostModel, n_max: Option<u32>) -> Result<(Codebook, FixedScan)> {
    optimize_fixed_for(&uniform_source(m)?, cm, n_max)
}

/// Optimal fixed-length codebook for an arbitrary source.
pub fn optimize_fixed_for(src: &SymbolSource, cm: &CostModel, n_max: Option<u32>) -> Result<(Codebook, FixedScan)> {
    let scan = scan(src, cm, n_max)?;
    let codebook = fixed_codebook(src, scan.n_opt, cm)?;
    Ok((codebook, scan))
}

/// Exhaustive check of the closed form: enumerate all `2ⁿ` words, sort by
/// exact cost, average the `m` cheapest.
pub fn oracle_fixed_cost(n: u32, m: usize, cm: &CostModel) -> Result<BigRational> {
    check_feasible(n, m)?;
    if n > ORACLE_MAX_LENGTH {
        return Err(Error::TooLarge { nodes: 1 << n.min(62), limit: 1 << ORACLE_MAX_LENGTH });
    }
    let mut costs: Vec<BigRational> = (0u64..1 << n)
        .map(|v| {
            let ones = u64::from(v.count_ones());
            cm.exact_cost_of_counts(u64::from(n) - ones, ones)
        })
        .collect();
    costs.sort();
    let total = costs.into_iter().take(m).fold(BigRational::zero(), |a, c| a + c);
    Ok(total / exact::from_int(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::uniform_source;

    fn table_iv_model() -> CostModel {
        CostModel::new(1.0, 5.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn min_lengths() {
        assert_eq!(min_length(2), 1);
        assert_eq!(min_length(3), 2);
        assert_eq!(min_length(8), 3);
        assert_eq!(min_length(9), 4);
        assert_eq!(min_length(128), 7);
    }

    #[test]
    fn l_min_examples() {
        assert_eq!(l_min(7, 8).unwrap(), 1);
        assert_eq!(l_min(3, 8).unwrap(), 3);
        assert_eq!(l_min(4, 8).unwrap(), 2);
        assert!(matches!(l_min(2, 8), Err(Error::InfeasibleLength { n: 2, m: 8 })));
    }

    #[test]
    fn l_min_brackets_m() {
        for n in 1..=12u32 {
            for m in 2..=(1usize << n).min(300) {
                let l = l_min(n, m).unwrap() as usize;
                let cum = |l: usize| (0..=l).map(|k| binom(n as usize, k)).sum::<usize>();
                assert!(cum(l) >= m);
                if l > 0 {
                    assert!(cum(l - 1) < m);
                }
            }
        }
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn fixed_cost_examples() {
        let cm = table_iv_model();
        assert_eq!(fixed_cost(3, 8, &cm).unwrap(), 9.0);
        // One all-zero word and seven weight-one words: 7 + 4·7/8.
        assert_eq!(fixed_cost(7, 8, &cm).unwrap(), 10.5);
        assert_eq!(fixed_cost(7, 8, &CostModel::new(1.0, 2.0, 1.0, 1.0).unwrap()).unwrap(), 7.875);
        assert_eq!(fixed_cost_exact(7, 8, &cm).unwrap(), oracle_fixed_cost(7, 8, &cm).unwrap());
        let sym = CostModel::new(2.5, 2.5, 1.0, 1.0).unwrap();
        for m in [2usize, 3, 5, 8, 100] {
            let n = min_length(m);
            assert_eq!(fixed_cost(n, m, &sym).unwrap(), 2.5 * n as f64);
        }
        assert!(fixed_cost(2, 8, &cm).is_err());
    }

    #[test]
    fn weight_profiles() {
        assert_eq!(weight_profile(7, 8).unwrap(), vec![(0, 1), (1, 7)]);
        assert_eq!(weight_profile(4, 8).unwrap(), vec![(0, 1), (1, 4), (2, 3)]);
        assert_eq!(weight_profile(3, 8).unwrap(), vec![(0, 1), (1, 3), (2, 3), (3, 1)]);
    }

    #[test]
    fn cheapest_words_order() {
        let w: Vec<String> = cheapest_words(3, 8).unwrap().iter().map(|c| c.to_string()).collect();
        assert_eq!(w, ["000", "001", "010", "100", "011", "101", "110", "111"]);
        let w: Vec<String> = cheapest_words(7, 8).unwrap().iter().map(|c| c.to_string()).collect();
        assert_eq!(w, ["0000000", "0000001", "0000010", "0000100", "0001000", "0010000", "0100000", "1000000"]);
        let long = cheapest_words(127, 128).unwrap();
        assert_eq!(long.len(), 128);
        assert!(long.iter().all(|c| c.len() == 127 && c.n1() <= 1));
    }

    #[test]
    fn table_iv_fixed_optimum() {
        let (cb, scan) = optimize_fixed(8, &table_iv_model(), Some(7)).unwrap();
        assert_eq!(scan.n_opt, 3);
        assert_eq!(scan.optimal_cost(), 9.0);
        assert_eq!(cb.n(), Some(3));
        assert_eq!(scan.points.len(), 5);
    }

    #[test]
    fn symmetric_channel_uses_minimum_length() {
        let cm = CostModel::new(1.0, 1.0, 1.0, 1.0).unwrap();
        for m in [2usize, 3, 4, 7, 8, 16, 100, 128] {
            let (_, scan) = optimize_fixed(m, &cm, None).unwrap();
            assert_eq!(scan.n_opt, min_length(m), "m = {m}");
        }
    }

    #[test]
    fn free_zero_bit_uses_m_minus_one() {
        let cm = CostModel::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let (cb, scan) = optimize_fixed(8, &cm, None).unwrap();
        assert_eq!(scan.n_opt, 7);
        let mut words: Vec<String> = cb.entries().iter().map(|c| c.to_string()).collect();
        words.sort();
        assert_eq!(words, ["0000000", "0000001", "0000010", "0000100", "0001000", "0010000", "0100000", "1000000"]);
        let costs: Vec<f64> = cb.entries().iter().map(|c| crate::codeword_cost(c, &cm).unwrap()).collect();
        assert_eq!(costs.iter().filter(|&&c| c == 1.0).count(), 7);
        assert_eq!(costs.iter().filter(|&&c| c == 0.0).count(), 1);
    }

    #[test]
    fn n_opt_monotone_and_bounded() {
        for m in [8usize, 16, 128] {
            let mut last = 0;
            for g in [1.0, 2.0, 5.0, 10.0, 100.0, 1e4] {
                let cm = CostModel::from_gamma(g).unwrap();
                let n = optimize_fixed(m, &cm, None).unwrap().1.n_opt;
                assert!(n >= last, "m={m} gamma={g}");
                assert!(n >= min_length(m) && (n as usize) < m);
                last = n;
            }
        }
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for g in [1.0, 2.5, 7.0, 1e3] {
            let cm = CostModel::from_gamma(g).unwrap();
            for n in 1..=8u32 {
                for m in 2..=(1usize << n).min(32) {
                    assert_eq!(fixed_cost_exact(n, m, &cm).unwrap(), oracle_fixed_cost(n, m, &cm).unwrap());
                }
            }
        }
    }

    #[test]
    fn non_uniform_pairs_cheap_words_with_likely_symbols() {
        let src = SymbolSource::new(vec![0.1, 0.6, 0.2, 0.1]).unwrap();
        let cm = CostModel::new(1.0, 4.0, 1.0, 1.0).unwrap();
        let cb = fixed_codebook(&src, 3, &cm).unwrap();
        assert_eq!(cb.entry(1).unwrap().n1(), 0);
        let cost = exact::to_f64(&assignment_cost_exact(&src, 3, &cm).unwrap());
        let direct: f64 = (0..4).map(|i| src.prob(i) * crate::codeword_cost(cb.entry(i).unwrap(), &cm).unwrap()).sum();
        assert!((cost - direct).abs() < 1e-12);
    }

    #[test]
    fn uniform_assignment_equals_closed_form() {
        let src = uniform_source(12).unwrap();
        let cm = CostModel::from_gamma(3.0).unwrap();
        for n in 4..=11 {
            assert_eq!(assignment_cost_exact(&src, n, &cm).unwrap(), fixed_cost_exact(n, 12, &cm).unwrap());
        }
    }

    #[test]
    fn scan_csv() {
        let (_, scan) = optimize_fixed(8, &table_iv_model(), Some(5)).unwrap();
        let mut out = Vec::new();
        scan.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next(), Some("n,lmin,cost"));
        assert_eq!(text.lines().nth(1), Some("3,3,9"));
        assert!(optimize_fixed(8, &table_iv_model(), Some(2)).is_err());
    }
}
