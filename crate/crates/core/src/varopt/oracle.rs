//! Exhaustive reference solver for tiny trees.

use num_rational::BigRational;

use super::tree::{build_tree, node_count};
use super::{rank_words, ORACLE_MAX_NODES};
use crate::codebook::{CodeKind, Codebook, Codeword};
use crate::costmodel::{CostModel, SymbolSource};
use crate::error::{Error, Result};
use crate::exact;

/// Try every `M`-subset of the depth-`dp` tree, keep the prefix-free ones and
/// return the cheapest under the sorted-pairing objective. Subsets are visited
/// in lexicographic order and only strict improvements replace the incumbent.
pub fn oracle_prefix(src: &SymbolSource, cm: &CostModel, dp: u32) -> Result<Codebook> {
    if dp == 0 {
        return Err(Error::DepthOutOfRange { depth: dp, limit: super::MAX_DEPTH });
    }
    let nodes = node_count(dp.min(40));
    if nodes > ORACLE_MAX_NODES {
        return Err(Error::TooLarge { nodes, limit: ORACLE_MAX_NODES });
    }
    let tree = build_tree(dp, cm)?;
    let m = src.m();
    if m > tree.len() {
        return Err(Error::InfeasibleDepth { depth: dp, m });
    }
    let words: Vec<&Codeword> = tree.nodes().iter().map(|n| &n.codeword).collect();
    let costs: Vec<BigRational> =
        words.iter().map(|w| cm.exact_cost_of_counts(w.n0() as u64, w.n1() as u64)).collect();
    let weights = weights_descending(src);
    let conflict: Vec<Vec<bool>> = words
        .iter()
        .map(|a| words.iter().map(|b| a.is_proper_prefix_of(b) || b.is_proper_prefix_of(a)).collect())
        .collect();

    // Float scores only screen out clear losers; every candidate within a
    // margin far above rounding error is compared exactly.
    let approx_costs: Vec<f64> = words.iter().map(|w| cm.cost_of_counts(w.n0() as u64, w.n1() as u64)).collect();
    let approx_weights: Vec<f64> = weights.iter().map(exact::to_f64).collect();
    let mut best: Option<(BigRational, f64, Vec<usize>)> = None;
    let mut subset: Vec<usize> = (0..m).collect();
    let mut sorted = vec![0.0; m];
    loop {
        let prefix_free = subset.iter().enumerate().all(|(x, &i)| subset[x + 1..].iter().all(|&j| !conflict[i][j]));
        if prefix_free {
            for (slot, &i) in sorted.iter_mut().zip(&subset) {
                *slot = approx_costs[i];
            }
            sorted.sort_by(f64::total_cmp);
            let approx: f64 = approx_weights.iter().zip(&sorted).map(|(w, c)| w * c).sum();
            let contender = best.as_ref().is_none_or(|(_, b, _)| approx <= b + 1e-9 * b.abs().max(1.0));
            if contender {
                let mut c: Vec<BigRational> = subset.iter().map(|&i| costs[i].clone()).collect();
                c.sort();
                let value = exact::dot(&weights, &c);
                if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
                    best = Some((value, approx, subset.clone()));
                }
            }
        }
        if !next_combination(&mut subset, words.len()) {
            break;
        }
    }
    let (_, _, chosen) = best.ok_or(Error::InfeasibleDepth { depth: dp, m })?;
    let ranked = rank_words(chosen.iter().map(|&i| words[i].clone()).collect(), cm);
    Codebook::assign(CodeKind::Prefix, src, ranked, cm.inverted())
}

/// Probabilities largest first, with an exact `1/M` for uniform sources.
pub(crate) fn weights_descending(src: &SymbolSource) -> Vec<BigRational> {
    if src.is_uniform() {
        let w = exact::from_int(1) / exact::from_int(src.m());
        vec![w; src.m()]
    } else {
        src.descending_probs().into_iter().map(exact::rational).collect()
    }
}

/// Advance `c` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
