//! Optimal variable-length (prefix) minimum-energy codebooks.
//!
//! The code tree of depth `dp` holds `2^(dp+1) − 2` candidate codewords. An
//! optimal codebook selects `M` of them with no ancestor/descendant pair and
//! minimizes `Σ p_(i)·f(c_(i))`, costs ascending against probabilities
//! descending. [`optimize_prefix`] solves this exactly by branch and bound;
//! [`oracle_prefix`] enumerates subsets for cross-checking on tiny trees.

mod oracle;
mod search;
mod tree;

use std::cmp::Ordering;

pub use oracle::oracle_prefix;
pub use tree::{
    build_tree, parent_child_pairs, ParentChildMatrix, PrefixTree, SelectionVector, TreeNode,
    MAX_MATERIALIZED_DEPTH,
};

use crate::codebook::{CodeKind, Codebook, Codeword};
use crate::costmodel::{uniform_source, CostModel, SymbolSource};
use crate::error::{Error, Result};
use crate::fixedopt::min_length;
use crate::metrics::source_entropy;
use search::{Problem, Search};
use tree::Node;

/// Deepest tree the solver accepts.
pub const MAX_DEPTH: u32 = 30;
/// Upper end of the default depth `min(M − 1, 24)`.
pub const DEFAULT_DEPTH_CAP: u32 = 24;
/// Search nodes visited before giving up.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
/// Largest tree [`oracle_prefix`] will enumerate.
pub const ORACLE_MAX_NODES: usize = 30;

/// `min(M − 1, 24)`, raised to `⌈log₂M⌉` when that is larger.
pub fn default_depth(m: usize) -> u32 {
    let ideal = u32::try_from(m.saturating_sub(1)).unwrap_or(u32::MAX).min(DEFAULT_DEPTH_CAP);
    ideal.max(min_length(m.max(2)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixOptions {
    /// Tree depth; `None` uses [`default_depth`].
    pub depth: Option<u32>,
    /// Upper bound on the rate-reduction factor `η`.
    pub eta_max: Option<f64>,
    pub node_budget: u64,
}

impl Default for PrefixOptions {
    fn default() -> Self {
        PrefixOptions { depth: None, eta_max: None, node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSolution {
    pub codebook: Codebook,
    /// Optimal `Σ p_(i)·f(c_(i))`.
    pub cost: f64,
    pub depth: u32,
    /// Search nodes visited (0 when a closed form applied).
    pub explored: u64,
}

/// Optimal prefix codebook for `src` within depth `dp` (default
/// [`default_depth`]).
pub fn optimize_prefix(src: &SymbolSource, cm: &CostModel, dp: Option<u32>) -> Result<Codebook> {
    let opts = PrefixOptions { depth: dp, ..PrefixOptions::default() };
    optimize_prefix_with(src, cm, &opts).map(|s| s.codebook)
}

/// [`optimize_prefix`] for `m` equiprobable symbols.
pub fn optimize_prefix_uniform(m: usize, cm: &CostModel, dp: Option<u32>) -> Result<Codebook> {
    optimize_prefix(&uniform_source(m)?, cm, dp)
}

pub fn optimize_prefix_with(src: &SymbolSource, cm: &CostModel, opts: &PrefixOptions) -> Result<PrefixSolution> {
    let m = src.m();
    let depth = opts.depth.unwrap_or_else(|| default_depth(m));
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::DepthOutOfRange { depth, limit: MAX_DEPTH });
    }
    if depth < 63 && m as u128 > 1u128 << depth {
        return Err(Error::InfeasibleDepth { depth, m });
    }
    let duration_cap = match opts.eta_max {
        None => None,
        Some(eta) if eta.is_finite() && eta > 0.0 => {
            Some(eta * 0.5 * (cm.t0() + cm.t1()) * source_entropy(src))
        }
        Some(eta) => return Err(Error::invalid("eta_max", format!("must be positive and finite, got {eta}"))),
    };

    if cm.beta0() == 0.0 && duration_cap.is_none() && depth as usize >= m - 1 {
        let codebook = Codebook::assign(CodeKind::Prefix, src, unary_words(m), cm.inverted())?;
        let problem_cost = sorted_pairing_cost(src, &codebook, cm);
        return Ok(PrefixSolution { codebook, cost: problem_cost, depth, explored: 0 });
    }

    let problem = Problem::new(
        depth,
        src.descending_probs(),
        (cm.beta0(), cm.beta1(), cm.t0(), cm.t1()),
        duration_cap,
        opts.node_budget,
    );
    if problem.table.forest_min(m).is_infinite() {
        return Err(Error::InfeasibleDepth { depth, m });
    }
    let seed = problem.table.reconstruct_root(m);
    let (seed_value, seed_duration) = problem.evaluate(&seed);
    let upper = match duration_cap {
        Some(cap) if seed_duration > cap * (1.0 + search::REL_TOL) => f64::INFINITY,
        _ => seed_value,
    };

    let outcome = Search::run(&problem, upper);
    let to_codebook = |nodes: &[Node]| -> Result<Codebook> {
        let words = rank_words(nodes.iter().map(|n| n.codeword()).collect(), cm);
        Codebook::assign(CodeKind::Prefix, src, words, cm.inverted())
    };
    if outcome.exhausted {
        let incumbent = match &outcome.best {
            Some((_, nodes)) => Some(Box::new(to_codebook(nodes)?)),
            None => None,
        };
        return Err(Error::BudgetExhausted { budget: opts.node_budget, explored: outcome.explored, incumbent });
    }
    match outcome.best {
        Some((cost, nodes)) => {
            Ok(PrefixSolution { codebook: to_codebook(&nodes)?, cost, depth, explored: outcome.explored })
        }
        None => match opts.eta_max {
            Some(eta_max) => Err(Error::InfeasibleRate { eta_max }),
            None => Err(Error::InfeasibleDepth { depth, m }),
        },
    }
}

/// `{0^(M−1), 0^(M−2)1, …, 01, 1}`: optimal when `β₀ = 0`.
fn unary_words(m: usize) -> Vec<Codeword> {
    let mut words = Vec::with_capacity(m);
    words.push(Codeword::from_bits(vec![false; m - 1]));
    for k in (0..m - 1).rev() {
        let mut bits = vec![false; k];
        bits.push(true);
        words.push(Codeword::from_bits(bits));
    }
    words
}

fn sorted_pairing_cost(src: &SymbolSource, cb: &Codebook, cm: &CostModel) -> f64 {
    let mut costs: Vec<f64> = cb.entries().iter().map(|w| cm.cost_of_counts(w.n0() as u64, w.n1() as u64)).collect();
    costs.sort_by(f64::total_cmp);
    src.descending_probs().iter().zip(&costs).map(|(p, c)| p * c).sum()
}

/// Order words by exact cost, then lexicographically. Costs are compared
/// in exact arithmetic so float rounding cannot reorder equal words.
pub(crate) fn rank_words(mut words: Vec<Codeword>, cm: &CostModel) -> Vec<Codeword> {
    words.sort_by(|a, b| {
        let ca = cm.exact_cost_of_counts(a.n0() as u64, a.n1() as u64);
        let cb = cm.exact_cost_of_counts(b.n0() as u64, b.n1() as u64);
        match ca.cmp(&cb) {
            Ordering::Equal => a.cmp(b),
            other => other,
        }
    });
    words
}
