//! Transmission cost model and symbol source.
//!
//! A [`CostModel`] holds the per-bit energies and durations of a binary
//! channel. Internally the cheaper bit is always labelled `0`; a model built
//! with `beta0 > beta1` is stored swapped and remembers that the channel bits
//! must be inverted on the way out.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::codebook::Codeword;
use crate::error::{Error, Result};
use crate::exact;

/// Tolerance on `Σ p = 1` for a [`SymbolSource`].
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Ratio `β₁/β₀` of a normalized model. `β₀ = 0` is carried as its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Finite(f64),
    Infinite,
}

impl Gamma {
    pub fn is_infinite(self) -> bool {
        matches!(self, Gamma::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Gamma::Finite(g) => Some(g),
            Gamma::Infinite => None,
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Finite(g) => write!(f, "{g}"),
            Gamma::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostModelRepr {
    beta0: f64,
    beta1: f64,
    t0: f64,
    t1: f64,
}

/// Per-bit energy and duration of an asymmetric binary channel.
///
/// After construction `beta0() <= beta1()`. When the caller supplied the
/// opposite orientation, [`CostModel::inverted`] is set and the bit labels
/// (costs and durations together) are swapped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostModelRepr", into = "CostModelRepr")]
pub struct CostModel {
    beta0: f64,
    beta1: f64,
    t0: f64,
    t1: f64,
    inverted: bool,
}

fn check_finite(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite, got {v}")))
    }
}

impl CostModel {
    pub fn new(beta0: f64, beta1: f64, t0: f64, t1: f64) -> Result<Self> {
        for (field, v) in [("beta0", beta0), ("beta1", beta1), ("t0", t0), ("t1", t1)] {
            check_finite(field, v)?;
        }
        if beta0 < 0.0 {
            return Err(Error::invalid("beta0", format!("must be >= 0, got {beta0}")));
        }
        if beta1 < 0.0 {
            return Err(Error::invalid("beta1", format!("must be >= 0, got {beta1}")));
        }
        if t0 <= 0.0 {
            return Err(Error::invalid("t0", format!("must be > 0, got {t0}")));
        }
        if t1 <= 0.0 {
            return Err(Error::invalid("t1", format!("must be > 0, got {t1}")));
        }
        if beta0 > beta1 {
            // beta0 > beta1 >= 0, so after the swap the expensive bit is positive.
            Ok(CostModel { beta0: beta1, beta1: beta0, t0: t1, t1: t0, inverted: true })
        } else if beta1 > 0.0 {
            Ok(CostModel { beta0, beta1, t0, t1, inverted: false })
        } else {
            Err(Error::invalid("beta1", "at least one bit must have positive cost"))
        }
    }

    /// Model with `β₀ = 1`, `β₁ = γ` and unit durations.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        CostModel::new(1.0, gamma, 1.0, 1.0)
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// `β₁ − β₀ ≥ 0`.
    pub fn delta_beta(&self) -> f64 {
        self.beta1 - self.beta0
    }

    /// True when the supplied `β₀ > β₁` was swapped; channel bits are the
    /// complement of the canonical codeword bits.
    pub fn inverted(&self) -> bool {
        self.inverted
    }

    pub fn gamma(&self) -> Gamma {
        if self.beta0 == 0.0 {
            Gamma::Infinite
        } else {
            Gamma::Finite(self.beta1 / self.beta0)
        }
    }

    /// Same model with both energies multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid("factor", format!("must be positive, got {factor}")));
        }
        Ok(CostModel { beta0: self.beta0 * factor, beta1: self.beta1 * factor, ..self.clone() })
    }

    /// Cost of a word with the given bit counts: `β₀·N₀ + β₁·N₁`.
    pub fn cost_of_counts(&self, zeros: u64, ones: u64) -> f64 {
        self.beta0 * zeros as f64 + self.beta1 * ones as f64
    }

    pub fn exact_cost_of_counts(&self, zeros: u64, ones: u64) -> BigRational {
        exact::rational(self.beta0) * exact::from_int(zeros) + exact::rational(self.beta1) * exact::from_int(ones)
    }

    /// `n·β₀ + Δβ·n₁`, the same quantity as [`CostModel::cost_of_counts`]
    /// written in terms of length and popcount.
    pub fn cost_of_length_and_weight(&self, n: u64, ones: u64) -> f64 {
        n as f64 * self.beta0 + self.delta_beta() * ones as f64
    }

    pub fn duration_of_counts(&self, zeros: u64, ones: u64) -> f64 {
        self.t0 * zeros as f64 + self.t1 * ones as f64
    }
}

impl TryFrom<CostModelRepr> for CostModel {
    type Error = Error;

    fn try_from(r: CostModelRepr) -> Result<Self> {
        CostModel::new(r.beta0, r.beta1, r.t0, r.t1)
    }
}

impl From<CostModel> for CostModelRepr {
    fn from(cm: CostModel) -> Self {
        if cm.inverted {
            CostModelRepr { beta0: cm.beta1, beta1: cm.beta0, t0: cm.t1, t1: cm.t0 }
        } else {
            CostModelRepr { beta0: cm.beta0, beta1: cm.beta1, t0: cm.t0, t1: cm.t1 }
        }
    }
}

/// Energy of one (canonical) codeword: `β₀·N₀ + β₁·N₁`.
pub fn codeword_cost(cw: &Codeword, cm: &CostModel) -> Result<f64> {
    if cw.is_empty() {
        return Err(Error::EmptyCodeword);
    }
    Ok(cm.cost_of_counts(cw.n0() as u64, cw.n1() as u64))
}

/// Duration of one (canonical) codeword: `N₀·T₀ + N₁·T₁`.
pub fn codeword_duration(cw: &Codeword, cm: &CostModel) -> Result<f64> {
    if cw.is_empty() {
        return Err(Error::EmptyCodeword);
    }
    Ok(cm.duration_of_counts(cw.n0() as u64, cw.n1() as u64))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolSourceRepr {
    probs: Vec<f64>,
}

/// `M ≥ 2` symbols with their probabilities.
///
/// Probabilities are kept in the caller's symbol order; [`SymbolSource::ascending`]
/// gives the sorted view `p₁ ≤ … ≤ p_M` together with the original indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolSourceRepr", into = "SymbolSourceRepr")]
pub struct SymbolSource {
    probs: Vec<f64>,
    ascending: Vec<usize>,
}

impl SymbolSource {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::invalid("probs", format!("need at least 2 symbols, got {}", probs.len())));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::invalid("probs", format!("probability {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::invalid("probs", format!("probabilities sum to {sum}")));
        }
        let mut ascending: Vec<usize> = (0..probs.len()).collect();
        ascending.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]).then(a.cmp(&b)));
        Ok(SymbolSource { probs, ascending })
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    /// Probabilities in original symbol order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// `(original index, p)` in ascending probability order; ties keep index order.
    pub fn ascending(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.ascending.iter().map(|&i| (i, self.probs[i]))
    }

    /// Original indices from most to least probable; equal probabilities are
    /// ordered by ascending index.
    pub fn by_descending_probability(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.m()).collect();
        order.sort_by(|&a, &b| self.probs[b].total_cmp(&self.probs[a]).then(a.cmp(&b)));
        order
    }

    /// Probabilities sorted from largest to smallest.
    pub fn descending_probs(&self) -> Vec<f64> {
        self.by_descending_probability().into_iter().map(|i| self.probs[i]).collect()
    }

    /// True when every symbol has exactly the same probability.
    pub fn is_uniform(&self) -> bool {
        self.probs.iter().all(|&p| p == self.probs[0])
    }
}

impl TryFrom<SymbolSourceRepr> for SymbolSource {
    type Error = Error;

    fn try_from(r: SymbolSourceRepr) -> Result<Self> {
        SymbolSource::new(r.probs)
    }
}

impl From<SymbolSource> for SymbolSourceRepr {
    fn from(s: SymbolSource) -> Self {
        SymbolSourceRepr { probs: s.probs }
    }
}

/// `m` equiprobable symbols.
pub fn uniform_source(m: usize) -> Result<SymbolSource> {
    if m < 2 {
        return Err(Error::invalid("m", format!("need at least 2 symbols, got {m}")));
    }
    SymbolSource::new(vec![1.0 / m as f64; m])
}
