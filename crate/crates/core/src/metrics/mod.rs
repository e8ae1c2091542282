//! Figures of merit for a codebook: entropy, rates, rate reduction `η`,
//! average cost `β̄` and energy saving `ε`, plus the closed-form saving limits.

mod sweep;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

pub use sweep::{parse_grid, sweep, write_sweep_csv, SweepRow, SweepSpec, SweepVar, BASELINE_NOTE};

use crate::codebook::{Codebook, Codeword};
use crate::costmodel::{CostModel, SymbolSource};
use crate::error::{Error, Result};
use crate::exact;
use crate::fixedopt::min_length;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodebookMetrics {
    /// Source entropy in bits.
    pub l_src: f64,
    /// Average uncoded symbol duration, `(T₀+T₁)/2 · L_src`.
    pub t_src: f64,
    pub r_src: f64,
    pub r_code: f64,
    pub eta: f64,
    pub avg_length: f64,
    pub beta_code: f64,
    pub epsilon: f64,
}

/// `−Σ p log₂ p`, with `0·log 0 = 0`.
pub fn source_entropy(src: &SymbolSource) -> f64 {
    if src.is_uniform() {
        return (src.m() as f64).log2();
    }
    -src.probs().iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

fn check_sizes(src: &SymbolSource, cb: &Codebook) -> Result<()> {
    if src.m() != cb.m() {
        return Err(Error::SymbolCountMismatch { expected: src.m(), found: cb.m() });
    }
    Ok(())
}

/// Zeros and ones of `word` as transmitted, in the model's canonical
/// labelling (where bit 0 is the cheaper one).
pub(crate) fn canonical_counts(word: &Codeword, cb: &Codebook, cm: &CostModel) -> (u64, u64) {
    let (zeros, ones) = (word.n0() as u64, word.n1() as u64);
    if cb.inverted() == cm.inverted() {
        (zeros, ones)
    } else {
        (ones, zeros)
    }
}

/// Expected codeword duration `Σ p_i (N₀T₀ + N₁T₁)`.
pub fn average_duration(src: &SymbolSource, cb: &Codebook, cm: &CostModel) -> Result<f64> {
    check_sizes(src, cb)?;
    Ok(src
        .probs()
        .iter()
        .zip(cb.entries())
        .map(|(p, w)| {
            let (z, o) = canonical_counts(w, cb, cm);
            p * cm.duration_of_counts(z, o)
        })
        .sum())
}

/// Expected codeword length in bits.
pub fn average_length(src: &SymbolSource, cb: &Codebook) -> Result<f64> {
    check_sizes(src, cb)?;
    Ok(src.probs().iter().zip(cb.entries()).map(|(p, w)| p * w.len() as f64).sum())
}

/// `η = T_code / T_src`, the factor by which the symbol rate drops.
pub fn rate_reduction(src: &SymbolSource, cb: &Codebook, cm: &CostModel) -> Result<f64> {
    let t_src = 0.5 * (cm.t0() + cm.t1()) * source_entropy(src);
    Ok(average_duration(src, cb, cm)? / t_src)
}

/// `β̄ = Σ p_i f(c_i)` per symbol.
pub fn average_cost(src: &SymbolSource, cb: &Codebook, cm: &CostModel) -> Result<f64> {
    check_sizes(src, cb)?;
    Ok(src
        .probs()
        .iter()
        .zip(cb.entries())
        .map(|(p, w)| {
            let (z, o) = canonical_counts(w, cb, cm);
            p * cm.cost_of_counts(z, o)
        })
        .sum())
}

/// [`average_cost`] in exact arithmetic; uniform sources use `1/M` exactly.
pub fn average_cost_exact(src: &SymbolSource, cb: &Codebook, cm: &CostModel) -> Result<BigRational> {
    check_sizes(src, cb)?;
    let costs = cb.entries().iter().map(|w| {
        let (z, o) = canonical_counts(w, cb, cm);
        cm.exact_cost_of_counts(z, o)
    });
    if src.is_uniform() {
        let total = costs.fold(BigRational::zero(), |a, c| a + c);
        return Ok(total / exact::from_int(src.m()));
    }
    Ok(src.probs().iter().zip(costs).fold(BigRational::zero(), |a, (&p, c)| a + exact::rational(p) * c))
}

/// Cost of sending symbols uncoded.
///
/// Uniform sources: `½(β₀+β₁)·log₂M`. Otherwise each symbol is sent as its
/// natural `⌈log₂M⌉`-bit index and the expected cost is taken over the source.
pub fn uncoded_cost(src: &SymbolSource, cm: &CostModel) -> f64 {
    let m = src.m();
    if src.is_uniform() {
        return 0.5 * (cm.beta0() + cm.beta1()) * (m as f64).log2();
    }
    let n = u64::from(min_length(m));
    src.probs()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ones = u64::from((i as u64).count_ones());
            let (z, o) = if cm.inverted() { (ones, n - ones) } else { (n - ones, ones) };
            p * cm.cost_of_counts(z, o)
        })
        .sum()
}

/// `ε = 1 − β̄_code / β̄_src`.
pub fn energy_saving(src: &SymbolSource, cb: &Codebook, cm: &CostModel) -> Result<f64> {
    Ok(1.0 - average_cost(src, cb, cm)? / uncoded_cost(src, cm))
}

pub fn codebook_metrics(src: &SymbolSource, cb: &Codebook, cm: &CostModel) -> Result<CodebookMetrics> {
    let l_src = source_entropy(src);
    let t_src = 0.5 * (cm.t0() + cm.t1()) * l_src;
    let t_code = average_duration(src, cb, cm)?;
    let beta_code = average_cost(src, cb, cm)?;
    Ok(CodebookMetrics {
        l_src,
        t_src,
        r_src: 1.0 / t_src,
        r_code: 1.0 / t_code,
        eta: t_code / t_src,
        avg_length: average_length(src, cb)?,
        beta_code,
        epsilon: 1.0 - beta_code / uncoded_cost(src, cm),
    })
}

/// Largest saving of a fixed-length code as `γ → ∞`: `1 − 2(M−1)/(M log₂M)`.
pub fn epsilon_max_fixed(m: usize) -> f64 {
    let m = m as f64;
    1.0 - 2.0 * (m - 1.0) / (m * m.log2())
}

/// The prefix-code limit coincides with the fixed-length one.
pub fn epsilon_max_variable(m: usize) -> f64 {
    epsilon_max_fixed(m)
}

/// Large-`M` approximation `1 − 2/log₂M`.
pub fn epsilon_max_asymptote(m: usize) -> f64 {
    1.0 - 2.0 / (m as f64).log2()
}

/// Saving of the unary code `{1, 01, …, 0^(M−1)}` at finite `γ`:
/// `1 − [2γ(M−1) + M(M−1)] / [M(1+γ) log₂M]`.
pub fn unary_saving(m: usize, gamma: f64) -> f64 {
    let m = m as f64;
    1.0 - (2.0 * gamma * (m - 1.0) + m * (m - 1.0)) / (m * (1.0 + gamma) * m.log2())
}
