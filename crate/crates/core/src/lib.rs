//! Minimum-energy source coding for binary channels whose two bit values
//! cost different amounts of energy.
//!
//! Given per-bit energies `β₀ ≤ β₁`, the crate finds codebooks that minimize
//! the expected energy per symbol instead of the expected length:
//!
//! - [`fixedopt`]: the best fixed-length code, scanning the length `n`.
//! - [`varopt`]: the best prefix code within a depth-limited code tree.
//! - [`codec`]: encoding and decoding with either kind of codebook.
//! - [`metrics`]: average cost, rate reduction, energy saving and sweeps.
//! - [`rfid`]: bit costs of a backscatter RFID tag from its link budget.
//!
//! ```
//! use mecode::{optimize_fixed, optimize_prefix, uniform_source, average_cost, CostModel};
//!
//! let cm = CostModel::new(1.0, 5.0, 1.0, 1.0).unwrap();
//! let src = uniform_source(8).unwrap();
//! let (fixed, _) = optimize_fixed(8, &cm, None).unwrap();
//! let prefix = optimize_prefix(&src, &cm, None).unwrap();
//! assert_eq!(average_cost(&src, &fixed, &cm).unwrap(), 9.0);
//! assert_eq!(average_cost(&src, &prefix, &cm).unwrap(), 7.75);
//! ```

pub mod codebook;
pub mod codec;
pub mod costmodel;
pub mod error;
mod exact;
pub mod fixedopt;
pub mod metrics;
pub mod rfid;
pub mod varopt;

pub use codebook::{is_prefix_free, CodeKind, Codebook, Codeword};
pub use codec::{decode, encode, stream_cost, BitStream, Decoder};
pub use costmodel::{codeword_cost, uniform_source, CostModel, Gamma, SymbolSource};
pub use error::{Error, Result};
pub use fixedopt::{fixed_cost, fixed_cost_exact, l_min, oracle_fixed_cost, optimize_fixed, optimize_fixed_for};
pub use metrics::{
    average_cost, average_cost_exact, codebook_metrics, energy_saving, epsilon_max_fixed, epsilon_max_variable,
    rate_reduction, source_entropy, CodebookMetrics,
};
pub use rfid::{RfidLink, Regime, TagCosts};
pub use varopt::{optimize_prefix, optimize_prefix_with, oracle_prefix, PrefixOptions, PrefixSolution};
