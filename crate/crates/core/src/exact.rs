//! Exact rational evaluation helpers.
//!
//! Every finite `f64` is a dyadic rational, so converting through
//! [`BigRational::from_float`] loses nothing. Costs built from those values
//! can then be compared and summed without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Exact rational value of a finite float.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn from_int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `Σ weights[j] · costs[j]` for two equally long slices.
pub fn dot(weights: &[BigRational], costs: &[BigRational]) -> BigRational {
    weights
        .iter()
        .zip(costs)
        .fold(BigRational::zero(), |acc, (w, c)| acc + w * c)
}
