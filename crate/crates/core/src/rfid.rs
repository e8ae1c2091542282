//! Backscatter RFID power budget and the bit costs it implies.
//!
//! A passive tag sends bit 1 by reflecting the carrier and bit 0 by absorbing
//! it, harvesting power while it does. The harvested DC power offsets the
//! cost of bit 0; when it covers the tag's consumption, zeros are free.

use serde::{Deserialize, Serialize};

use crate::costmodel::{CostModel, Gamma};
use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Joules per dimensionless cost unit handed to the optimizers.
pub const DEFAULT_ENERGY_SCALE: f64 = 1e-12;

/// `c / f`.
pub fn wavelength(freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / freq_hz
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfidLink {
    /// Reader transmit power (W).
    pub p_t: f64,
    pub g_t: f64,
    pub g_r: f64,
    /// Carrier wavelength (m).
    pub lambda: f64,
    /// Reader-tag distance (m).
    pub r: f64,
    /// Polarization loss in `(0, 1]`.
    pub l_p: f64,
    /// Antenna resistance (Ω).
    pub r_ant: f64,
    pub n_stages: u32,
    /// Diode threshold voltage (V).
    pub v_t: f64,
    /// Tag circuit consumption (W).
    pub p_tag: f64,
    /// Bit durations (s).
    pub t0: f64,
    pub t1: f64,
    /// Impedance mismatch loss in `(0, 1]`; 1 is a perfect match.
    #[serde(default = "unity")]
    pub mismatch: f64,
}

fn unity() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Harvest covers consumption: `β₀ = 0`.
    Surplus,
    /// Consumption exceeds harvest.
    Deficit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TagCosts {
    /// Joules per bit 0.
    pub beta0: f64,
    /// Joules per bit 1.
    pub beta1: f64,
    pub regime: Regime,
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

impl RfidLink {
    pub fn validate(&self) -> Result<()> {
        positive("p_t", self.p_t)?;
        positive("g_t", self.g_t)?;
        positive("g_r", self.g_r)?;
        positive("lambda", self.lambda)?;
        positive("r", self.r)?;
        positive("r_ant", self.r_ant)?;
        positive("p_tag", self.p_tag)?;
        positive("t0", self.t0)?;
        positive("t1", self.t1)?;
        if !(self.v_t.is_finite() && self.v_t >= 0.0) {
            return Err(Error::invalid("v_t", format!("must be non-negative, got {}", self.v_t)));
        }
        for (field, v) in [("l_p", self.l_p), ("mismatch", self.mismatch)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(field, format!("must lie in (0, 1], got {v}")));
            }
        }
        if self.n_stages == 0 {
            return Err(Error::invalid("n_stages", "need at least one stage"));
        }
        Ok(())
    }

    /// Same link at distance `r`.
    pub fn at_distance(&self, r: f64) -> Self {
        RfidLink { r, ..self.clone() }
    }

    /// Friis: `P_T (λ/4πr)² G_T G_R L_P`, times the mismatch factor.
    pub fn input_power(&self) -> f64 {
        let path = self.lambda / (4.0 * std::f64::consts::PI * self.r);
        self.p_t * path * path * self.g_t * self.g_r * self.l_p * self.mismatch
    }

    /// Open-circuit antenna voltage `2√(2 R P_in)`.
    pub fn antenna_voltage(&self) -> f64 {
        2.0 * (2.0 * self.r_ant * self.input_power()).sqrt()
    }

    /// Multiplier output `2N(V_ant − V_t)`, floored at 0. Diagnostic only.
    pub fn rectified_voltage(&self) -> f64 {
        (2.0 * f64::from(self.n_stages) * (self.antenna_voltage() - self.v_t)).max(0.0)
    }

    /// `[1 − V_t / V_ant]⁺ · P_in`.
    pub fn harvested_dc_power(&self) -> f64 {
        let p_in = self.input_power();
        let v_ant = self.antenna_voltage();
        if v_ant <= 0.0 {
            return 0.0;
        }
        (1.0 - self.v_t / v_ant).max(0.0) * p_in
    }

    pub fn tag_costs(&self) -> TagCosts {
        let p_dc = self.harvested_dc_power();
        let beta1 = self.p_tag * self.t1;
        let beta0 = (self.p_tag - p_dc).max(0.0) * self.t0;
        let regime = if self.p_tag > p_dc { Regime::Deficit } else { Regime::Surplus };
        TagCosts { beta0, beta1, regime }
    }

    /// `γ = β₁/β₀`, infinite in the surplus regime.
    pub fn cost_ratio(&self) -> Gamma {
        let c = self.tag_costs();
        if c.beta0 == 0.0 {
            Gamma::Infinite
        } else {
            Gamma::Finite(c.beta1 / c.beta0)
        }
    }

    /// Cost model in units of `scale` joules, keeping the link's bit durations.
    pub fn cost_model(&self, scale: f64) -> Result<CostModel> {
        positive("scale", scale)?;
        let c = self.tag_costs();
        CostModel::new(c.beta0 / scale, c.beta1 / scale, self.t0, self.t1)
    }

    /// Largest distance at which harvest still covers `p_tag`.
    ///
    /// With `a = V_t / (2√(2R))` the break-even input power solves
    /// `x² − a·x − P_tag = 0` in `x = √P_in`; Friis then gives the distance.
    pub fn surplus_range(&self) -> f64 {
        let a = self.v_t / (2.0 * (2.0 * self.r_ant).sqrt());
        let x = 0.5 * (a + (a * a + 4.0 * self.p_tag).sqrt());
        let p_in = x * x;
        let gain = self.p_t * self.g_t * self.g_r * self.l_p * self.mismatch;
        self.lambda / (4.0 * std::f64::consts::PI) * (gain / p_in).sqrt()
    }
}

/// Per-symbol cost of symmetric half-wave line codes: `log₂M·(β₀+β₁)/2`.
pub fn halfwave_baseline(cm: &CostModel, m: usize) -> f64 {
    (m as f64).log2() * 0.5 * (cm.beta0() + cm.beta1())
}
