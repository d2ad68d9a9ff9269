//! Run parameters. Defaults are the values used for the one-day experiment.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    /// Maximum dwell time of a parcel at a hub, in hour slots.
    pub zeta_h: u32,
    /// Maximum working hours of one shift.
    pub rho_h: u32,
    /// Parcels one worker processes per hour.
    pub mu: f64,
    /// Re-planning interval in minutes. Must be a whole number of hours.
    pub epsilon_min: u32,
    /// Horizon length in hour slots.
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub tau_h: f64,
    /// Longest idle gap allowed inside a merged shift.
    pub max_gap_h: u32,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            zeta_h: 1,
            rho_h: 8,
            mu: 150.0,
            epsilon_min: 60,
            n: 24,
            alpha: 0.4,
            beta: 0.3,
            gamma: 0.3,
            delta: 0.9,
            tau_h: 4.0,
            max_gap_h: 2,
            seed: 42,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return bad("horizon n must be at least 1".into());
        }
        if self.rho_h == 0 {
            return bad("rho_h must be at least 1".into());
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if self.epsilon_min == 0 || self.epsilon_min % 60 != 0 {
            return bad(format!("epsilon_min must be a positive multiple of 60, got {}", self.epsilon_min));
        }
        for (name, w) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(w.is_finite() && w >= 0.0) {
                return bad(format!("{name} must be a non-negative number, got {w}"));
            }
        }
        if ((self.alpha + self.beta + self.gamma) - 1.0).abs() > 1e-9 {
            return bad(format!(
                "alpha + beta + gamma must equal 1, got {}",
                self.alpha + self.beta + self.gamma
            ));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return bad(format!("delta must lie in [0, 1], got {}", self.delta));
        }
        if !(self.tau_h.is_finite() && self.tau_h >= 0.0) {
            return bad(format!("tau_h must be non-negative, got {}", self.tau_h));
        }
        Ok(())
    }

    pub fn epsilon_h(&self) -> u32 {
        self.epsilon_min / 60
    }
}

/// Shape of the synthetic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub hubs: usize,
    pub gateway_hubs: usize,
    /// Parcels arriving over all hubs per day.
    pub daily_volume: i64,
    /// Side of the square service area in meters.
    pub area_m: f64,
    /// Relative volume of a gateway hub compared to an average local hub.
    pub gateway_weight: f64,
    /// Hour of the local arrival peak; gateway hubs peak `gateway_offset_h` later.
    pub local_peak_h: f64,
    pub gateway_offset_h: f64,
    /// Peak amplitude of the daily sinusoid, in (0, 1].
    pub amplitude: f64,
    /// Relative multiplicative noise on every hourly value.
    pub noise: f64,
    pub d_max_m: f64,
    pub speed_m_per_h: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            hubs: 52,
            gateway_hubs: 3,
            daily_volume: 1_173_253,
            area_m: 16_000.0,
            gateway_weight: 8.0,
            local_peak_h: 18.0,
            gateway_offset_h: 9.0,
            amplitude: 0.8,
            noise: 0.25,
            d_max_m: 5_000.0,
            speed_m_per_h: 15_000.0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.hubs == 0 {
            return bad("at least one hub is required".into());
        }
        if self.gateway_hubs > self.hubs {
            return bad("gateway_hubs exceeds hubs".into());
        }
        if self.daily_volume < 0 {
            return bad(format!("daily_volume must be non-negative, got {}", self.daily_volume));
        }
        if !(self.area_m.is_finite() && self.area_m > 0.0) {
            return bad("area_m must be positive".into());
        }
        if !(self.gateway_weight.is_finite() && self.gateway_weight > 0.0) {
            return bad("gateway_weight must be positive".into());
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 1.0) {
            return bad("amplitude must lie in (0, 1]".into());
        }
        if !(self.noise >= 0.0 && self.noise < 1.0) {
            return bad("noise must lie in [0, 1)".into());
        }
        if !(self.d_max_m.is_finite() && self.d_max_m > 0.0) {
            return bad("d_max_m must be positive".into());
        }
        if !(self.speed_m_per_h.is_finite() && self.speed_m_per_h > 0.0) {
            return bad("speed_m_per_h must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub generator: GeneratorConfig,
    pub params: ScenarioParams,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Config = serde_json::from_str(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        self.params.validate()
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..8])
    }
}

/// How forecasts deviate from the actual arrivals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Uniform relative error growing one percent per hour of lead time.
    Paper,
    /// Forecasts equal the actual arrivals.
    Perfect,
}
