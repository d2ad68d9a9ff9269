//! Scoring of candidate shifts and the decision to commit them.
//!
//! ```text
//! value = alpha * min(1, tau / (start - now))
//!       + beta  * min(1, working / rho)
//!       + gamma * min(1, working / resting)      (1 when resting = 0)
//! ```
//!
//! Each term is clamped to `[0, 1]`, so with weights summing to one the value
//! lies in `[0, 1]` and is comparable with the threshold `delta`. A shift
//! without rest scores the full `gamma` term.

use serde::{Deserialize, Serialize};

use crate::config::ScenarioParams;
use crate::error::{Error, Result};
use crate::shift::Shift;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub tau_h: f64,
    pub delta: f64,
}

impl ValueWeights {
    pub fn from_params(p: &ScenarioParams) -> Self {
        Self { alpha: p.alpha, beta: p.beta, gamma: p.gamma, tau_h: p.tau_h, delta: p.delta }
    }
}

impl Default for ValueWeights {
    fn default() -> Self {
        Self::from_params(&ScenarioParams::default())
    }
}

pub fn shift_value(shift: &Shift, now_h: f64, w: &ValueWeights, rho_h: u32) -> Result<f64> {
    let working = f64::from(shift.working_hours());
    if working == 0.0 {
        return Err(Error::EmptyShift);
    }
    let start = f64::from(shift.start_h());
    if start <= now_h {
        return Err(Error::ShiftNotInFuture { start_h: shift.start_h(), now_h });
    }
    let resting = f64::from(shift.resting_hours());
    let urgency = (w.tau_h / (start - now_h)).min(1.0);
    let utilization = (working / f64::from(rho_h)).min(1.0);
    let continuity = if resting == 0.0 { 1.0 } else { (working / resting).min(1.0) };
    Ok(w.alpha * urgency + w.beta * utilization + w.gamma * continuity)
}

/// Inclusive: a value equal to the threshold is fixed.
pub fn should_fix(value: f64, delta: f64) -> bool {
    value >= delta
}
