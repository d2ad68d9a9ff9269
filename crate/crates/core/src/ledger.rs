//! Payments and penalties, in Yuan.
//!
//! | category  | rate                                          |
//! |-----------|-----------------------------------------------|
//! | hiring    | 50 per person per day                         |
//! | hourly    | 20 per person per working hour                |
//! | waiting   | 5 per person per resting hour at a hub        |
//! | moving    | 10 up to 3000 m, 20 beyond, per relocation    |
//! | lateness  | 5 per parcel not processed within dwell time  |
//! | emergency | 20 / 15 / 10 / 5 for notice under 1 / 2 / 4 / 8 h |
//!
//! Travel time itself is not paid; the flat moving payment covers it.

use serde::{Deserialize, Serialize};

use crate::shift::Shift;

pub const HIRING_PER_DAY: u64 = 50;
pub const HOURLY_RATE: u64 = 20;
pub const WAITING_RATE: u64 = 5;
pub const MOVING_NEAR: u64 = 10;
pub const MOVING_FAR: u64 = 20;
pub const MOVING_TIER_M: f64 = 3000.0;
pub const LATENESS_PER_PARCEL: u64 = 5;
/// `(notice below, penalty)`, checked in order.
pub const EMERGENCY_TIERS: [(f64, u64); 4] = [(1.0, 20), (2.0, 15), (4.0, 10), (8.0, 5)];

/// 10 Yuan up to and including 3000 m, 20 beyond.
pub fn moving_payment(distance_m: f64) -> u64 {
    if distance_m <= MOVING_TIER_M {
        MOVING_NEAR
    } else {
        MOVING_FAR
    }
}

/// Penalty for notifying a worker `lead_time_h` before the shift starts.
/// Tier bounds are strict: exactly 2 h of notice pays the 4 h tier.
pub fn emergency_penalty(lead_time_h: f64) -> u64 {
    EMERGENCY_TIERS
        .iter()
        .find(|(below, _)| lead_time_h < *below)
        .map_or(0, |&(_, p)| p)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    pub hiring: u64,
    pub hourly: u64,
    pub waiting: u64,
    pub moving: u64,
    pub lateness: u64,
    pub emergency: u64,
}

impl CostLedger {
    pub fn total(&self) -> u64 {
        self.hiring + self.hourly + self.waiting + self.moving + self.lateness + self.emergency
    }

    /// Charges one committed shift.
    pub fn accrue_shift(&mut self, shift: &Shift, lead_time_h: f64, is_new_hire: bool) {
        if shift.working_hours() == 0 {
            return;
        }
        if is_new_hire {
            self.hiring += HIRING_PER_DAY;
        }
        self.hourly += HOURLY_RATE * u64::from(shift.working_hours());
        self.waiting += WAITING_RATE * u64::from(shift.resting_hours());
        self.moving += shift.moves().map(|(_, _, _, d)| moving_payment(d)).sum::<u64>();
        self.emergency += emergency_penalty(lead_time_h);
    }

    pub fn add_lateness(&mut self, late_parcels: u64) {
        self.lateness += LATENESS_PER_PARCEL * late_parcels;
    }

    /// `(label, unit price, amount)` in table order, total last.
    pub fn rows(&self) -> [(&'static str, &'static str, u64); 7] {
        [
            ("Hiring payment", "50/person/day", self.hiring),
            ("Hourly payment", "20/person/hour", self.hourly),
            ("Waiting payment at hubs", "5/person/hour", self.waiting),
            ("Moving payment across hubs", "10-20/person", self.moving),
            ("Lateness penalty", "5/parcel", self.lateness),
            ("Emergency hiring penalty", "5-20/person", self.emergency),
            ("Total cost", "-", self.total()),
        ]
    }
}
