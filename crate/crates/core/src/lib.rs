//! Rolling-horizon workforce scheduling for networks of parcel hubs.
//!
//! Hourly labor demand per hub is turned into worker shifts in three passes
//! (continuous shifts, dwell-time smoothing within a hub, merging across
//! nearby hubs). A rolling engine re-plans as forecasts sharpen, commits
//! shifts by value, assigns workers from a shared pool and books every
//! payment and penalty.

pub mod config;
pub mod demand;
pub mod engine;
pub mod error;
pub mod ledger;
pub mod network;
pub mod pool;
pub mod report;
pub mod shift;
pub mod shift_builder;
pub mod valuation;

pub use config::{Config, GeneratorConfig, NoiseMode, ScenarioParams};
pub use demand::{ArrivalSeries, DemandMatrix, ForecastSnapshot, Forecaster};
pub use engine::{run_scenario, Engine, Scenario, ScenarioConfig, SimReport};
pub use error::{Error, Result};
pub use ledger::CostLedger;
pub use network::{Hub, HubId, HubNetwork, MovingPair};
pub use pool::{WorkerId, WorkforcePool};
pub use shift::{Segment, SegmentKind, Shift, ShiftId};
