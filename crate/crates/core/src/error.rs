use thiserror::Error;

use crate::network::HubId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown hub {0}")]
    UnknownHub(HubId),

    #[error("shift has no working time")]
    EmptyShift,

    #[error("shift starts at {start_h} h, which is not after the current time {now_h} h")]
    ShiftNotInFuture { start_h: u32, now_h: f64 },

    #[error("shift starts at {start_h} h but the current time is already {now_h} h")]
    ShiftAlreadyStarted { start_h: u32, now_h: f64 },

    #[error("worker {0} is not assigned to a shift")]
    WorkerNotAssigned(u32),

    #[error("worker {worker} cannot be released at {now_h} h before its shift ends at {end_h} h")]
    EarlyRelease { worker: u32, now_h: f64, end_h: u32 },

    #[error("unknown worker {0}")]
    UnknownWorker(u32),

    #[error("demand at hub {hub} slot {origin_h} can no longer be served within the dwell window")]
    Unservable { hub: HubId, origin_h: u32 },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
