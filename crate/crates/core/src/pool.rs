//! Centralized worker pool: hiring, assignment and release.
//!
//! A released worker stays at the hub where the last shift ended and can
//! only be reassigned to a shift starting there, as long as the day's
//! working hours stay within `rho`. Otherwise a new worker is hired.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::HubId;
use crate::shift::{Shift, ShiftId};
use crate::shift_builder::WorkerSlot;

const DAY_H: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WorkerId(pub u32);

impl fmt::Display for WorkerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkerState {
    InPool,
    Assigned,
    ReleasedForDay,
}

impl WorkerState {
    pub fn label(&self) -> &'static str {
        match self {
            WorkerState::InPool => "in_pool",
            WorkerState::Assigned => "assigned",
            WorkerState::ReleasedForDay => "released_for_day",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Worker {
    pub id: WorkerId,
    pub state: WorkerState,
    pub assigned_shift: Option<ShiftId>,
    pub notified_at_h: Option<f64>,
    location: HubId,
    shift_end_h: u32,
    shift_day: u32,
    hours_by_day: BTreeMap<u32, u32>,
}

/// Outcome of [`WorkforcePool::assign`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub worker: WorkerId,
    pub lead_time_h: f64,
    /// The worker had not been paid for the shift's day yet.
    pub new_hire: bool,
}

#[derive(Debug, Clone)]
pub struct WorkforcePool {
    workers: Vec<Worker>,
    idle: VecDeque<WorkerId>,
    rho_h: u32,
}

impl WorkforcePool {
    pub fn new(rho_h: u32) -> Self {
        Self { workers: Vec::new(), idle: VecDeque::new(), rho_h }
    }

    pub fn workers(&self) -> &[Worker] {
        &self.workers
    }

    pub fn worker(&self, id: WorkerId) -> Result<&Worker> {
        self.workers.get(id.0 as usize).ok_or(Error::UnknownWorker(id.0))
    }

    pub fn hired(&self) -> usize {
        self.workers.len()
    }

    pub fn idle_len(&self) -> usize {
        self.idle.len()
    }

    pub fn count_in(&self, state: WorkerState) -> usize {
        self.workers.iter().filter(|w| w.state == state).count()
    }

    /// Hands `shift` to the longest-idle eligible worker, hiring if none is.
    pub fn assign(&mut self, shift_id: ShiftId, shift: &Shift, now_h: f64) -> Result<Assignment> {
        let start = shift.start_h();
        if f64::from(start) < now_h {
            return Err(Error::ShiftAlreadyStarted { start_h: start, now_h });
        }
        let day = start / DAY_H;
        let hours = shift.working_hours();
        let hub = shift.first_hub();

        let pick = self.idle.iter().position(|&id| {
            let w = &self.workers[id.0 as usize];
            w.location == hub
                && w.shift_end_h <= start
                && w.hours_by_day.get(&day).copied().unwrap_or(0) + hours <= self.rho_h
        });
        let (id, new_hire) = match pick {
            Some(pos) => {
                let id = self.idle.remove(pos).expect("position is in range");
                let paid = self.workers[id.0 as usize].hours_by_day.contains_key(&day);
                (id, !paid)
            }
            None => {
                let id = WorkerId(self.workers.len() as u32);
                self.workers.push(Worker {
                    id,
                    state: WorkerState::InPool,
                    assigned_shift: None,
                    notified_at_h: None,
                    location: hub,
                    shift_end_h: 0,
                    shift_day: day,
                    hours_by_day: BTreeMap::new(),
                });
                (id, true)
            }
        };

        let w = &mut self.workers[id.0 as usize];
        w.state = WorkerState::Assigned;
        w.assigned_shift = Some(shift_id);
        w.notified_at_h = Some(now_h);
        w.location = shift.last_hub();
        w.shift_end_h = shift.end_h();
        w.shift_day = day;
        *w.hours_by_day.entry(day).or_insert(0) += hours;
        Ok(Assignment { worker: id, lead_time_h: f64::from(start) - now_h, new_hire })
    }

    /// Returns a worker whose shift has ended to the pool.
    pub fn release(&mut self, id: WorkerId, now_h: f64) -> Result<()> {
        let rho = self.rho_h;
        let w = self.workers.get_mut(id.0 as usize).ok_or(Error::UnknownWorker(id.0))?;
        if w.state != WorkerState::Assigned {
            return Err(Error::WorkerNotAssigned(id.0));
        }
        if now_h < f64::from(w.shift_end_h) {
            return Err(Error::EarlyRelease { worker: id.0, now_h, end_h: w.shift_end_h });
        }
        w.assigned_shift = None;
        if w.hours_by_day.get(&w.shift_day).copied().unwrap_or(0) >= rho {
            w.state = WorkerState::ReleasedForDay;
        } else {
            w.state = WorkerState::InPool;
            self.idle.push_back(id);
        }
        Ok(())
    }

    /// Releases every assigned worker whose shift ended by `now_h`.
    pub fn release_finished(&mut self, now_h: f64) -> Vec<WorkerId> {
        let done: Vec<WorkerId> = self
            .workers
            .iter()
            .filter(|w| w.state == WorkerState::Assigned && f64::from(w.shift_end_h) <= now_h)
            .map(|w| w.id)
            .collect();
        for &id in &done {
            self.release(id, now_h).expect("finished workers are assigned");
        }
        done
    }

    /// Workers who can take more work, as seen at `now_h`: idle workers are
    /// free now, assigned ones `lag_h` after their shift ends.
    pub fn available_slots(&self, now_h: u32, lag_h: u32) -> Vec<WorkerSlot> {
        self.workers
            .iter()
            .filter_map(|w| {
                let free_at_h = match w.state {
                    WorkerState::InPool => now_h,
                    WorkerState::Assigned => w.shift_end_h + lag_h,
                    WorkerState::ReleasedForDay => return None,
                };
                let hours = w.hours_by_day.get(&w.shift_day).copied().unwrap_or(0);
                Some(WorkerSlot { hub: w.location, free_at_h, day: w.shift_day, hours })
            })
            .collect()
    }

    /// Workers who used up a day's hours become available again.
    pub fn start_new_day(&mut self) {
        for w in &mut self.workers {
            if w.state == WorkerState::ReleasedForDay {
                w.state = WorkerState::InPool;
                self.idle.push_back(w.id);
            }
        }
    }
}
