//! Rolling-horizon driver, execution replay and the three benchmark scenarios.
//!
//! A rolling run re-plans every `epsilon` hours. Each step forecasts the
//! whole horizon, removes the work already committed, rebuilds candidate
//! shifts from what is left and commits those worth fixing now. Candidates
//! starting before the next re-plan are committed regardless of value, so no
//! work due in the meantime is dropped. A non-rolling run plans once at hour
//! 0 and commits everything.
//!
//! After planning, the committed roster is replayed against the actual
//! arrivals to count late parcels.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::config::{NoiseMode, ScenarioParams};
use crate::demand::{deduct_assigned, labor_demand, ArrivalSeries, DemandMatrix, ForecastSnapshot, Forecaster};
use crate::error::{Error, Result};
use crate::ledger::{moving_payment, CostLedger, HIRING_PER_DAY};
use crate::network::{build_moving_pairs, HubId, HubNetwork, MovingPair};
use crate::pool::{WorkerId, WorkerState, WorkforcePool};
use crate::shift::{SegmentKind, Shift, ShiftId};
use crate::shift_builder::{merge_across_hubs, plan_within_hubs, sort_shifts, MergeRules};
use crate::valuation::{shift_value, should_fix, ValueWeights};

/// Width of the windows hub-to-hub moves are counted in.
pub const FLOW_WINDOW_H: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Cross-hub moves, rolling horizon.
    One,
    /// No cross-hub moves, rolling horizon.
    Two,
    /// Cross-hub moves, everything planned at the start of the day.
    Three,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::One, Scenario::Two, Scenario::Three];

    pub fn number(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
            Scenario::Three => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Scenario::ALL.into_iter().find(|s| s.number() == n)
    }

    pub fn allow_cross_hub(self) -> bool {
        self != Scenario::Two
    }

    pub fn rolling(self) -> bool {
        self != Scenario::Three
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub allow_cross_hub: bool,
    pub rolling: bool,
    pub params: ScenarioParams,
    pub noise: NoiseMode,
    /// Keep every forecast snapshot and the per-step worker states.
    pub debug: bool,
}

impl ScenarioConfig {
    pub fn for_scenario(s: Scenario, params: ScenarioParams, noise: NoiseMode) -> Self {
        Self { allow_cross_hub: s.allow_cross_hub(), rolling: s.rolling(), params, noise, debug: false }
    }
}

/// One committed shift and who works it.
#[derive(Debug, Clone, PartialEq)]
pub struct RosterEntry {
    pub id: ShiftId,
    pub worker: WorkerId,
    pub shift: Shift,
    pub notified_at_h: f64,
    pub new_hire: bool,
}

impl RosterEntry {
    pub fn lead_time_h(&self) -> f64 {
        f64::from(self.shift.start_h()) - self.notified_at_h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkerLogRow {
    pub step_h: u32,
    pub worker: WorkerId,
    pub state: WorkerState,
    pub shift: Option<ShiftId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineState {
    pub now_h: u32,
    /// Demand left uncovered after the latest step.
    pub residual_demand: DemandMatrix,
    pub fixed_roster: Vec<RosterEntry>,
    pub ledger: CostLedger,
}

/// What a single step committed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepOutcome {
    pub candidates: usize,
    pub fixed: Vec<ShiftId>,
    pub forced: usize,
}

pub struct Engine<'a> {
    cfg: ScenarioConfig,
    actuals: &'a [ArrivalSeries],
    pairs: Vec<MovingPair>,
    rules: MergeRules,
    weights: ValueWeights,
    forecaster: Forecaster,
    pool: WorkforcePool,
    state: EngineState,
    snapshots: Vec<ForecastSnapshot>,
    worker_log: Vec<WorkerLogRow>,
}

impl<'a> Engine<'a> {
    pub fn new(cfg: ScenarioConfig, net: &HubNetwork, actuals: &'a [ArrivalSeries]) -> Result<Self> {
        cfg.params.validate()?;
        let n = cfg.params.n as usize;
        if actuals.len() != net.len() {
            return Err(Error::InvalidConfig(format!(
                "{} arrival series for {} hubs",
                actuals.len(),
                net.len()
            )));
        }
        for (series, hub) in actuals.iter().zip(net.hubs()) {
            if series.hub_id != hub.id {
                return Err(Error::InvalidConfig(format!(
                    "arrival series for hub {} out of network order",
                    series.hub_id
                )));
            }
            if series.arrivals.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "hub {} has {} arrival slots, horizon is {n}",
                    series.hub_id,
                    series.arrivals.len()
                )));
            }
        }
        let pairs = if cfg.allow_cross_hub { build_moving_pairs(net) } else { Vec::new() };
        let rules = MergeRules {
            rho_h: cfg.params.rho_h,
            max_gap_h: cfg.params.max_gap_h,
            hiring_cost: HIRING_PER_DAY,
            moving_cost: moving_payment,
            reuse_lag_h: cfg.rolling.then(|| cfg.params.epsilon_h()),
        };
        let residual_demand = actuals.iter().map(|s| (s.hub_id, vec![0; n])).collect();
        Ok(Self {
            weights: ValueWeights::from_params(&cfg.params),
            forecaster: Forecaster::new(cfg.params.seed, cfg.noise),
            pool: WorkforcePool::new(cfg.params.rho_h),
            state: EngineState { now_h: 0, residual_demand, fixed_roster: Vec::new(), ledger: CostLedger::default() },
            snapshots: Vec::new(),
            worker_log: Vec::new(),
            cfg,
            actuals,
            pairs,
            rules,
        })
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn pool(&self) -> &WorkforcePool {
        &self.pool
    }

    /// Demand still to be covered at time `t_h`: actual demand for slots
    /// that already arrived but may still be served, forecast demand for
    /// the rest, minus committed work.
    pub fn open_demand(&self, snapshot: &ForecastSnapshot) -> DemandMatrix {
        let p = &self.cfg.params;
        let t = snapshot.made_at_h;
        let earliest = t.saturating_sub(p.zeta_h) as usize;
        let mut demand = snapshot.labor_demand(p.mu);
        for row in demand.values_mut() {
            let cut = earliest.min(row.len());
            row[..cut].iter_mut().for_each(|v| *v = 0);
        }
        deduct_assigned(&demand, self.state.fixed_roster.iter().map(|e| &e.shift))
    }

    /// One planning pass at time `t_h`.
    pub fn step(&mut self, t_h: u32) -> Result<StepOutcome> {
        let p = self.cfg.params.clone();
        let eps = p.epsilon_h();
        if t_h % eps != 0 || t_h >= p.n {
            return Err(Error::InvalidConfig(format!("step time {t_h} is off the re-planning grid")));
        }
        let now = f64::from(t_h);
        if t_h > 0 && t_h % 24 == 0 {
            self.pool.start_new_day();
        }
        self.pool.release_finished(now);

        let snapshot = self.forecaster.snapshot(self.actuals, t_h);
        let demand = self.open_demand(&snapshot);
        let per_hub = plan_within_hubs(&demand, t_h as usize, p.zeta_h, p.rho_h)?;
        let mut candidates = if self.cfg.allow_cross_hub {
            let workers = self.pool.available_slots(t_h, eps);
            merge_across_hubs(per_hub, &self.pairs, &self.rules, &workers)
        } else {
            per_hub.into_values().flatten().collect()
        };
        sort_shifts(&mut candidates);

        let mut out = StepOutcome { candidates: candidates.len(), ..Default::default() };
        let mut chosen = Vec::new();
        for shift in candidates {
            let start = shift.start_h();
            let fix = if !self.cfg.rolling || start <= t_h + eps {
                out.forced += usize::from(self.cfg.rolling);
                true
            } else {
                should_fix(shift_value(&shift, now, &self.weights, p.rho_h)?, p.delta)
            };
            if fix {
                chosen.push(shift);
            }
        }
        chosen.sort_by_key(|s| (s.start_h(), s.first_hub(), s.end_h()));
        for mut shift in chosen {
            shift.fixed_at_h = Some(t_h);
            let id = ShiftId(self.state.fixed_roster.len() as u32);
            let a = self.pool.assign(id, &shift, now)?;
            self.state.ledger.accrue_shift(&shift, a.lead_time_h, a.new_hire);
            self.state.fixed_roster.push(RosterEntry {
                id,
                worker: a.worker,
                shift,
                notified_at_h: now,
                new_hire: a.new_hire,
            });
            out.fixed.push(id);
        }

        self.state.residual_demand = self.open_demand(&snapshot);
        self.state.now_h = t_h + if self.cfg.rolling { eps } else { p.n };
        if self.cfg.debug {
            self.snapshots.push(snapshot);
            for w in self.pool.workers() {
                self.worker_log.push(WorkerLogRow {
                    step_h: t_h,
                    worker: w.id,
                    state: w.state,
                    shift: w.assigned_shift,
                });
            }
        }
        Ok(out)
    }

    /// Runs every step, replays execution and charges lateness.
    pub fn run(mut self) -> Result<SimReport> {
        let p = self.cfg.params.clone();
        if self.cfg.rolling {
            for t in (0..p.n).step_by(p.epsilon_h() as usize) {
                self.step(t)?;
            }
        } else {
            self.step(0)?;
        }
        let shifts: Vec<&Shift> = self.state.fixed_roster.iter().map(|e| &e.shift).collect();
        let replay = replay_execution(&shifts, self.actuals, p.zeta_h, p.mu);
        self.state.ledger.add_lateness(replay.late_parcels);
        let flows = hub_flows(&shifts);
        let merges = shifts.iter().filter(|s| s.spans_hubs()).count();
        Ok(SimReport {
            roster: self.state.fixed_roster,
            ledger: self.state.ledger,
            late_parcels: replay.late_parcels,
            series: replay.series,
            flows,
            merges,
            forecasts: self.snapshots,
            worker_log: self.worker_log,
        })
    }
}

/// Per-hub quantities over the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct HubSeries {
    pub hub_id: HubId,
    pub arrivals: Vec<u64>,
    pub working: Vec<u32>,
    pub resting: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlowCount {
    pub from: HubId,
    pub to: HubId,
    pub window_start_h: u32,
    pub moves: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub late_parcels: u64,
    pub series: Vec<HubSeries>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub roster: Vec<RosterEntry>,
    pub ledger: CostLedger,
    pub late_parcels: u64,
    pub series: Vec<HubSeries>,
    pub flows: Vec<FlowCount>,
    /// Roster shifts that span two hubs.
    pub merges: usize,
    /// Only filled in debug runs.
    pub forecasts: Vec<ForecastSnapshot>,
    pub worker_log: Vec<WorkerLogRow>,
}

pub fn run_scenario(cfg: ScenarioConfig, net: &HubNetwork, actuals: &[ArrivalSeries]) -> Result<SimReport> {
    Engine::new(cfg, net, actuals)?.run()
}

/// Processes actual arrivals with the roster's working capacity, oldest
/// parcels first. A parcel still waiting once `zeta_h` slots have passed
/// after its arrival slot is late; parcels never processed are late too.
pub fn replay_execution(roster: &[&Shift], actuals: &[ArrivalSeries], zeta_h: u32, mu: f64) -> Replay {
    let mut late_parcels = 0;
    let mut series = Vec::with_capacity(actuals.len());
    let index: BTreeMap<HubId, usize> = actuals.iter().enumerate().map(|(i, s)| (s.hub_id, i)).collect();
    let n = actuals.iter().map(|s| s.arrivals.len()).max().unwrap_or(0);
    let mut working = vec![vec![0u32; n]; actuals.len()];
    let mut resting = vec![vec![0u32; n]; actuals.len()];
    for shift in roster {
        for seg in &shift.segments {
            let Some(&h) = index.get(&seg.hub) else { continue };
            let target = match seg.kind {
                SegmentKind::Working => &mut working[h],
                SegmentKind::Resting => &mut resting[h],
                SegmentKind::Travel { .. } => continue,
            };
            for t in seg.start_h..seg.end_h.min(n as u32) {
                target[t as usize] += 1;
            }
        }
    }

    for (h, s) in actuals.iter().enumerate() {
        // (arrival slot, parcels waiting, already counted late)
        let mut queue: VecDeque<(usize, u64, bool)> = VecDeque::new();
        for t in 0..s.arrivals.len() {
            if s.arrivals[t] > 0 {
                queue.push_back((t, s.arrivals[t], false));
            }
            let mut capacity = (mu * f64::from(working[h][t])).floor() as u64;
            while capacity > 0 {
                let Some(front) = queue.front_mut() else { break };
                let take = front.1.min(capacity);
                front.1 -= take;
                capacity -= take;
                if front.1 == 0 {
                    queue.pop_front();
                }
            }
            for item in queue.iter_mut() {
                if item.2 || item.0 + zeta_h as usize > t {
                    continue;
                }
                item.2 = true;
                late_parcels += item.1;
            }
        }
        late_parcels += queue.iter().filter(|i| !i.2).map(|i| i.1).sum::<u64>();
        series.push(HubSeries {
            hub_id: s.hub_id,
            arrivals: s.arrivals.clone(),
            working: std::mem::take(&mut working[h]),
            resting: std::mem::take(&mut resting[h]),
        });
    }
    Replay { late_parcels, series }
}

/// Worker moves per ordered hub pair and flow window.
pub fn hub_flows(roster: &[&Shift]) -> Vec<FlowCount> {
    let mut counts: BTreeMap<(HubId, HubId, u32), u32> = BTreeMap::new();
    for shift in roster {
        for (from, to, start, _) in shift.moves() {
            *counts.entry((from, to, start / FLOW_WINDOW_H * FLOW_WINDOW_H)).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .map(|((from, to, window_start_h), moves)| FlowCount { from, to, window_start_h, moves })
        .collect()
}

/// Actual labor demand per hub, `ceil(arrivals / mu)` per slot.
pub fn actual_demand(actuals: &[ArrivalSeries], mu: f64) -> DemandMatrix {
    actuals
        .iter()
        .map(|s| {
            let counts: Vec<f64> = s.arrivals.iter().map(|&a| a as f64).collect();
            (s.hub_id, labor_demand(&counts, mu))
        })
        .collect()
}
