//! Candidate shift construction from per-hub labor demand.
//!
//! Three passes run in order:
//!
//! 1. [`init_max_shifts`] scans the demand row left to right and cuts the
//!    longest continuous shifts it can, up to `rho` hours each.
//! 2. [`combine_within_hub`] keeps the full-length shifts from pass 1 and
//!    rebuilds the rest after smoothing the residual demand: a unit of work
//!    may be done up to `zeta` slots after its parcels arrived, which lets
//!    peaks spill into the following valleys and short shifts join up.
//! 3. [`merge_across_hubs`] walks hub pairs nearest first and joins a shift
//!    ending at one hub with a shift starting shortly after at the other,
//!    inserting a travel segment and, if time is left, a rest.
//!
//! Every pass conserves working hours per hub.

use std::collections::{BTreeMap, VecDeque};

use crate::demand::DemandMatrix;
use crate::error::{Error, Result};
use crate::network::{HubId, MovingPair};
use crate::shift::{Segment, Shift};

/// Cuts `x` into maximal continuous runs of at most `rho` slots, consuming
/// one unit per covered slot. Returns half-open `(start, end)` slot ranges and
/// leaves `x` all zero.
fn extract_blocks(x: &mut [u32], rho: u32) -> Vec<(u32, u32)> {
    let n = x.len();
    let rho = rho as usize;
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < n {
        if x[start] == 0 {
            start += 1;
            continue;
        }
        x[start] -= 1;
        let mut end = start + 1;
        while end < n && x[end] > 0 && end - start < rho {
            x[end] -= 1;
            end += 1;
        }
        blocks.push((start as u32, end as u32));
    }
    blocks
}

/// Maximum-length continuous shifts covering `x` at `hub`.
pub fn init_max_shifts(hub: HubId, x: &[u32], rho_h: u32) -> Vec<Shift> {
    let mut work = x.to_vec();
    extract_blocks(&mut work, rho_h)
        .into_iter()
        .map(|(s, e)| Shift::continuous(hub, s, (s..e).collect()))
        .collect()
}

/// Per-slot worker counts covering `x` within the dwell window.
///
/// Chooses `w` with `sum(w[..=s]) >= sum(x[..=s - zeta])` (nothing waits
/// longer than `zeta`), `sum(w[..=s]) <= sum(x[..=s])` (nobody idles) and
/// `w[s] = 0` before `open_from`, minimizing first the number of shift
/// starts `sum(max(0, w[s] - w[s-1]))` and then the parcel-hours spent
/// waiting. Returns `None` if some unit can no longer be served in time.
pub fn smooth_profile(x: &[u32], open_from: usize, zeta: u32) -> Option<Vec<u32>> {
    let n = x.len();
    let zeta = zeta as usize;
    let mut prefix = Vec::with_capacity(n);
    let mut acc = 0u64;
    for &v in x {
        acc += u64::from(v);
        prefix.push(acc);
    }
    let total = acc;
    let cum = |k: isize| -> u64 { if k < 0 { 0 } else { prefix[k as usize] } };
    let mut w = vec![0u32; n];
    if total == 0 {
        return Some(w);
    }
    if open_from >= n || cum(open_from as isize - 1 - zeta as isize) > 0 {
        return None;
    }

    let big = (total * n as u64 + 1) as i64;
    // One layer per slot; row r holds states with cumulative service
    // W = lo + r, and column c the slot's own count w = wmin + c.
    struct Row {
        wmin: u64,
        cost: Vec<i64>,
        prev_w: Vec<u64>,
    }
    struct Layer {
        lo: u64,
        rows: Vec<Row>,
    }
    let mut layers: Vec<Layer> = Vec::with_capacity(n - open_from);
    let mut prev = Layer { lo: 0, rows: vec![Row { wmin: 0, cost: vec![0], prev_w: vec![0] }] };

    for s in open_from..n {
        let lo = cum(s as isize - zeta as isize);
        let hi = prefix[s];
        let prev_lo = prev.lo;
        let prev_hi = prev.lo + prev.rows.len() as u64 - 1;

        // suffix minima of C[k] and prefix minima of C[k] - big*k per row
        let helpers: Vec<(Vec<(i64, u64)>, Vec<(i64, u64)>)> = prev
            .rows
            .iter()
            .map(|row| {
                let m = row.cost.len();
                let mut suf = vec![(i64::MAX, 0u64); m];
                let mut best = (i64::MAX, 0u64);
                for c in (0..m).rev() {
                    let k = row.wmin + c as u64;
                    if row.cost[c] <= best.0 {
                        best = (row.cost[c], k);
                    }
                    suf[c] = best;
                }
                let mut pre = vec![(i64::MAX, 0u64); m];
                let mut best = (i64::MAX, 0u64);
                for c in 0..m {
                    let k = row.wmin + c as u64;
                    if row.cost[c] != i64::MAX {
                        let v = row.cost[c] - big * k as i64;
                        if v < best.0 {
                            best = (v, k);
                        }
                    }
                    pre[c] = best;
                }
                (suf, pre)
            })
            .collect();

        let mut rows = Vec::with_capacity((hi - lo + 1) as usize);
        for cum_w in lo..=hi {
            let wmin = cum_w.saturating_sub(prev_hi);
            let wmax = cum_w.saturating_sub(prev_lo);
            let mut cost = Vec::new();
            let mut prev_w = Vec::new();
            if cum_w >= prev_lo {
                for ws in wmin..=wmax {
                    let r = (cum_w - ws - prev_lo) as usize;
                    let row = &prev.rows[r];
                    let (suf, pre) = &helpers[r];
                    let m = row.cost.len() as u64;
                    let mut best = (i64::MAX, 0u64);
                    // w' >= ws: no new starts
                    if ws >= row.wmin && ws < row.wmin + m {
                        best = suf[(ws - row.wmin) as usize];
                    } else if ws < row.wmin {
                        best = suf[0];
                    }
                    // w' < ws: ws - w' new starts
                    if ws > row.wmin {
                        let c = ((ws - 1 - row.wmin).min(m - 1)) as usize;
                        let (v, k) = pre[c];
                        if v != i64::MAX {
                            let cand = v + big * ws as i64;
                            if cand < best.0 {
                                best = (cand, k);
                            }
                        }
                    }
                    if best.0 == i64::MAX {
                        cost.push(i64::MAX);
                        prev_w.push(0);
                    } else {
                        cost.push(best.0 + (hi - cum_w) as i64);
                        prev_w.push(best.1);
                    }
                }
            }
            rows.push(Row { wmin, cost, prev_w });
        }
        layers.push(std::mem::replace(&mut prev, Layer { lo, rows }));
    }
    layers.push(prev);
    // layers[0] is the empty start state, layers[k] belongs to slot open_from + k - 1

    let last = layers.last().expect("at least one slot");
    let r = (total - last.lo) as usize;
    let row = &last.rows[r];
    let (mut c_best, mut v_best) = (None, i64::MAX);
    for (c, &v) in row.cost.iter().enumerate() {
        if v < v_best {
            v_best = v;
            c_best = Some(c);
        }
    }
    let mut c = c_best?;
    let mut cum_w = total;
    for k in (1..layers.len()).rev() {
        let layer = &layers[k];
        let row = &layer.rows[(cum_w - layer.lo) as usize];
        let ws = row.wmin + c as u64;
        w[open_from + k - 1] = ws as u32;
        let prev_ws = row.prev_w[c];
        cum_w -= ws;
        if k > 1 {
            let pl = &layers[k - 1];
            let prow = &pl.rows[(cum_w - pl.lo) as usize];
            c = (prev_ws - prow.wmin) as usize;
        }
    }
    Some(w)
}

/// Shifts covering one hub's demand row, smoothed within the dwell window.
pub fn combine_within_hub(hub: HubId, x: &[u32], zeta_h: u32, rho_h: u32) -> Result<Vec<Shift>> {
    combine_within_hub_from(hub, x, 0, zeta_h, rho_h)
}

/// As [`combine_within_hub`], with no work scheduled before slot `open_from`.
/// Entries of `x` before `open_from` are still-unserved arrivals from
/// earlier slots; they are served as soon as the dwell window requires.
pub fn combine_within_hub_from(
    hub: HubId,
    x: &[u32],
    open_from: usize,
    zeta_h: u32,
    rho_h: u32,
) -> Result<Vec<Shift>> {
    let n = x.len();
    let open_from = open_from.min(n);

    // full-length shifts first, on the demand that is still ahead
    let mut ahead = x.to_vec();
    ahead[..open_from].iter_mut().for_each(|v| *v = 0);
    let mut residual = x.to_vec();
    let mut combined = Vec::new();
    for (s, e) in extract_blocks(&mut ahead, rho_h) {
        if e - s == rho_h {
            for t in s..e {
                residual[t as usize] -= 1;
            }
            combined.push(Shift::continuous(hub, s, (s..e).collect()));
        }
    }

    let Some(profile) = smooth_profile(&residual, open_from, zeta_h) else {
        let origin = residual.iter().position(|&v| v > 0).unwrap_or(0) as u32;
        return Err(Error::Unservable { hub, origin_h: origin });
    };

    // hand out units oldest first; each slot serves what the profile allows
    let mut queue: VecDeque<(u32, u32)> = VecDeque::new();
    let mut served_at: Vec<VecDeque<u32>> = vec![VecDeque::new(); n];
    for s in 0..n {
        if residual[s] > 0 {
            queue.push_back((s as u32, residual[s]));
        }
        for _ in 0..profile[s] {
            let front = queue.front_mut().expect("profile never exceeds arrivals");
            served_at[s].push_back(front.0);
            debug_assert!(front.0 as usize + zeta_h as usize >= s);
            front.1 -= 1;
            if front.1 == 0 {
                queue.pop_front();
            }
        }
    }
    debug_assert!(queue.is_empty());

    let mut profile = profile;
    for (s, e) in extract_blocks(&mut profile, rho_h) {
        let served = (s..e)
            .map(|t| served_at[t as usize].pop_front().expect("one unit per working slot"))
            .collect();
        combined.push(Shift::continuous(hub, s, served));
    }
    Ok(combined)
}

/// Limits and prices consulted by the cross-hub merge.
#[derive(Debug, Clone, Copy)]
pub struct MergeRules {
    pub rho_h: u32,
    pub max_gap_h: u32,
    pub hiring_cost: u64,
    pub moving_cost: fn(f64) -> u64,
    /// Hours between a shift's end and the start of a follow-up shift the
    /// pool can give the same worker. `None` means no worker takes a second
    /// shift, so every candidate needs its own worker.
    pub reuse_lag_h: Option<u32>,
}

/// Whole slots a move of `travel_time_h` occupies in the roster.
pub fn travel_slots(travel_time_h: f64) -> u32 {
    (travel_time_h - 1e-9).ceil().max(1.0) as u32
}

/// A worker already on the books who can take more work at `hub` from
/// `free_at_h`, having worked `hours` on `day`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkerSlot {
    pub hub: HubId,
    pub free_at_h: u32,
    pub day: u32,
    pub hours: u32,
}

const DAY_H: u32 = 24;

#[derive(Debug, Clone)]
struct Chain {
    hours: u32,
    /// Starts with a worker who has to be hired.
    fresh: bool,
    first: Option<(HubId, usize)>,
    last: Option<(HubId, usize)>,
}

/// The worker-days the pool is expected to form from the candidates: which
/// candidates one worker works in sequence at a hub.
#[derive(Debug, Clone)]
struct ChainPlan {
    of: BTreeMap<(HubId, usize), usize>,
    chains: Vec<Chain>,
}

impl ChainPlan {
    /// Mirrors the pool: candidates in start order take the longest-idle
    /// worker at their hub who is free in time and has hours left that day,
    /// otherwise a new hire.
    fn build(per_hub: &BTreeMap<HubId, Vec<Shift>>, workers: &[WorkerSlot], rules: &MergeRules) -> Self {
        let mut plan = ChainPlan { of: BTreeMap::new(), chains: Vec::new() };
        for (&hub, shifts) in per_hub {
            // (free_at, day, hours, chain) of workers at this hub
            let mut avail: Vec<(u32, u32, u32, usize)> = Vec::new();
            if rules.reuse_lag_h.is_some() {
                for w in workers.iter().filter(|w| w.hub == hub) {
                    plan.chains.push(Chain { hours: w.hours, fresh: false, first: None, last: None });
                    avail.push((w.free_at_h, w.day, w.hours, plan.chains.len() - 1));
                }
            }
            let mut order: Vec<usize> = (0..shifts.len()).collect();
            order.sort_by_key(|&i| (shifts[i].start_h(), shifts[i].end_h(), i));
            for i in order {
                let s = &shifts[i];
                let (start, work, day) = (s.start_h(), s.working_hours(), s.start_h() / DAY_H);
                let pick = rules.reuse_lag_h.and_then(|_| {
                    avail
                        .iter()
                        .enumerate()
                        .filter(|(_, &(free, d, h, _))| {
                            free <= start && (if d == day { h } else { 0 }) + work <= rules.rho_h
                        })
                        .min_by_key(|(k, &(free, ..))| (free, *k))
                        .map(|(k, _)| k)
                });
                let chain = match pick {
                    Some(k) => {
                        let (_, d, h, c) = avail.swap_remove(k);
                        let base = if d == day { h } else { 0 };
                        let ch = &mut plan.chains[c];
                        ch.hours = base + work;
                        ch.first.get_or_insert((hub, i));
                        c
                    }
                    None => {
                        plan.chains.push(Chain { hours: work, fresh: true, first: Some((hub, i)), last: None });
                        plan.chains.len() - 1
                    }
                };
                plan.chains[chain].last = Some((hub, i));
                plan.of.insert((hub, i), chain);
                if let Some(lag) = rules.reuse_lag_h {
                    avail.push((s.end_h() + lag, day, plan.chains[chain].hours, chain));
                }
            }
        }
        plan
    }

    fn ends_chain(&self, key: (HubId, usize)) -> bool {
        self.chains[self.of[&key]].last == Some(key)
    }

    fn starts_fresh_chain(&self, key: (HubId, usize)) -> bool {
        let c = &self.chains[self.of[&key]];
        c.fresh && c.first == Some(key)
    }

    fn hours(&self, key: (HubId, usize)) -> u32 {
        self.chains[self.of[&key]].hours
    }

    /// Appends the chain starting at `b` to the chain ending at `a`.
    fn join(&mut self, a: (HubId, usize), b: (HubId, usize)) {
        let (ca, cb) = (self.of[&a], self.of[&b]);
        let tail = self.chains[cb].clone();
        self.chains[ca].hours += tail.hours;
        self.chains[ca].last = tail.last;
        for c in self.of.values_mut() {
            if *c == cb {
                *c = ca;
            }
        }
    }
}

/// Greedy merge of single-hub shifts across nearby hubs.
///
/// Pairs are visited in the given order (nearest first). Within a pair the
/// shifts are scanned by start time; a shift that ends a worker-day is
/// joined with the earliest starting shift at the other hub that would
/// otherwise open a new hire's day, begins after travel time and no later
/// than `max_gap_h` after it ends. Both worker-days together must stay
/// within `rho_h` working hours and the move must be cheaper than a hire,
/// so every merge saves one hire. A shift takes part in at most one merge.
///
/// `workers` are the workers already hired; with `reuse_lag_h` unset they
/// are ignored and each candidate is its own worker-day.
pub fn merge_across_hubs(
    per_hub: BTreeMap<HubId, Vec<Shift>>,
    pairs: &[MovingPair],
    rules: &MergeRules,
    workers: &[WorkerSlot],
) -> Vec<Shift> {
    let mut chains = ChainPlan::build(&per_hub, workers, rules);
    let mut slots: BTreeMap<HubId, Vec<Option<Shift>>> =
        per_hub.into_iter().map(|(h, v)| (h, v.into_iter().map(Some).collect())).collect();
    let mut merged = Vec::new();

    for pair in pairs {
        if (rules.moving_cost)(pair.distance_m) >= rules.hiring_cost {
            continue;
        }
        let travel = travel_slots(pair.travel_time_h);
        if travel > rules.max_gap_h {
            continue;
        }
        let mergeable = |hub: HubId, slots: &BTreeMap<HubId, Vec<Option<Shift>>>| -> Vec<(u32, u32, HubId, usize)> {
            slots
                .get(&hub)
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter_map(|(i, s)| s.as_ref().map(|s| (i, s)))
                        .filter(|(_, s)| !s.spans_hubs() && s.working_hours() < rules.rho_h)
                        .map(|(i, s)| (s.start_h(), s.end_h(), hub, i))
                        .collect()
                })
                .unwrap_or_default()
        };
        let mut cands = mergeable(pair.hub_a, &slots);
        cands.extend(mergeable(pair.hub_b, &slots));
        if cands.len() < 2 {
            continue;
        }
        cands.sort_unstable();
        let mut used = vec![false; cands.len()];
        for i in 0..cands.len() {
            let (_, end_i, hub_i, idx_i) = cands[i];
            if used[i] || !chains.ends_chain((hub_i, idx_i)) {
                continue;
            }
            let mut pick = None;
            for (j, &(start_j, _, hub_j, idx_j)) in cands.iter().enumerate() {
                if used[j] || hub_j == hub_i {
                    continue;
                }
                if start_j < end_i + travel || start_j > end_i + rules.max_gap_h {
                    continue;
                }
                if !chains.starts_fresh_chain((hub_j, idx_j)) {
                    continue;
                }
                if chains.hours((hub_i, idx_i)) + chains.hours((hub_j, idx_j)) > rules.rho_h {
                    continue;
                }
                // cands is sorted, so the first hit starts earliest
                pick = Some(j);
                break;
            }
            let Some(j) = pick else { continue };
            used[i] = true;
            used[j] = true;
            let (start_j, _, hub_j, idx_j) = cands[j];
            chains.join((hub_i, idx_i), (hub_j, idx_j));
            let first = slots.get_mut(&hub_i).unwrap()[idx_i].take().unwrap();
            let second = slots.get_mut(&hub_j).unwrap()[idx_j].take().unwrap();
            let mut segments = first.segments;
            segments.push(Segment::travel(hub_i, hub_j, end_i, end_i + travel, pair.distance_m));
            if end_i + travel < start_j {
                segments.push(Segment::resting(hub_j, end_i + travel, start_j));
            }
            segments.extend(second.segments);
            merged.push(Shift::new(segments));
        }
    }

    let mut out = merged;
    out.extend(slots.into_values().flatten().flatten());
    sort_shifts(&mut out);
    out
}

/// Canonical roster order: start, first hub, end.
pub fn sort_shifts(shifts: &mut [Shift]) {
    shifts.sort_by_key(|s| (s.start_h(), s.first_hub(), s.end_h()));
}

/// Within-hub candidates for every hub. No work is placed before `open_from`.
pub fn plan_within_hubs(
    demand: &DemandMatrix,
    open_from: usize,
    zeta_h: u32,
    rho_h: u32,
) -> Result<BTreeMap<HubId, Vec<Shift>>> {
    demand
        .iter()
        .map(|(&hub, row)| Ok((hub, combine_within_hub_from(hub, row, open_from, zeta_h, rho_h)?)))
        .collect()
}

/// Runs the within-hub passes for every hub and, if `merge` is given, the
/// cross-hub pass for a roster with no workers hired yet.
pub fn plan_shifts(
    demand: &DemandMatrix,
    open_from: usize,
    zeta_h: u32,
    merge: Option<(&[MovingPair], &MergeRules)>,
    rho_h: u32,
) -> Result<Vec<Shift>> {
    let per_hub = plan_within_hubs(demand, open_from, zeta_h, rho_h)?;
    let mut out = match merge {
        Some((pairs, rules)) => merge_across_hubs(per_hub, pairs, rules, &[]),
        None => per_hub.into_values().flatten().collect(),
    };
    sort_shifts(&mut out);
    Ok(out)
}
