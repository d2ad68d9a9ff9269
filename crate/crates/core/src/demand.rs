//! Arrival streams, noisy forecasts and their conversion into labor demand.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{GeneratorConfig, NoiseMode};
use crate::error::{Error, Result};
use crate::network::{HubId, HubNetwork, Tier};
use crate::shift::Shift;

/// Parcels arriving at one hub, one entry per hour slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalSeries {
    pub hub_id: HubId,
    pub arrivals: Vec<u64>,
}

/// Workers required per hour slot, keyed by hub.
pub type DemandMatrix = BTreeMap<HubId, Vec<u32>>;

/// Forecast made at `made_at_h` for every slot of the horizon. Slots before
/// `made_at_h` hold the observed arrivals.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSnapshot {
    pub made_at_h: u32,
    pub predicted: BTreeMap<HubId, Vec<f64>>,
}

/// Predicted arrivals for slot `t1` made at `t0`, given the actual count and
/// a draw `u` from `[-1, 1]`. The relative error grows by one percent per
/// hour of lead time.
pub fn forecast(actual: u64, t0: u32, t1: u32, u: f64) -> f64 {
    debug_assert!(t1 >= t0);
    let lead = f64::from(t1 - t0);
    let c = actual as f64;
    (c * (u * lead + 100.0) / 100.0).max(0.0)
}

/// Workers needed to process `count` parcels in one hour.
pub fn workers_for(count: f64, mu: f64) -> u32 {
    if count <= 0.0 {
        return 0;
    }
    (count / mu).ceil() as u32
}

/// `ceil(count / mu)` for every slot.
pub fn labor_demand(counts: &[f64], mu: f64) -> Vec<u32> {
    counts.iter().map(|&c| workers_for(c, mu)).collect()
}

/// Removes the workload already covered by `fixed` from `demand`.
///
/// Each fixed working hour retires one unit of demand at the arrival slot it
/// serves, so work deferred within the dwell window is charged to the slot it
/// came from. Results are clamped at zero; the input is not modified.
pub fn deduct_assigned<'a>(
    demand: &DemandMatrix,
    fixed: impl IntoIterator<Item = &'a Shift>,
) -> DemandMatrix {
    let mut out = demand.clone();
    for shift in fixed {
        for seg in shift.working_segments() {
            let Some(row) = out.get_mut(&seg.hub) else { continue };
            for &origin in &seg.served {
                if let Some(x) = row.get_mut(origin as usize) {
                    *x = x.saturating_sub(1);
                }
            }
        }
    }
    out
}

/// Deterministic source of forecast noise.
///
/// Every `(hub, snapshot)` pair owns an independent stream derived from the
/// run seed, and one value is drawn per target slot, so a forecast made at
/// hour `t0` is identical whichever scenario requests it.
#[derive(Debug, Clone, Copy)]
pub struct Forecaster {
    pub seed: u64,
    pub mode: NoiseMode,
}

impl Forecaster {
    pub fn new(seed: u64, mode: NoiseMode) -> Self {
        Self { seed, mode }
    }

    fn stream(&self, hub_idx: usize, t0: u32) -> ChaCha8Rng {
        let key = mix(mix(self.seed ^ 0x6675_7475_7265_u64, hub_idx as u64), u64::from(t0));
        ChaCha8Rng::seed_from_u64(key)
    }

    pub fn snapshot(&self, actuals: &[ArrivalSeries], t0: u32) -> ForecastSnapshot {
        let mut predicted = BTreeMap::new();
        for (idx, series) in actuals.iter().enumerate() {
            let mut rng = self.stream(idx, t0);
            let row = series
                .arrivals
                .iter()
                .enumerate()
                .map(|(t1, &c)| {
                    let t1 = t1 as u32;
                    if t1 < t0 {
                        return c as f64;
                    }
                    let u = match self.mode {
                        NoiseMode::Paper => rng.gen_range(-1.0..=1.0),
                        NoiseMode::Perfect => 0.0,
                    };
                    forecast(c, t0, t1, u)
                })
                .collect();
            predicted.insert(series.hub_id, row);
        }
        ForecastSnapshot { made_at_h: t0, predicted }
    }
}

impl ForecastSnapshot {
    pub fn labor_demand(&self, mu: f64) -> DemandMatrix {
        self.predicted.iter().map(|(&hub, row)| (hub, labor_demand(row, mu))).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W, header: &str) -> Result<()> {
        let mut out = out;
        writeln!(out, "{header}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["hub_id", "slot_h", "arrivals", "made_at_h"])?;
        for (hub, row) in &self.predicted {
            for (slot, p) in row.iter().enumerate().skip(self.made_at_h as usize) {
                w.write_record([
                    hub.to_string(),
                    slot.to_string(),
                    format!("{p:.3}"),
                    self.made_at_h.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// splitmix64 finalizer over a combined word.
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a.wrapping_add(b.wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Synthetic hourly arrivals for every hub of `net` over `n` slots.
///
/// Each hub follows a daily sinusoid with multiplicative noise. Gateway hubs
/// are heavier and peak `gateway_offset_h` after the local hubs. Every full
/// day sums to exactly `daily_volume` parcels across the network.
pub fn generate_arrivals(
    net: &HubNetwork,
    cfg: &GeneratorConfig,
    n: u32,
    seed: u64,
) -> Result<Vec<ArrivalSeries>> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("horizon must be at least one slot".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 0xA11_1BA1));
    let hubs = net.hubs();
    let weights: Vec<f64> = hubs
        .iter()
        .map(|h| {
            let base = match h.tier {
                Tier::Gateway => cfg.gateway_weight,
                Tier::Local => 1.0,
            };
            base * (1.0 + cfg.noise * rng.gen_range(-1.0..=1.0))
        })
        .collect();

    let mut series: Vec<ArrivalSeries> =
        hubs.iter().map(|h| ArrivalSeries { hub_id: h.id, arrivals: Vec::with_capacity(n as usize) }).collect();
    let days = n.div_ceil(24);
    for _ in 0..days {
        let mut raw = Vec::with_capacity(hubs.len() * 24);
        for (hub, w) in hubs.iter().zip(&weights) {
            let peak = match hub.tier {
                Tier::Local => cfg.local_peak_h,
                Tier::Gateway => cfg.local_peak_h + cfg.gateway_offset_h,
            };
            for h in 0..24 {
                let phase = 2.0 * PI * (f64::from(h) + 0.5 - peak) / 24.0;
                let shape = 1.0 + cfg.amplitude * phase.cos();
                let jitter = 1.0 + cfg.noise * rng.gen_range(-1.0..=1.0);
                raw.push((w * shape * jitter).max(0.0));
            }
        }
        let counts = apportion(&raw, cfg.daily_volume as u64);
        for (i, s) in series.iter_mut().enumerate() {
            for h in 0..24 {
                if s.arrivals.len() < n as usize {
                    s.arrivals.push(counts[i * 24 + h]);
                }
            }
        }
    }
    Ok(series)
}

/// Largest-remainder rounding of `total` in proportion to `weights`.
fn apportion(weights: &[f64], total: u64) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    if total == 0 || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<u64> = exact.iter().map(|e| e.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

#[derive(Debug, Serialize, Deserialize)]
struct ArrivalRecord {
    hub_id: u32,
    slot_h: u32,
    arrivals: u64,
}

pub fn write_arrivals_csv<W: Write>(series: &[ArrivalSeries], out: W, header: &str) -> Result<()> {
    let mut out = out;
    writeln!(out, "{header}")?;
    let mut w = csv::Writer::from_writer(out);
    for s in series {
        for (slot, &a) in s.arrivals.iter().enumerate() {
            w.serialize(ArrivalRecord { hub_id: s.hub_id.0, slot_h: slot as u32, arrivals: a })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads an arrivals file and orders the series by the hubs of `net`.
pub fn read_arrivals_csv<R: Read>(input: R, net: &HubNetwork) -> Result<Vec<ArrivalSeries>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut rows: BTreeMap<HubId, BTreeMap<u32, u64>> = BTreeMap::new();
    for rec in rdr.deserialize() {
        let rec: ArrivalRecord = rec?;
        let hub = HubId(rec.hub_id);
        net.index_of(hub)?;
        if rows.entry(hub).or_default().insert(rec.slot_h, rec.arrivals).is_some() {
            return Err(Error::Malformed(format!("duplicate arrivals for hub {hub} slot {}", rec.slot_h)));
        }
    }
    let n = rows.values().map(|r| r.len()).max().unwrap_or(0);
    net.hubs()
        .iter()
        .map(|h| {
            let row = rows.remove(&h.id).unwrap_or_default();
            let arrivals: Vec<u64> = (0..n as u32).map(|t| row.get(&t).copied().unwrap_or(0)).collect();
            if row.len() != n && !row.is_empty() {
                return Err(Error::Malformed(format!("hub {} has gaps in its arrival slots", h.id)));
            }
            Ok(ArrivalSeries { hub_id: h.id, arrivals })
        })
        .collect()
}
