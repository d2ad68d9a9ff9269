//! Report files, ledger comparison and the roster audit.
//!
//! Every CSV starts with a `# seed=.. config_hash=..` comment line. The
//! ledger JSON carries the same two values as fields.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::NoiseMode;
use crate::demand::ArrivalSeries;
use crate::engine::{replay_execution, Scenario, SimReport};
use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::network::{HubId, HubNetwork};
use crate::shift::{Segment, SegmentKind, Shift};

pub const LEDGER_JSON: &str = "ledger.json";
pub const LEDGER_CSV: &str = "ledger.csv";
pub const ROSTER_CSV: &str = "roster.csv";
pub const ASSIGNMENTS_CSV: &str = "assignments.csv";
pub const SERIES_CSV: &str = "series.csv";
pub const FLOWS_CSV: &str = "flows.csv";
pub const FORECASTS_CSV: &str = "forecasts.csv";
pub const WORKERS_CSV: &str = "workers.csv";

/// Provenance stamped on every emitted file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStamp {
    pub seed: u64,
    pub config_hash: String,
}

impl RunStamp {
    pub fn header(&self) -> String {
        format!("# seed={} config_hash={}", self.seed, self.config_hash)
    }
}

/// On-disk ledger: the six categories and their total plus run metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub hiring: u64,
    pub hourly: u64,
    pub waiting: u64,
    pub moving: u64,
    pub lateness: u64,
    pub emergency: u64,
    pub total: u64,
}

impl LedgerFile {
    pub fn new(ledger: &CostLedger, scenario: Option<Scenario>, noise: Option<NoiseMode>, stamp: Option<&RunStamp>) -> Self {
        Self {
            scenario: scenario.map(Scenario::number),
            noise,
            seed: stamp.map(|s| s.seed),
            config_hash: stamp.map(|s| s.config_hash.clone()),
            hiring: ledger.hiring,
            hourly: ledger.hourly,
            waiting: ledger.waiting,
            moving: ledger.moving,
            lateness: ledger.lateness,
            emergency: ledger.emergency,
            total: ledger.total(),
        }
    }

    pub fn ledger(&self) -> CostLedger {
        CostLedger {
            hiring: self.hiring,
            hourly: self.hourly,
            waiting: self.waiting,
            moving: self.moving,
            lateness: self.lateness,
            emergency: self.emergency,
        }
    }

    /// Parses a ledger and checks that its total matches the categories.
    pub fn parse(text: &str) -> Result<Self> {
        let file: LedgerFile = serde_json::from_str(text)?;
        if file.ledger().total() != file.total {
            return Err(Error::Malformed(format!(
                "ledger total {} differs from the sum of its categories {}",
                file.total,
                file.ledger().total()
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

fn csv_file(path: &Path, stamp: &RunStamp) -> Result<csv::Writer<BufWriter<File>>> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", stamp.header())?;
    Ok(csv::Writer::from_writer(out))
}

pub fn scenario_dir(out: &Path, scenario: Scenario) -> PathBuf {
    out.join(format!("scenario_{}", scenario.number()))
}

/// Writes every report file of one run into `dir`.
pub fn write_report(dir: &Path, report: &SimReport, scenario: Scenario, noise: NoiseMode, stamp: &RunStamp) -> Result<()> {
    fs::create_dir_all(dir)?;

    let ledger = LedgerFile::new(&report.ledger, Some(scenario), Some(noise), Some(stamp));
    let mut json = serde_json::to_string_pretty(&ledger)?;
    json.push('\n');
    fs::write(dir.join(LEDGER_JSON), json)?;

    let mut w = csv_file(&dir.join(LEDGER_CSV), stamp)?;
    w.write_record(["category", "unit_price", "amount"])?;
    for (label, price, amount) in report.ledger.rows() {
        w.write_record([label, price, &amount.to_string()])?;
    }
    w.flush()?;

    let mut w = csv_file(&dir.join(ROSTER_CSV), stamp)?;
    w.write_record(["shift_id", "worker_id", "segment_idx", "hub_id", "kind", "start_h", "end_h"])?;
    for e in &report.roster {
        for (i, seg) in e.shift.segments.iter().enumerate() {
            w.write_record([
                e.id.to_string(),
                e.worker.to_string(),
                i.to_string(),
                seg.hub.to_string(),
                seg.kind.label().to_string(),
                seg.start_h.to_string(),
                seg.end_h.to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv_file(&dir.join(ASSIGNMENTS_CSV), stamp)?;
    w.write_record(["shift_id", "worker_id", "notified_at_h", "new_hire"])?;
    for e in &report.roster {
        w.write_record([
            e.id.to_string(),
            e.worker.to_string(),
            e.notified_at_h.to_string(),
            e.new_hire.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv_file(&dir.join(SERIES_CSV), stamp)?;
    w.write_record(["hub_id", "slot_h", "arrivals", "workers_working", "workers_resting"])?;
    for s in &report.series {
        for t in 0..s.arrivals.len() {
            w.write_record([
                s.hub_id.to_string(),
                t.to_string(),
                s.arrivals[t].to_string(),
                s.working[t].to_string(),
                s.resting[t].to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv_file(&dir.join(FLOWS_CSV), stamp)?;
    w.write_record(["from_hub", "to_hub", "window_start_h", "worker_moves"])?;
    for f in &report.flows {
        w.write_record([f.from.to_string(), f.to.to_string(), f.window_start_h.to_string(), f.moves.to_string()])?;
    }
    w.flush()?;

    if !report.forecasts.is_empty() {
        let mut out = BufWriter::new(File::create(dir.join(FORECASTS_CSV))?);
        writeln!(out, "{}", stamp.header())?;
        writeln!(out, "hub_id,slot_h,arrivals,made_at_h")?;
        for snap in &report.forecasts {
            for (hub, row) in &snap.predicted {
                for (slot, p) in row.iter().enumerate().skip(snap.made_at_h as usize) {
                    writeln!(out, "{hub},{slot},{p:.3},{}", snap.made_at_h)?;
                }
            }
        }
        out.flush()?;
    }
    if !report.worker_log.is_empty() {
        let mut w = csv_file(&dir.join(WORKERS_CSV), stamp)?;
        w.write_record(["step_h", "worker_id", "state", "shift_id"])?;
        for r in &report.worker_log {
            w.write_record([
                r.step_h.to_string(),
                r.worker.to_string(),
                r.state.label().to_string(),
                r.shift.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct RosterRecord {
    shift_id: u32,
    #[allow(dead_code)]
    worker_id: u32,
    segment_idx: u32,
    hub_id: u32,
    kind: String,
    start_h: u32,
    end_h: u32,
}

#[derive(Debug, Deserialize)]
struct AssignmentRecord {
    shift_id: u32,
    #[allow(dead_code)]
    worker_id: u32,
    notified_at_h: f64,
    new_hire: bool,
}

/// Rebuilds roster shifts from a roster dump, in shift id order. Travel
/// segments take their origin from the preceding segment and their length
/// from `net`. Working segments carry no served-slot detail.
pub fn read_roster<R: Read>(input: R, net: &HubNetwork) -> Result<BTreeMap<u32, Shift>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut rows: BTreeMap<u32, BTreeMap<u32, RosterRecord>> = BTreeMap::new();
    for rec in rdr.deserialize() {
        let rec: RosterRecord = rec?;
        net.index_of(HubId(rec.hub_id))?;
        if rec.end_h < rec.start_h {
            return Err(Error::Malformed(format!("shift {} has a segment ending before it starts", rec.shift_id)));
        }
        let (shift, idx) = (rec.shift_id, rec.segment_idx);
        if rows.entry(shift).or_default().insert(idx, rec).is_some() {
            return Err(Error::Malformed(format!("shift {shift} repeats segment {idx}")));
        }
    }
    let mut out = BTreeMap::new();
    for (id, recs) in rows {
        let mut segments: Vec<Segment> = Vec::with_capacity(recs.len());
        for rec in recs.into_values() {
            let hub = HubId(rec.hub_id);
            let kind = match rec.kind.as_str() {
                "working" => SegmentKind::Working,
                "resting" => SegmentKind::Resting,
                "travel" => {
                    let from = segments
                        .last()
                        .map(|s| s.hub)
                        .ok_or_else(|| Error::Malformed(format!("shift {id} starts with travel")))?;
                    SegmentKind::Travel { from, distance_m: net.distance_between(from, hub)? }
                }
                other => return Err(Error::Malformed(format!("unknown segment kind {other:?}"))),
            };
            segments.push(Segment { hub, start_h: rec.start_h, end_h: rec.end_h, kind, served: Vec::new() });
        }
        out.insert(id, Shift::new(segments));
    }
    Ok(out)
}

/// Recomputes a run's ledger from its roster and assignment dumps and the
/// actual arrivals.
pub fn audit_run(dir: &Path, net: &HubNetwork, actuals: &[ArrivalSeries], zeta_h: u32, mu: f64) -> Result<CostLedger> {
    let roster = read_roster(File::open(dir.join(ROSTER_CSV))?, net)?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(dir.join(ASSIGNMENTS_CSV))?;
    let mut ledger = CostLedger::default();
    let mut seen = 0;
    for rec in rdr.deserialize() {
        let rec: AssignmentRecord = rec?;
        let shift = roster
            .get(&rec.shift_id)
            .ok_or_else(|| Error::Malformed(format!("assignment for unknown shift {}", rec.shift_id)))?;
        ledger.accrue_shift(shift, f64::from(shift.start_h()) - rec.notified_at_h, rec.new_hire);
        seen += 1;
    }
    if seen != roster.len() {
        return Err(Error::Malformed(format!("{} shifts but {seen} assignments", roster.len())));
    }
    let shifts: Vec<&Shift> = roster.values().collect();
    ledger.add_lateness(replay_execution(&shifts, actuals, zeta_h, mu).late_parcels);
    Ok(ledger)
}

/// Category table with one column per ledger and, from the second ledger
/// on, its difference from the first.
pub fn format_comparison(columns: &[(String, CostLedger)]) -> String {
    let mut head = vec![("Category".to_string(), "Unit price".to_string())];
    let mut cells: Vec<Vec<String>> = Vec::new();
    let rows = CostLedger::default().rows();
    for (label, price, _) in rows {
        head.push((label.to_string(), price.to_string()));
    }
    let mut titles = Vec::new();
    for (name, l) in columns {
        titles.push(name.clone());
        cells.push(l.rows().iter().map(|r| r.2.to_string()).collect());
    }
    if let Some((first_name, first)) = columns.first() {
        let base = first.rows();
        for (name, l) in &columns[1..] {
            titles.push(format!("{name} - {first_name}"));
            cells.push(
                l.rows()
                    .iter()
                    .zip(base.iter())
                    .map(|(a, b)| (a.2 as i128 - b.2 as i128).to_string())
                    .collect(),
            );
        }
    }

    let label_w = head.iter().map(|h| h.0.len()).max().unwrap_or(0);
    let price_w = head.iter().map(|h| h.1.len()).max().unwrap_or(0);
    let col_w: Vec<usize> = titles
        .iter()
        .zip(&cells)
        .map(|(t, c)| c.iter().map(String::len).chain([t.len()]).max().unwrap_or(0))
        .collect();

    let mut out = String::new();
    let _ = write!(out, "{:<label_w$}  {:<price_w$}", head[0].0, head[0].1);
    for (t, w) in titles.iter().zip(&col_w) {
        let _ = write!(out, "  {t:>w$}");
    }
    out.push('\n');
    for (r, (label, price)) in head.iter().skip(1).enumerate() {
        let _ = write!(out, "{label:<label_w$}  {price:<price_w$}");
        for (c, w) in cells.iter().zip(&col_w) {
            let _ = write!(out, "  {:>w$}", c[r]);
        }
        out.push('\n');
    }
    out
}

/// Loads ledger files and formats them side by side.
pub fn compare_ledgers(paths: &[PathBuf]) -> Result<String> {
    if paths.len() < 2 {
        return Err(Error::InvalidConfig("compare needs at least two ledger files".into()));
    }
    let columns = paths
        .iter()
        .map(|p| {
            let file = LedgerFile::load(p)?;
            let name = p
                .parent()
                .and_then(|d| d.file_name())
                .map(|d| format!("{}/{}", d.to_string_lossy(), p.file_name().unwrap_or_default().to_string_lossy()))
                .unwrap_or_else(|| p.display().to_string());
            Ok((name, file.ledger()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(format_comparison(&columns))
}
