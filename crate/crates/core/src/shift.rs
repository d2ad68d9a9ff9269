//! Shifts as ordered runs of working, resting and travel segments.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::network::HubId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShiftId(pub u32);

impl fmt::Display for ShiftId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentKind {
    Working,
    Resting,
    /// Relocation to the segment's hub from `from`.
    Travel { from: HubId, distance_m: f64 },
}

impl SegmentKind {
    pub fn label(&self) -> &'static str {
        match self {
            SegmentKind::Working => "working",
            SegmentKind::Resting => "resting",
            SegmentKind::Travel { .. } => "travel",
        }
    }
}

/// A half-open run of hour slots `[start_h, end_h)` at one hub.
///
/// For working segments `served[i]` is the arrival slot of the demand unit
/// handled during slot `start_h + i`; it differs from the slot itself only
/// when work was deferred within the dwell window.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub hub: HubId,
    pub start_h: u32,
    pub end_h: u32,
    pub kind: SegmentKind,
    pub served: Vec<u32>,
}

impl Segment {
    pub fn working(hub: HubId, start_h: u32, served: Vec<u32>) -> Self {
        let end_h = start_h + served.len() as u32;
        Segment { hub, start_h, end_h, kind: SegmentKind::Working, served }
    }

    pub fn resting(hub: HubId, start_h: u32, end_h: u32) -> Self {
        Segment { hub, start_h, end_h, kind: SegmentKind::Resting, served: Vec::new() }
    }

    pub fn travel(from: HubId, to: HubId, start_h: u32, end_h: u32, distance_m: f64) -> Self {
        Segment {
            hub: to,
            start_h,
            end_h,
            kind: SegmentKind::Travel { from, distance_m },
            served: Vec::new(),
        }
    }

    pub fn hours(&self) -> u32 {
        self.end_h - self.start_h
    }

    pub fn is_working(&self) -> bool {
        matches!(self.kind, SegmentKind::Working)
    }

    pub fn covers(&self, slot: u32) -> bool {
        self.start_h <= slot && slot < self.end_h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    pub segments: Vec<Segment>,
    pub fixed_at_h: Option<u32>,
}

impl Shift {
    pub fn new(segments: Vec<Segment>) -> Self {
        debug_assert!(!segments.is_empty());
        Shift { segments, fixed_at_h: None }
    }

    /// A single continuous working block at one hub.
    pub fn continuous(hub: HubId, start_h: u32, served: Vec<u32>) -> Self {
        Shift::new(vec![Segment::working(hub, start_h, served)])
    }

    pub fn start_h(&self) -> u32 {
        self.segments.first().map_or(0, |s| s.start_h)
    }

    pub fn end_h(&self) -> u32 {
        self.segments.last().map_or(0, |s| s.end_h)
    }

    pub fn first_hub(&self) -> HubId {
        self.segments[0].hub
    }

    pub fn last_hub(&self) -> HubId {
        self.segments[self.segments.len() - 1].hub
    }

    pub fn working_hours(&self) -> u32 {
        self.segments.iter().filter(|s| s.is_working()).map(Segment::hours).sum()
    }

    pub fn resting_hours(&self) -> u32 {
        self.segments
            .iter()
            .filter(|s| matches!(s.kind, SegmentKind::Resting))
            .map(Segment::hours)
            .sum()
    }

    pub fn working_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.is_working())
    }

    /// `(from, to, start_h, distance_m)` of every relocation.
    pub fn moves(&self) -> impl Iterator<Item = (HubId, HubId, u32, f64)> + '_ {
        self.segments.iter().filter_map(|s| match s.kind {
            SegmentKind::Travel { from, distance_m } => Some((from, s.hub, s.start_h, distance_m)),
            _ => None,
        })
    }

    pub fn spans_hubs(&self) -> bool {
        self.segments.iter().any(|s| matches!(s.kind, SegmentKind::Travel { .. }))
    }

    /// Working hours at `hub`.
    pub fn working_hours_at(&self, hub: HubId) -> u32 {
        self.working_segments().filter(|s| s.hub == hub).map(Segment::hours).sum()
    }

    /// Checks the structural invariants: sorted, contiguous, non-empty
    /// segments; travel only between distinct hubs; non-travel segments at
    /// the hub the previous segment ended at.
    pub fn is_well_formed(&self) -> bool {
        if self.segments.is_empty() || self.working_hours() == 0 {
            return false;
        }
        let mut at = self.segments[0].hub;
        if !self.segments[0].is_working() {
            return false;
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.start_h >= seg.end_h {
                return false;
            }
            if i > 0 && self.segments[i - 1].end_h != seg.start_h {
                return false;
            }
            match seg.kind {
                SegmentKind::Travel { from, .. } => {
                    if from != at || from == seg.hub {
                        return false;
                    }
                }
                _ => {
                    if seg.hub != at {
                        return false;
                    }
                }
            }
            if seg.is_working() && seg.served.len() as u32 != seg.hours() {
                return false;
            }
            at = seg.hub;
        }
        self.segments.last().is_some_and(Segment::is_working)
    }
}
