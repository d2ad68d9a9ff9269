//! Hubs, distances and the set of hub pairs workers may move between.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::GeneratorConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HubId(pub u32);

impl fmt::Display for HubId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Gateway,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hub {
    pub id: HubId,
    pub name: String,
    pub x_m: f64,
    pub y_m: f64,
    pub tier: Tier,
}

/// A validated network. Hub order is the order given at construction and is
/// the index order used by every per-hub vector in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkFile", into = "NetworkFile")]
pub struct HubNetwork {
    hubs: Vec<Hub>,
    d_max_m: f64,
    speed_m_per_h: f64,
    #[serde(skip)]
    index: BTreeMap<HubId, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NetworkFile {
    d_max_m: f64,
    speed_m_per_h: f64,
    hubs: Vec<Hub>,
}

impl TryFrom<NetworkFile> for HubNetwork {
    type Error = Error;

    fn try_from(file: NetworkFile) -> Result<Self> {
        HubNetwork::new(file.hubs, file.d_max_m, file.speed_m_per_h)
    }
}

impl From<HubNetwork> for NetworkFile {
    fn from(net: HubNetwork) -> Self {
        NetworkFile {
            d_max_m: net.d_max_m,
            speed_m_per_h: net.speed_m_per_h,
            hubs: net.hubs,
        }
    }
}

impl HubNetwork {
    pub fn new(hubs: Vec<Hub>, d_max_m: f64, speed_m_per_h: f64) -> Result<Self> {
        if !(d_max_m.is_finite() && d_max_m > 0.0) {
            return Err(Error::InvalidNetwork(format!("d_max_m must be positive, got {d_max_m}")));
        }
        if !(speed_m_per_h.is_finite() && speed_m_per_h > 0.0) {
            return Err(Error::InvalidNetwork(format!(
                "speed_m_per_h must be positive, got {speed_m_per_h}"
            )));
        }
        let mut index = BTreeMap::new();
        for (i, hub) in hubs.iter().enumerate() {
            if !(hub.x_m.is_finite() && hub.y_m.is_finite()) {
                return Err(Error::InvalidNetwork(format!("hub {} has non-finite coordinates", hub.id)));
            }
            if index.insert(hub.id, i).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate hub id {}", hub.id)));
            }
        }
        Ok(Self { hubs, d_max_m, speed_m_per_h, index })
    }

    pub fn hubs(&self) -> &[Hub] {
        &self.hubs
    }

    pub fn len(&self) -> usize {
        self.hubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hubs.is_empty()
    }

    pub fn d_max_m(&self) -> f64 {
        self.d_max_m
    }

    pub fn speed_m_per_h(&self) -> f64 {
        self.speed_m_per_h
    }

    pub fn index_of(&self, id: HubId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownHub(id))
    }

    pub fn hub(&self, id: HubId) -> Result<&Hub> {
        Ok(&self.hubs[self.index_of(id)?])
    }

    pub fn distance_between(&self, a: HubId, b: HubId) -> Result<f64> {
        Ok(distance(self.hub(a)?, self.hub(b)?))
    }

    pub fn travel_time_h(&self, distance_m: f64) -> f64 {
        distance_m / self.speed_m_per_h
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Planar Euclidean distance in meters.
pub fn distance(a: &Hub, b: &Hub) -> f64 {
    (a.x_m - b.x_m).hypot(a.y_m - b.y_m)
}

/// Random hub layout: gateway hubs around the centre of the square area,
/// local hubs spread uniformly over it. Hub ids are `0..hubs`, gateways first.
pub fn synthetic_network(cfg: &GeneratorConfig, seed: u64) -> Result<HubNetwork> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4E45_5457_4F52_4B00);
    let side = cfg.area_m;
    let hubs = (0..cfg.hubs)
        .map(|i| {
            let gateway = i < cfg.gateway_hubs;
            let (x_m, y_m) = if gateway {
                (side * rng.gen_range(0.3..0.7), side * rng.gen_range(0.3..0.7))
            } else {
                (side * rng.gen_range(0.0..1.0), side * rng.gen_range(0.0..1.0))
            };
            let (tier, prefix) = if gateway { (Tier::Gateway, "GW") } else { (Tier::Local, "LH") };
            Hub {
                id: HubId(i as u32),
                name: format!("{prefix}-{i:02}"),
                x_m: x_m.round(),
                y_m: y_m.round(),
                tier,
            }
        })
        .collect();
    HubNetwork::new(hubs, cfg.d_max_m, cfg.speed_m_per_h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovingPair {
    pub hub_a: HubId,
    pub hub_b: HubId,
    pub distance_m: f64,
    pub travel_time_h: f64,
}

impl MovingPair {
    pub fn contains(&self, hub: HubId) -> bool {
        self.hub_a == hub || self.hub_b == hub
    }
}

/// Every unordered hub pair within `d_max_m`, nearest first. Equal distances
/// are ordered by `(min id, max id)` so the greedy merge is reproducible.
/// `hub_a` is always the smaller id.
pub fn build_moving_pairs(net: &HubNetwork) -> Vec<MovingPair> {
    let hubs = net.hubs();
    let mut pairs = Vec::new();
    for (i, a) in hubs.iter().enumerate() {
        for b in &hubs[i + 1..] {
            let d = distance(a, b);
            if d <= net.d_max_m() {
                let (lo, hi) = if a.id < b.id { (a.id, b.id) } else { (b.id, a.id) };
                pairs.push(MovingPair {
                    hub_a: lo,
                    hub_b: hi,
                    distance_m: d,
                    travel_time_h: net.travel_time_h(d),
                });
            }
        }
    }
    pairs.sort_by(|p, q| {
        p.distance_m
            .total_cmp(&q.distance_m)
            .then(p.hub_a.cmp(&q.hub_a))
            .then(p.hub_b.cmp(&q.hub_b))
    });
    pairs
}
