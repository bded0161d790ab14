//! Offered-load generation for one scheduling cycle.
//!
//! Every node holds at most one request per cycle: each of the `N * (K - 1)`
//! sources is active with probability `load`, an active source is interdomain
//! with probability `r_inter`, and the destination is uniform over the
//! nonlocal (interdomain) or other local (intradomain) nodes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::SwitchConfig;

/// A node address: coupler `1..=N`, local index `1..=K-1`.
///
/// Each node owns one transmitter and one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub coupler: usize,
    pub local: usize,
}

impl NodeId {
    pub fn new(coupler: usize, local: usize) -> Self {
        NodeId { coupler, local }
    }

    fn validate(&self, config: &SwitchConfig) -> Result<()> {
        if self.coupler == 0 || self.coupler > config.awg_ports() {
            return Err(Error::Domain(format!(
                "coupler {} out of range 1..={}",
                self.coupler,
                config.awg_ports()
            )));
        }
        if self.local == 0 || self.local > config.nodes_per_coupler() {
            return Err(Error::Domain(format!(
                "local index {} out of range 1..={}",
                self.local,
                config.nodes_per_coupler()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.coupler, self.local)
    }
}

/// Whether a connection crosses the AWG or stays inside one coupler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrafficClass {
    Interdomain,
    Intradomain,
}

/// One connection request; the class is determined by the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectionRequest {
    pub source: NodeId,
    pub destination: NodeId,
}

impl ConnectionRequest {
    pub fn new(source: NodeId, destination: NodeId) -> Result<Self> {
        if source == destination {
            return Err(Error::Domain(format!("request from {source} to itself")));
        }
        Ok(ConnectionRequest {
            source,
            destination,
        })
    }

    pub fn class(&self) -> TrafficClass {
        if self.source.coupler == self.destination.coupler {
            TrafficClass::Intradomain
        } else {
            TrafficClass::Interdomain
        }
    }
}

/// One scheduling cycle's offered traffic: at most one request per source.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RequestBatch {
    requests: Vec<ConnectionRequest>,
}

impl RequestBatch {
    /// Wraps a request list, enforcing node ranges and the one-request-per-
    /// source invariant. Destinations may repeat; contention is the
    /// scheduler's job.
    pub fn new(config: &SwitchConfig, requests: Vec<ConnectionRequest>) -> Result<Self> {
        let mut seen_sources = std::collections::HashSet::new();
        for request in &requests {
            request.source.validate(config)?;
            request.destination.validate(config)?;
            if !seen_sources.insert(request.source) {
                return Err(Error::Domain(format!(
                    "source {} holds more than one request",
                    request.source
                )));
            }
        }
        Ok(RequestBatch { requests })
    }

    pub fn requests(&self) -> &[ConnectionRequest] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Serializes the batch as one `src_coupler,src_local,dst_coupler,dst_local`
    /// line per request, for replay tests.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.requests {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.source.coupler, r.source.local, r.destination.coupler, r.destination.local
            ));
        }
        out
    }

    /// Parses the line format produced by [`RequestBatch::to_lines`]. Blank
    /// lines and lines starting with `#` are skipped.
    pub fn from_lines(config: &SwitchConfig, text: &str) -> Result<Self> {
        let mut requests = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<_> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::BatchParse {
                    line: line_no + 1,
                    message: format!("expected 4 comma-separated fields, got {}", fields.len()),
                });
            }
            let mut parsed = [0usize; 4];
            for (slot, field) in parsed.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|e| Error::BatchParse {
                    line: line_no + 1,
                    message: format!("bad integer {field:?}: {e}"),
                })?;
            }
            let request = ConnectionRequest::new(
                NodeId::new(parsed[0], parsed[1]),
                NodeId::new(parsed[2], parsed[3]),
            )
            .map_err(|e| Error::BatchParse {
                line: line_no + 1,
                message: e.to_string(),
            })?;
            requests.push(request);
        }
        Self::new(config, requests)
    }
}

/// Draws one cycle of offered traffic.
///
/// Sources are visited in ascending (coupler, local) order; for each source
/// the generator draws presence, then class, then destination, so a cycle is
/// replayable from its seed alone.
pub fn generate_batch(
    config: &SwitchConfig,
    load: f64,
    r_inter: f64,
    seed: u64,
) -> Result<RequestBatch> {
    check_probability("load", load)?;
    check_probability("r_inter", r_inter)?;
    if config.coupler_ports() == 2 && r_inter < 1.0 {
        return Err(Error::NoIntraDestinations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.awg_ports();
    let per_coupler = config.nodes_per_coupler();
    let mut requests = Vec::new();
    for coupler in 1..=n {
        for local in 1..=per_coupler {
            if !rng.gen_bool(load) {
                continue;
            }
            let source = NodeId::new(coupler, local);
            let destination = if rng.gen_bool(r_inter) {
                // Uniform over the (N-1)(K-1) nodes outside the source coupler.
                let idx = rng.gen_range(0..(n - 1) * per_coupler);
                let other = idx / per_coupler;
                let dst_coupler = if other + 1 >= coupler {
                    other + 2
                } else {
                    other + 1
                };
                NodeId::new(dst_coupler, idx % per_coupler + 1)
            } else {
                // Uniform over the K-2 other nodes in the source coupler.
                let idx = rng.gen_range(0..per_coupler - 1);
                let dst_local = if idx + 1 >= local { idx + 2 } else { idx + 1 };
                NodeId::new(coupler, dst_local)
            };
            requests.push(ConnectionRequest {
                source,
                destination,
            });
        }
    }
    Ok(RequestBatch { requests })
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(Error::InvalidProbability { name, value });
    }
    Ok(())
}
