//! Two-phase multi-FSR scheduling of one cycle's request batch.
//!
//! Phase one serves interdomain traffic per destination coupler: nodes with
//! the fewest pending requests go first, the two directions of a coupler pair
//! draw from disjoint halves of the link wavelength set, and a second pass
//! retries wavelength-shortage blocks against the full set so no request is
//! refused while a usable wavelength remains. Phase two serves each coupler's
//! intradomain traffic from whatever wavelengths the coupler has left.
//!
//! All randomness comes from one seeded generator consumed in a fixed,
//! documented order, so a cycle is replayable from `(seed, policy)`:
//!
//! 1. interdomain pass-1 start coupler (random-start policy only);
//! 2. per decision: node tie-break, then source pick, then wavelength pick
//!    (a draw happens only when there are at least two candidates);
//! 3. interdomain pass-2 start coupler (random-start policy only);
//! 4. pass-2 decisions as in 2;
//! 5. per coupler with intradomain demand, in ascending coupler order: start
//!    node (random-start policy only), then decisions as in 2.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::topology::{self, Link, SwitchConfig, WavelengthId};
use crate::traffic::{NodeId, RequestBatch, TrafficClass};

/// Why a request was denied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockReason {
    /// No usable wavelength was left on the request's link (or in its
    /// coupler, for intradomain traffic).
    WavelengthShortage,
    /// The destination receiver was already claimed by an earlier grant.
    ReceiverBusy,
    /// The request lost the random draw among requests to a free receiver.
    ReceiverContention,
}

impl BlockReason {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockReason::WavelengthShortage => "wavelength_shortage",
            BlockReason::ReceiverBusy => "receiver_busy",
            BlockReason::ReceiverContention => "receiver_contention",
        }
    }
}

/// Outcome of a single request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Granted(WavelengthId),
    Blocked(BlockReason),
}

impl Decision {
    pub fn is_granted(self) -> bool {
        matches!(self, Decision::Granted(_))
    }
}

/// Grant/block tallies for one traffic class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounters {
    pub offered: u64,
    pub granted: u64,
    pub blocked_wavelength_shortage: u64,
    pub blocked_receiver_busy: u64,
    pub blocked_receiver_contention: u64,
}

impl ClassCounters {
    pub fn blocked(&self) -> u64 {
        self.blocked_wavelength_shortage
            + self.blocked_receiver_busy
            + self.blocked_receiver_contention
    }

    fn record(&mut self, decision: Decision) {
        self.offered += 1;
        match decision {
            Decision::Granted(_) => self.granted += 1,
            Decision::Blocked(BlockReason::WavelengthShortage) => {
                self.blocked_wavelength_shortage += 1
            }
            Decision::Blocked(BlockReason::ReceiverBusy) => self.blocked_receiver_busy += 1,
            Decision::Blocked(BlockReason::ReceiverContention) => {
                self.blocked_receiver_contention += 1
            }
        }
    }
}

/// Per-request decisions plus per-class tallies for one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleOutcome {
    /// Parallel to the batch's request list.
    pub decisions: Vec<Decision>,
    pub interdomain: ClassCounters,
    pub intradomain: ClassCounters,
}

impl ScheduleOutcome {
    fn from_decisions(batch: &RequestBatch, decisions: Vec<Decision>) -> Self {
        let mut interdomain = ClassCounters::default();
        let mut intradomain = ClassCounters::default();
        for (request, decision) in batch.requests().iter().zip(&decisions) {
            match request.class() {
                TrafficClass::Interdomain => interdomain.record(*decision),
                TrafficClass::Intradomain => intradomain.record(*decision),
            }
        }
        ScheduleOutcome {
            decisions,
            interdomain,
            intradomain,
        }
    }

    /// Renders the cycle as line-oriented text (one line per request, batch
    /// order) for debugging and replay comparisons.
    pub fn render_trace(&self, batch: &RequestBatch) -> String {
        let mut out = String::new();
        for (request, decision) in batch.requests().iter().zip(&self.decisions) {
            let kind = match request.class() {
                TrafficClass::Interdomain => "inter",
                TrafficClass::Intradomain => "intra",
            };
            match decision {
                Decision::Granted(w) => out.push_str(&format!(
                    "grant kind={kind} src={} dst={} wl={w}\n",
                    request.source, request.destination
                )),
                Decision::Blocked(reason) => out.push_str(&format!(
                    "block kind={kind} src={} dst={} reason={}\n",
                    request.source,
                    request.destination,
                    reason.as_str()
                )),
            }
        }
        out
    }
}

/// How iteration starting points are chosen each cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartRule {
    /// Deterministic pointer advanced once per cycle by the caller.
    RoundRobin { cycle: u64 },
    /// Fresh uniform draw from the cycle's generator.
    Random,
}

/// Wavelength choice for intradomain grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavelengthPolicy {
    Random,
    FirstFit,
}

/// Scheduling options for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchedulerPolicy {
    pub start: StartRule,
    pub wavelength_policy: WavelengthPolicy,
    /// Also mark granted interdomain wavelengths in the source coupler, where
    /// the transmitter physically broadcasts. Off by default: occupancy is
    /// tracked at the destination coupler only.
    pub physical_occupancy: bool,
}

impl Default for SchedulerPolicy {
    fn default() -> Self {
        SchedulerPolicy {
            start: StartRule::RoundRobin { cycle: 0 },
            wavelength_policy: WavelengthPolicy::Random,
            physical_occupancy: false,
        }
    }
}

impl SchedulerPolicy {
    /// Returns the policy with the round-robin pointer set for `cycle`;
    /// a no-op under the random-start rule.
    pub fn for_cycle(mut self, cycle: u64) -> Self {
        if let StartRule::RoundRobin { cycle: c } = &mut self.start {
            *c = cycle;
        }
        self
    }
}

/// Wavelength usage and receiver occupancy evolving during one cycle.
///
/// `used(c)` holds the wavelengths present in coupler `c`'s broadcast medium
/// from the tracked (receiver-side) perspective. The remaining-wavelength
/// view of an AWG link is derived from both endpoint couplers, which is what
/// keeps a wavelength from serving `i -> j` and `j -> i` at once.
#[derive(Debug, Clone)]
pub struct OccupancyState {
    wavelength_used: Vec<bool>,
    receiver_busy: Vec<bool>,
    wavelength_count: usize,
    nodes_per_coupler: usize,
}

impl OccupancyState {
    pub fn new(config: &SwitchConfig) -> Self {
        OccupancyState {
            wavelength_used: vec![false; config.awg_ports() * config.wavelength_count()],
            receiver_busy: vec![false; config.total_nodes()],
            wavelength_count: config.wavelength_count(),
            nodes_per_coupler: config.nodes_per_coupler(),
        }
    }

    pub fn wavelength_used(&self, coupler: usize, wavelength: WavelengthId) -> bool {
        self.wavelength_used[(coupler - 1) * self.wavelength_count + wavelength.slot()]
    }

    pub fn mark_wavelength_used(&mut self, coupler: usize, wavelength: WavelengthId) {
        self.wavelength_used[(coupler - 1) * self.wavelength_count + wavelength.slot()] = true;
    }

    pub fn receiver_busy(&self, node: NodeId) -> bool {
        self.receiver_busy[(node.coupler - 1) * self.nodes_per_coupler + node.local - 1]
    }

    pub fn mark_receiver_busy(&mut self, node: NodeId) {
        self.receiver_busy[(node.coupler - 1) * self.nodes_per_coupler + node.local - 1] = true;
    }

    /// Wavelengths still usable on `link`: members of the link set unused in
    /// both endpoint couplers, ascending.
    pub fn link_remaining(&self, config: &SwitchConfig, link: Link) -> Vec<WavelengthId> {
        topology::link_wavelengths(config, link)
            .expect("valid link")
            .into_iter()
            .filter(|&w| {
                !self.wavelength_used(link.input, w) && !self.wavelength_used(link.output, w)
            })
            .collect()
    }

    /// Wavelengths unused inside `coupler`, ascending.
    pub fn coupler_remaining(&self, coupler: usize) -> Vec<WavelengthId> {
        (1..=self.wavelength_count)
            .map(WavelengthId)
            .filter(|&w| !self.wavelength_used(coupler, w))
            .collect()
    }
}

/// Runs both scheduling phases on a fresh state and returns every request's
/// decision. Blocking is a result, not an error.
///
/// The batch must have been built for `config` (node indices in range);
/// this is a precondition, violations panic.
pub fn schedule(
    config: &SwitchConfig,
    batch: &RequestBatch,
    seed: u64,
    policy: &SchedulerPolicy,
) -> ScheduleOutcome {
    assert_batch_matches(config, batch);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = OccupancyState::new(config);
    let mut decisions = vec![None; batch.len()];
    interdomain_phase(config, batch, &mut state, &mut rng, policy, &mut decisions);
    intradomain_phase(config, batch, &mut state, &mut rng, policy, &mut decisions);
    let decisions = decisions
        .into_iter()
        .map(|d| d.expect("every request decided"))
        .collect();
    ScheduleOutcome::from_decisions(batch, decisions)
}

/// Phase one only: schedules the batch's interdomain requests on `state` and
/// returns `(request index, decision)` pairs.
pub fn schedule_interdomain<R: Rng>(
    config: &SwitchConfig,
    batch: &RequestBatch,
    state: &mut OccupancyState,
    rng: &mut R,
    policy: &SchedulerPolicy,
) -> Vec<(usize, Decision)> {
    assert_batch_matches(config, batch);
    let mut decisions = vec![None; batch.len()];
    interdomain_phase(config, batch, state, rng, policy, &mut decisions);
    collect_decided(decisions)
}

/// Phase two only. `state` must already reflect the interdomain phase.
pub fn schedule_intradomain<R: Rng>(
    config: &SwitchConfig,
    batch: &RequestBatch,
    state: &mut OccupancyState,
    rng: &mut R,
    policy: &SchedulerPolicy,
) -> Vec<(usize, Decision)> {
    assert_batch_matches(config, batch);
    let mut decisions = vec![None; batch.len()];
    intradomain_phase(config, batch, state, rng, policy, &mut decisions);
    collect_decided(decisions)
}

fn collect_decided(decisions: Vec<Option<Decision>>) -> Vec<(usize, Decision)> {
    decisions
        .into_iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|d| (i, d)))
        .collect()
}

fn assert_batch_matches(config: &SwitchConfig, batch: &RequestBatch) {
    for request in batch.requests() {
        for node in [request.source, request.destination] {
            assert!(
                node.coupler >= 1
                    && node.coupler <= config.awg_ports()
                    && node.local >= 1
                    && node.local <= config.nodes_per_coupler(),
                "batch node {node} does not fit the switch configuration"
            );
        }
    }
}

/// Which portion of a link's wavelength set a pass may draw from.
#[derive(Clone, Copy, PartialEq, Eq)]
enum DrawScope {
    /// Direction-dependent half: `w1` when source > destination, `w2` when
    /// source < destination.
    FairHalf,
    /// The whole link set (retry pass, and the single-FSR case where the
    /// set cannot be split).
    Full,
}

fn start_index<R: Rng>(rule: StartRule, rng: &mut R, len: usize) -> usize {
    match rule {
        StartRule::RoundRobin { cycle } => (cycle % len as u64) as usize,
        StartRule::Random => {
            if len > 1 {
                rng.gen_range(0..len)
            } else {
                0
            }
        }
    }
}

fn pick<R: Rng, T: Copy>(rng: &mut R, candidates: &[T]) -> T {
    debug_assert!(!candidates.is_empty());
    if candidates.len() == 1 {
        candidates[0]
    } else {
        candidates[rng.gen_range(0..candidates.len())]
    }
}

fn interdomain_phase<R: Rng>(
    config: &SwitchConfig,
    batch: &RequestBatch,
    state: &mut OccupancyState,
    rng: &mut R,
    policy: &SchedulerPolicy,
    decisions: &mut [Option<Decision>],
) {
    let n = config.awg_ports();
    // Pass 1: fairness halves (full set when F = 1, which cannot be split).
    let scope = if config.fsr_count() == 1 {
        DrawScope::Full
    } else {
        DrawScope::FairHalf
    };
    let mut pending_by_coupler: Vec<Vec<Vec<usize>>> =
        vec![vec![Vec::new(); config.nodes_per_coupler()]; n];
    for (index, request) in batch.requests().iter().enumerate() {
        if request.class() == TrafficClass::Interdomain {
            // Receivers can be busy on entry when the caller supplies a
            // pre-occupied state; those requests cannot be served.
            if state.receiver_busy(request.destination) {
                decisions[index] = Some(Decision::Blocked(BlockReason::ReceiverBusy));
                continue;
            }
            pending_by_coupler[request.destination.coupler - 1][request.destination.local - 1]
                .push(index);
        }
    }

    let mut shortage_blocked: Vec<usize> = Vec::new();
    let start = start_index(policy.start, rng, n);
    for step in 0..n {
        let coupler = (start + step) % n + 1;
        let pending = std::mem::take(&mut pending_by_coupler[coupler - 1]);
        serve_destination_coupler(
            config,
            batch,
            state,
            rng,
            policy,
            coupler,
            pending,
            scope,
            decisions,
            &mut shortage_blocked,
        );
    }

    if config.fsr_count() < 2 || shortage_blocked.is_empty() {
        return;
    }

    // Pass 2: restore wavelength-shortage blocks whose receiver is still free
    // and retry against the full link set. A retry can never succeed on a
    // busy receiver, so those stay blocked and are relabeled accordingly.
    let mut retry_by_coupler: Vec<Vec<Vec<usize>>> =
        vec![vec![Vec::new(); config.nodes_per_coupler()]; n];
    for index in shortage_blocked {
        let destination = batch.requests()[index].destination;
        if state.receiver_busy(destination) {
            decisions[index] = Some(Decision::Blocked(BlockReason::ReceiverBusy));
        } else {
            decisions[index] = None;
            retry_by_coupler[destination.coupler - 1][destination.local - 1].push(index);
        }
    }
    let mut final_shortage = Vec::new();
    let start = start_index(policy.start, rng, n);
    for step in 0..n {
        let coupler = (start + step) % n + 1;
        let pending = std::mem::take(&mut retry_by_coupler[coupler - 1]);
        serve_destination_coupler(
            config,
            batch,
            state,
            rng,
            policy,
            coupler,
            pending,
            DrawScope::Full,
            decisions,
            &mut final_shortage,
        );
    }
}

/// Grants or blocks every pending interdomain request destined to `coupler`:
/// repeatedly picks a destination node with the minimum nonzero pending
/// count, a random requesting source, and a random usable wavelength from
/// the scoped set.
#[allow(clippy::too_many_arguments)]
fn serve_destination_coupler<R: Rng>(
    config: &SwitchConfig,
    batch: &RequestBatch,
    state: &mut OccupancyState,
    rng: &mut R,
    policy: &SchedulerPolicy,
    coupler: usize,
    mut pending: Vec<Vec<usize>>,
    scope: DrawScope,
    decisions: &mut [Option<Decision>],
    shortage_blocked: &mut Vec<usize>,
) {
    loop {
        let min = match pending
            .iter()
            .filter(|reqs| !reqs.is_empty())
            .map(Vec::len)
            .min()
        {
            Some(min) => min,
            None => return,
        };
        let candidates: Vec<usize> = (0..pending.len())
            .filter(|&node| pending[node].len() == min)
            .collect();
        let node = pick(rng, &candidates);
        let slot = if pending[node].len() == 1 {
            0
        } else {
            rng.gen_range(0..pending[node].len())
        };
        let index = pending[node].remove(slot);
        let request = &batch.requests()[index];
        let source = request.source.coupler;
        let available = scoped_available(config, state, source, coupler, scope);
        if available.is_empty() {
            decisions[index] = Some(Decision::Blocked(BlockReason::WavelengthShortage));
            shortage_blocked.push(index);
            continue;
        }
        let wavelength = pick(rng, &available);
        state.mark_wavelength_used(coupler, wavelength);
        if policy.physical_occupancy {
            state.mark_wavelength_used(source, wavelength);
        }
        state.mark_receiver_busy(request.destination);
        decisions[index] = Some(Decision::Granted(wavelength));
        // The node is matched; whatever it still had pending is now refused.
        for other in pending[node].drain(..) {
            decisions[other] = Some(Decision::Blocked(BlockReason::ReceiverBusy));
        }
    }
}

fn scoped_available(
    config: &SwitchConfig,
    state: &OccupancyState,
    source: usize,
    destination: usize,
    scope: DrawScope,
) -> Vec<WavelengthId> {
    let link = Link::new(source, destination);
    let usable = |w: &WavelengthId| {
        !state.wavelength_used(source, *w) && !state.wavelength_used(destination, *w)
    };
    match scope {
        DrawScope::Full => topology::link_wavelengths(config, link)
            .expect("valid link")
            .into_iter()
            .filter(usable)
            .collect(),
        DrawScope::FairHalf => {
            let partition = topology::partition(config, link).expect("F >= 2");
            let half = if source > destination {
                partition.w1
            } else {
                partition.w2
            };
            half.into_iter().filter(usable).collect()
        }
    }
}

fn intradomain_phase<R: Rng>(
    config: &SwitchConfig,
    batch: &RequestBatch,
    state: &mut OccupancyState,
    rng: &mut R,
    policy: &SchedulerPolicy,
    decisions: &mut [Option<Decision>],
) {
    let nodes = config.nodes_per_coupler();
    let mut pending_by_coupler: Vec<Vec<Vec<usize>>> =
        vec![vec![Vec::new(); nodes]; config.awg_ports()];
    let mut demand = vec![false; config.awg_ports()];
    for (index, request) in batch.requests().iter().enumerate() {
        if request.class() == TrafficClass::Intradomain {
            pending_by_coupler[request.destination.coupler - 1][request.destination.local - 1]
                .push(index);
            demand[request.destination.coupler - 1] = true;
        }
    }

    for coupler in 1..=config.awg_ports() {
        if !demand[coupler - 1] {
            continue;
        }
        let mut pending = std::mem::take(&mut pending_by_coupler[coupler - 1]);
        let start = start_index(policy.start, rng, nodes);
        // Set once the coupler's wavelength pool runs dry: scheduling stops
        // and the remaining examined requests are only labeled.
        let mut exhausted = false;
        for step in 0..nodes {
            let local = (start + step) % nodes;
            let requests = std::mem::take(&mut pending[local]);
            if requests.is_empty() {
                continue;
            }
            let destination = NodeId::new(coupler, local + 1);
            if state.receiver_busy(destination) {
                for index in requests {
                    decisions[index] = Some(Decision::Blocked(BlockReason::ReceiverBusy));
                }
                continue;
            }
            if exhausted {
                for index in requests {
                    decisions[index] = Some(Decision::Blocked(BlockReason::WavelengthShortage));
                }
                continue;
            }
            let slot = if requests.len() == 1 {
                0
            } else {
                rng.gen_range(0..requests.len())
            };
            let available = state.coupler_remaining(coupler);
            if available.is_empty() {
                exhausted = true;
                for index in requests {
                    decisions[index] = Some(Decision::Blocked(BlockReason::WavelengthShortage));
                }
                continue;
            }
            let wavelength = match policy.wavelength_policy {
                WavelengthPolicy::FirstFit => available[0],
                WavelengthPolicy::Random => pick(rng, &available),
            };
            state.mark_wavelength_used(coupler, wavelength);
            state.mark_receiver_busy(destination);
            for (position, index) in requests.into_iter().enumerate() {
                decisions[index] = Some(if position == slot {
                    Decision::Granted(wavelength)
                } else {
                    Decision::Blocked(BlockReason::ReceiverContention)
                });
            }
        }
    }
}
