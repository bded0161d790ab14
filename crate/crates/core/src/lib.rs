//! Simulator and analytical toolkit for a distributed multicast switch that
//! couples an `N x N` arrayed waveguide grating (AWG) with `N` star couplers
//! and exploits multiple AWG free spectral ranges (FSRs) to widen the
//! interdomain bottleneck.
//!
//! The crate provides:
//!
//! * [`topology`]: the cyclic AWG routing function, per-link wavelength sets
//!   and their fairness partition;
//! * [`traffic`]: per-cycle request generation (Bernoulli sources, uniform
//!   destinations);
//! * [`scheduler`]: the two-phase multi-FSR scheduling algorithm
//!   (interdomain with a work-conserving retry pass, then intradomain);
//! * [`analytics`]: closed-form blocking-probability approximations;
//! * [`montecarlo`]: seeded, parallel blocking-probability estimation with
//!   analytic comparison;
//! * [`physical`]: pre-FEC BER models, RS(255,k) rate adaptation and
//!   normalized interdomain throughput;
//! * [`config`] / [`commands`]: experiment configuration and the CSV-emitting
//!   command layer used by the CLI.

pub mod analytics;
pub mod commands;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod physical;
pub mod scheduler;
pub mod topology;
pub mod traffic;

pub use error::{Error, Result};
pub use topology::{Link, SwitchConfig, WavelengthId};
pub use traffic::{ConnectionRequest, NodeId, RequestBatch, TrafficClass};
