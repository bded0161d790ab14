//! Closed-form blocking-probability approximations.
//!
//! The chains replace every random variable with its mean, so occupancy
//! arguments are real-valued. The occupancy formula is clamped to [0, 1]:
//! its continuous extension dips below zero for mean arrivals under one,
//! where blocking is impossible anyway.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean interdomain blocking of a nonblocking stage: `k_in` requests aimed
/// uniformly at `k_out` outputs, one winner per contested output.
///
/// Accepts real-valued `k_in >= 0` (the chains feed means); returns 0 for
/// `k_in = 0` and clamps to [0, 1].
pub fn bp_occupancy(k_in: f64, k_out: f64) -> Result<f64> {
    if !(k_in >= 0.0) {
        return Err(Error::Domain(format!("k_in = {k_in} must be >= 0")));
    }
    if !(k_out > 0.0) {
        return Err(Error::Domain(format!("k_out = {k_out} must be > 0")));
    }
    if k_in == 0.0 {
        return Ok(0.0);
    }
    let idle = k_out * (1.0 - 1.0 / k_out).powf(k_in);
    let raw = 1.0 - (k_out - idle) / k_in;
    Ok(raw.clamp(0.0, 1.0))
}

/// Parameters shared by every chain: switch dimensions and the offered load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticInput {
    pub awg_ports: usize,
    pub coupler_ports: usize,
    pub load: f64,
    pub r_inter: f64,
}

impl AnalyticInput {
    pub fn new(awg_ports: usize, coupler_ports: usize, load: f64, r_inter: f64) -> Result<Self> {
        if awg_ports < 2 || coupler_ports < 2 {
            return Err(Error::InvalidDimensions(format!(
                "awg_ports = {awg_ports}, coupler_ports = {coupler_ports} (both must be >= 2)"
            )));
        }
        for (name, value) in [("load", load), ("r_inter", r_inter)] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(AnalyticInput {
            awg_ports,
            coupler_ports,
            load,
            r_inter,
        })
    }

    /// Mean interdomain requests per coupler: `r_inter * (K - 1) * load`.
    pub fn mean_interdomain_per_coupler(&self) -> f64 {
        self.r_inter * (self.coupler_ports as f64 - 1.0) * self.load
    }
}

/// Step-by-step breakdown of the single-FSR interdomain chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterF1Breakdown {
    pub m1: f64,
    /// Source-side contention for the N-1 outgoing links.
    pub b1: f64,
    pub m2: f64,
    /// Loss to the reverse direction of the coupler pair.
    pub b2: f64,
    pub m3: f64,
    /// Receiver contention across all N(K-1) destinations.
    pub b3: f64,
    pub b_inter: f64,
}

/// Interdomain blocking with one FSR: every connection runs the three
/// stages in sequence, so the total is the product composition.
pub fn bp_inter_f1(input: &AnalyticInput) -> InterF1Breakdown {
    let n = input.awg_ports as f64;
    let k = input.coupler_ports as f64;
    let m1 = input.mean_interdomain_per_coupler();
    let b1 = bp_occupancy(m1, n - 1.0).expect("validated input");
    let m2 = m1 * (1.0 - b1);
    let b2 = m2 / (2.0 * (n - 1.0));
    let m3 = n * m2 * (1.0 - b2);
    let b3 = bp_occupancy(m3, n * (k - 1.0)).expect("validated input");
    let b_inter = 1.0 - (1.0 - b1) * (1.0 - b2) * (1.0 - b3);
    InterF1Breakdown {
        m1,
        b1,
        m2,
        b2,
        m3,
        b3,
        b_inter,
    }
}

/// Step-by-step breakdown of the two-FSR interdomain chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterF2Breakdown {
    pub m1: f64,
    pub b1: f64,
    /// Always zero: two wavelengths cover both directions in round one.
    pub b2: f64,
    pub m2: f64,
    pub m3: f64,
    pub b3: f64,
    /// Round-two draw among the round-one leftovers.
    pub b4: f64,
    /// Both pair wavelengths already consumed by round one.
    pub b5: f64,
    pub m4: f64,
    /// Round-two connection aimed at a receiver taken in round one.
    pub b6_busy: f64,
    pub m5: f64,
    /// Contention among round-two connections on the free receivers.
    pub b6_contention: f64,
    pub b_inter: f64,
    /// Set when the busy-receiver mean saturates the receiver population.
    pub saturated: bool,
}

/// Interdomain blocking with two FSRs.
///
/// The scheduler this approximates runs the three-stage draw twice: a
/// connection either wins round one (facing steps 2 and 3) or is deferred
/// to round two (facing steps 4, 5 and 6). The rounds act on disjoint
/// populations, so the total blocking is the complement of the two-path
/// service mixture, not a product over all six steps.
pub fn bp_inter_f2(input: &AnalyticInput) -> InterF2Breakdown {
    let n = input.awg_ports as f64;
    let k = input.coupler_ports as f64;
    let receivers = n * (k - 1.0);
    let m1 = input.mean_interdomain_per_coupler();
    let b1 = bp_occupancy(m1, n - 1.0).expect("validated input");
    let b2 = 0.0;
    let m2 = m1 * (1.0 - b1);
    let m3 = n * m2 * (1.0 - b2);
    let b3 = bp_occupancy(m3, receivers).expect("validated input");
    let b4 = bp_occupancy(b1 * m1, n - 1.0).expect("validated input");
    let b5 = m2 / (n - 1.0);
    let m4 = n * m1 * (1.0 - b1) * (1.0 - b3);
    let saturated = m4 >= receivers;
    let (b6_busy, m5, b6_contention) = if saturated {
        (1.0, 0.0, 0.0)
    } else {
        let b6_busy = m4 / receivers;
        let m5 = n * b1 * m1 * (1.0 - b4) * (1.0 - b5) * (1.0 - b6_busy);
        let b6_contention = bp_occupancy(m5, receivers - m4).expect("validated input");
        (b6_busy, m5, b6_contention)
    };
    let served_round_one = (1.0 - b1) * (1.0 - b2) * (1.0 - b3);
    let served_round_two = b1 * (1.0 - b4) * (1.0 - b5) * (1.0 - b6_busy) * (1.0 - b6_contention);
    let b_inter = 1.0 - (served_round_one + served_round_two);
    InterF2Breakdown {
        m1,
        b1,
        b2,
        m2,
        m3,
        b3,
        b4,
        b5,
        m4,
        b6_busy,
        m5,
        b6_contention,
        b_inter,
        saturated,
    }
}

/// Intradomain chain: busy receivers left by the interdomain phase, then
/// contention for the free ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntraBreakdown {
    /// Mean receivers per coupler claimed by interdomain grants.
    pub n_b: f64,
    pub n_f: f64,
    pub b_l1: f64,
    pub b_l2: f64,
    pub b_intra: f64,
    pub saturated: bool,
}

/// Intradomain blocking given the interdomain total `b_inter`.
pub fn bp_intra(input: &AnalyticInput, b_inter: f64) -> Result<IntraBreakdown> {
    if !(0.0..=1.0).contains(&b_inter) || b_inter.is_nan() {
        return Err(Error::InvalidProbability {
            name: "b_inter",
            value: b_inter,
        });
    }
    let k = input.coupler_ports as f64;
    let m1 = input.mean_interdomain_per_coupler();
    let n_b = m1 * (1.0 - b_inter);
    let n_f = k - 1.0 - n_b;
    if n_f <= 0.0 {
        return Ok(IntraBreakdown {
            n_b,
            n_f,
            b_l1: 1.0,
            b_l2: 1.0,
            b_intra: 1.0,
            saturated: true,
        });
    }
    let b_l1 = n_b / (k - 1.0);
    let offered = (1.0 - input.r_inter) * (1.0 - b_l1) * (k - 1.0) * input.load;
    let b_l2 = bp_occupancy(offered, n_f)?;
    let b_intra = 1.0 - (1.0 - b_l1) * (1.0 - b_l2);
    Ok(IntraBreakdown {
        n_b,
        n_f,
        b_l1,
        b_l2,
        b_intra,
        saturated: false,
    })
}

/// Single-coupler limit: a K-port nonblocking switch fed the same mean
/// interdomain load. Approximates the interdomain blocking for large FSR
/// counts, where wavelength shortage vanishes and contention dominates.
pub fn bp_single_coupler(input: &AnalyticInput) -> f64 {
    bp_occupancy(
        input.mean_interdomain_per_coupler(),
        input.coupler_ports as f64,
    )
    .expect("validated input")
}
