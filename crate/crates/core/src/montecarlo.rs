//! Blocking-probability estimation by repeated generate-and-schedule cycles.
//!
//! Every run's seed is derived from `(master seed, FSR index, load index,
//! run index)` with a SplitMix64 chain, so results do not depend on thread
//! scheduling or the degree of parallelism, and any single run can be
//! replayed in isolation.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{self, AnalyticInput};
use crate::error::{Error, Result};
use crate::scheduler::{self, ClassCounters, SchedulerPolicy};
use crate::topology::SwitchConfig;
use crate::traffic;

/// One sweep: fixed wavelength budget, the AWG port count derived per FSR
/// value, a load grid, and the run/seed bookkeeping.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub wavelength_count: usize,
    pub coupler_ports: usize,
    pub fsr_values: Vec<usize>,
    pub loads: Vec<f64>,
    pub r_inter: f64,
    pub runs: u64,
    pub master_seed: u64,
    pub policy: SchedulerPolicy,
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::ConfigValidation("runs must be >= 1".to_string()));
        }
        if self.fsr_values.is_empty() {
            return Err(Error::ConfigValidation("fsr_values is empty".to_string()));
        }
        if self.loads.is_empty() {
            return Err(Error::ConfigValidation("loads is empty".to_string()));
        }
        for &fsr in &self.fsr_values {
            self.config_for(fsr)?;
        }
        for &load in &self.loads {
            if !(0.0..=1.0).contains(&load) || load.is_nan() {
                return Err(Error::InvalidProbability {
                    name: "load",
                    value: load,
                });
            }
        }
        if !(0.0..=1.0).contains(&self.r_inter) || self.r_inter.is_nan() {
            return Err(Error::InvalidProbability {
                name: "r_inter",
                value: self.r_inter,
            });
        }
        if self.coupler_ports == 2 && self.r_inter < 1.0 {
            return Err(Error::NoIntraDestinations);
        }
        Ok(())
    }

    /// Switch configuration for one FSR value of the plan.
    pub fn config_for(&self, fsr: usize) -> Result<SwitchConfig> {
        SwitchConfig::from_wavelength_budget(self.wavelength_count, self.coupler_ports, fsr)
    }
}

const BATCH_STREAM: u64 = 0x42;
const SCHEDULE_STREAM: u64 = 0x53;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based per-run seed: a SplitMix64 chain absorbing the master seed
/// and the three grid counters in a fixed order.
pub fn derive_run_seed(master: u64, fsr_index: usize, load_index: usize, run_index: u64) -> u64 {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ fsr_index as u64);
    s = splitmix64(s ^ load_index as u64);
    s = splitmix64(s ^ run_index);
    s
}

/// The two per-run sub-seeds: batch generation and scheduling draw from
/// separate streams of the run seed.
pub fn run_sub_seeds(run_seed: u64) -> (u64, u64) {
    (
        splitmix64(run_seed ^ BATCH_STREAM),
        splitmix64(run_seed ^ SCHEDULE_STREAM),
    )
}

/// Pooled tallies and the blocking-probability estimate for one traffic
/// class at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassEstimate {
    pub offered: u64,
    pub granted: u64,
    pub blocked_wavelength_shortage: u64,
    pub blocked_receiver_busy: u64,
    pub blocked_receiver_contention: u64,
    /// Pooled blocked/offered; `None` when the class saw no requests at all
    /// (undefined, deliberately distinct from zero).
    pub bp: Option<f64>,
    /// Standard error of the per-run blocking ratios; `None` with fewer than
    /// two contributing runs.
    pub std_error: Option<f64>,
}

impl ClassEstimate {
    fn from_runs(totals: ClassCounters, per_run: &[Option<f64>]) -> Self {
        let bp = if totals.offered > 0 {
            Some(totals.blocked() as f64 / totals.offered as f64)
        } else {
            None
        };
        let ratios: Vec<f64> = per_run.iter().flatten().copied().collect();
        let std_error = if ratios.len() >= 2 {
            let n = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / n;
            let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Some((var / n).sqrt())
        } else {
            None
        };
        ClassEstimate {
            offered: totals.offered,
            granted: totals.granted,
            blocked_wavelength_shortage: totals.blocked_wavelength_shortage,
            blocked_receiver_busy: totals.blocked_receiver_busy,
            blocked_receiver_contention: totals.blocked_receiver_contention,
            bp,
            std_error,
        }
    }
}

/// Estimates for one `(FSR, load)` grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BpEstimate {
    pub fsr: usize,
    pub load: f64,
    pub runs: u64,
    pub interdomain: ClassEstimate,
    pub intradomain: ClassEstimate,
}

/// Runs the whole plan. Runs execute in parallel; aggregation is
/// order-independent, so repeated invocations are bit-identical.
pub fn estimate(plan: &SimulationPlan) -> Result<Vec<BpEstimate>> {
    plan.validate()?;
    let mut results = Vec::with_capacity(plan.fsr_values.len() * plan.loads.len());
    for (fsr_index, &fsr) in plan.fsr_values.iter().enumerate() {
        let config = plan.config_for(fsr)?;
        for (load_index, &load) in plan.loads.iter().enumerate() {
            results.push(estimate_point(
                plan, &config, fsr, fsr_index, load, load_index,
            ));
        }
    }
    Ok(results)
}

fn estimate_point(
    plan: &SimulationPlan,
    config: &SwitchConfig,
    fsr: usize,
    fsr_index: usize,
    load: f64,
    load_index: usize,
) -> BpEstimate {
    let tallies: Vec<(ClassCounters, ClassCounters)> = (0..plan.runs)
        .into_par_iter()
        .map(|run| {
            let run_seed = derive_run_seed(plan.master_seed, fsr_index, load_index, run);
            let (batch_seed, schedule_seed) = run_sub_seeds(run_seed);
            let batch = traffic::generate_batch(config, load, plan.r_inter, batch_seed)
                .expect("plan validated");
            let outcome =
                scheduler::schedule(config, &batch, schedule_seed, &plan.policy.for_cycle(run));
            (outcome.interdomain, outcome.intradomain)
        })
        .collect();

    let mut inter_total = ClassCounters::default();
    let mut intra_total = ClassCounters::default();
    let mut inter_ratios = Vec::with_capacity(tallies.len());
    let mut intra_ratios = Vec::with_capacity(tallies.len());
    for (inter, intra) in &tallies {
        accumulate(&mut inter_total, inter);
        accumulate(&mut intra_total, intra);
        inter_ratios.push(run_ratio(inter));
        intra_ratios.push(run_ratio(intra));
    }
    BpEstimate {
        fsr,
        load,
        runs: plan.runs,
        interdomain: ClassEstimate::from_runs(inter_total, &inter_ratios),
        intradomain: ClassEstimate::from_runs(intra_total, &intra_ratios),
    }
}

fn accumulate(total: &mut ClassCounters, part: &ClassCounters) {
    total.offered += part.offered;
    total.granted += part.granted;
    total.blocked_wavelength_shortage += part.blocked_wavelength_shortage;
    total.blocked_receiver_busy += part.blocked_receiver_busy;
    total.blocked_receiver_contention += part.blocked_receiver_contention;
}

fn run_ratio(counters: &ClassCounters) -> Option<f64> {
    if counters.offered > 0 {
        Some(counters.blocked() as f64 / counters.offered as f64)
    } else {
        None
    }
}

/// Which closed form backs an analytic grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AnalyticKind {
    ChainF1,
    ChainF2,
    /// Single-coupler limit, used for every FSR count above two.
    SingleCoupler,
}

impl AnalyticKind {
    pub fn for_fsr(fsr: usize) -> Self {
        match fsr {
            1 => AnalyticKind::ChainF1,
            2 => AnalyticKind::ChainF2,
            _ => AnalyticKind::SingleCoupler,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AnalyticKind::ChainF1 => "chain_f1",
            AnalyticKind::ChainF2 => "chain_f2",
            AnalyticKind::SingleCoupler => "single_coupler",
        }
    }
}

/// Closed-form counterpart of one estimate grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPoint {
    pub fsr: usize,
    pub load: f64,
    pub kind: AnalyticKind,
    pub b_inter: f64,
    pub b_intra: f64,
}

/// Evaluates the closed forms over the plan's grid: the F=1 and F=2 chains
/// where they exist, the single-coupler limit otherwise, and the intradomain
/// chain fed by whichever interdomain total applies.
pub fn analytic_points(plan: &SimulationPlan) -> Result<Vec<AnalyticPoint>> {
    plan.validate()?;
    let mut points = Vec::with_capacity(plan.fsr_values.len() * plan.loads.len());
    for &fsr in &plan.fsr_values {
        let config = plan.config_for(fsr)?;
        for &load in &plan.loads {
            let input = AnalyticInput::new(
                config.awg_ports(),
                config.coupler_ports(),
                load,
                plan.r_inter,
            )?;
            let kind = AnalyticKind::for_fsr(fsr);
            let b_inter = match kind {
                AnalyticKind::ChainF1 => analytics::bp_inter_f1(&input).b_inter,
                AnalyticKind::ChainF2 => analytics::bp_inter_f2(&input).b_inter,
                AnalyticKind::SingleCoupler => analytics::bp_single_coupler(&input),
            };
            let b_intra = analytics::bp_intra(&input, b_inter)?.b_intra;
            points.push(AnalyticPoint {
                fsr,
                load,
                kind,
                b_inter,
                b_intra,
            });
        }
    }
    Ok(points)
}

/// One row of the estimate-versus-analytic comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationRow {
    pub fsr: usize,
    pub load: f64,
    pub kind: AnalyticKind,
    pub mc_b_inter: Option<f64>,
    pub analytic_b_inter: f64,
    pub abs_dev_inter: Option<f64>,
    pub mc_b_intra: Option<f64>,
    pub analytic_b_intra: f64,
    pub abs_dev_intra: Option<f64>,
    /// True when either defined deviation exceeds the report tolerance.
    pub exceeds_tolerance: bool,
}

/// Per-point deviation table between Monte Carlo estimates and the closed
/// forms on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub tolerance: f64,
    pub rows: Vec<DeviationRow>,
    pub max_abs_deviation: Option<f64>,
}

pub fn compare_with_analytics(
    estimates: &[BpEstimate],
    analytics: &[AnalyticPoint],
    tolerance: f64,
) -> Result<DeviationReport> {
    if estimates.len() != analytics.len() {
        return Err(Error::GridMismatch(format!(
            "{} estimates vs {} analytic points",
            estimates.len(),
            analytics.len()
        )));
    }
    let mut rows = Vec::with_capacity(estimates.len());
    let mut max_abs: Option<f64> = None;
    for (estimate, analytic) in estimates.iter().zip(analytics) {
        if estimate.fsr != analytic.fsr || estimate.load != analytic.load {
            return Err(Error::GridMismatch(format!(
                "estimate point (F={}, load={}) vs analytic point (F={}, load={})",
                estimate.fsr, estimate.load, analytic.fsr, analytic.load
            )));
        }
        let abs_dev_inter = estimate
            .interdomain
            .bp
            .map(|bp| (bp - analytic.b_inter).abs());
        let abs_dev_intra = estimate
            .intradomain
            .bp
            .map(|bp| (bp - analytic.b_intra).abs());
        for dev in abs_dev_inter.iter().chain(abs_dev_intra.iter()) {
            max_abs = Some(max_abs.map_or(*dev, |m: f64| m.max(*dev)));
        }
        let exceeds_tolerance = abs_dev_inter.is_some_and(|d| d > tolerance)
            || abs_dev_intra.is_some_and(|d| d > tolerance);
        rows.push(DeviationRow {
            fsr: estimate.fsr,
            load: estimate.load,
            kind: analytic.kind,
            mc_b_inter: estimate.interdomain.bp,
            analytic_b_inter: analytic.b_inter,
            abs_dev_inter,
            mc_b_intra: estimate.intradomain.bp,
            analytic_b_intra: analytic.b_intra,
            abs_dev_intra,
            exceeds_tolerance,
        });
    }
    Ok(DeviationReport {
        tolerance,
        rows,
        max_abs_deviation: max_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(runs: u64) -> SimulationPlan {
        SimulationPlan {
            wavelength_count: 16,
            coupler_ports: 8,
            fsr_values: vec![1, 2],
            loads: vec![0.5],
            r_inter: 0.25,
            runs,
            master_seed: 11,
            policy: SchedulerPolicy::default(),
        }
    }

    #[test]
    fn seed_derivation_is_stable_and_spread() {
        let a = derive_run_seed(1, 0, 0, 0);
        assert_eq!(a, derive_run_seed(1, 0, 0, 0));
        let variants = [
            derive_run_seed(1, 0, 0, 1),
            derive_run_seed(1, 0, 1, 0),
            derive_run_seed(1, 1, 0, 0),
            derive_run_seed(2, 0, 0, 0),
        ];
        for v in variants {
            assert_ne!(a, v);
        }
    }

    #[test]
    fn zero_load_leaves_bp_undefined() {
        let mut p = plan(5);
        p.loads = vec![0.0];
        let estimates = estimate(&p).unwrap();
        for e in estimates {
            assert_eq!(e.interdomain.bp, None);
            assert_eq!(e.intradomain.bp, None);
            assert_eq!(e.interdomain.offered, 0);
        }
    }

    #[test]
    fn estimates_are_reproducible() {
        let p = plan(50);
        assert_eq!(estimate(&p).unwrap(), estimate(&p).unwrap());
    }

    #[test]
    fn single_run_has_no_standard_error() {
        let estimates = estimate(&plan(1)).unwrap();
        assert_eq!(estimates[0].interdomain.std_error, None);
        assert!(estimates[0].interdomain.bp.is_some());
    }

    #[test]
    fn more_fsrs_do_not_hurt_interdomain_blocking() {
        let mut p = plan(400);
        p.loads = vec![0.8];
        let estimates = estimate(&p).unwrap();
        let f1 = estimates[0].interdomain.bp.unwrap();
        let f2 = estimates[1].interdomain.bp.unwrap();
        let slack = 3.0
            * (estimates[0].interdomain.std_error.unwrap()
                + estimates[1].interdomain.std_error.unwrap());
        assert!(
            f2 <= f1 + slack,
            "F=2 blocking {f2} above F=1 blocking {f1} (slack {slack})"
        );
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let mut p = plan(0);
        assert!(estimate(&p).is_err());
        p.runs = 1;
        p.fsr_values = vec![3];
        assert!(p.validate().is_err(), "16 wavelengths not divisible by 3");
        p.fsr_values = vec![1];
        p.loads = vec![1.5];
        assert!(p.validate().is_err());
    }

    #[test]
    fn comparison_flags_and_grids() {
        let p = plan(30);
        let estimates = estimate(&p).unwrap();
        let points = analytic_points(&p).unwrap();
        let report = compare_with_analytics(&estimates, &points, 1.0).unwrap();
        assert_eq!(report.rows.len(), estimates.len());
        assert!(report.rows.iter().all(|r| !r.exceeds_tolerance));
        assert!(report.max_abs_deviation.is_some());

        // Empty grids compare to an empty report.
        let empty = compare_with_analytics(&[], &[], 0.05).unwrap();
        assert!(empty.rows.is_empty());
        assert_eq!(empty.max_abs_deviation, None);

        // Mismatched grids are an input error.
        assert!(compare_with_analytics(&estimates, &points[..1], 0.05).is_err());
        let mut wrong = points.clone();
        wrong.swap(0, 1);
        assert!(compare_with_analytics(&estimates, &wrong, 0.05).is_err());
    }
}
