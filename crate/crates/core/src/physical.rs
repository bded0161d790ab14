//! Cross-layer pipeline: pre-FEC BER models, RS(255,k) rate adaptation and
//! normalized interdomain throughput.
//!
//! The code rate is chosen by bounded-distance analysis of the Reed-Solomon
//! code: with byte error probability `p_s = 1 - (1 - ber)^8` and correction
//! capability `t = (255 - k) / 2`,
//!
//! ```text
//! post-FEC SER ~ (1/255) * sum_{j > t} j * C(255, j) p_s^j (1 - p_s)^(255-j)
//! post-FEC BER ~ post-FEC SER / 8
//! ```
//!
//! and the selector returns the largest odd `k` whose post-FEC BER estimate
//! stays at or below 1e-12. Signals with pre-FEC BER above 3e-2 cannot be
//! retrieved at all.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{derive_run_seed, run_sub_seeds, SimulationPlan};
use crate::scheduler;
use crate::traffic::{self, TrafficClass};

/// RS block length in bytes.
pub const RS_BLOCK_LENGTH: u16 = 255;
/// Post-FEC BER the rate adaptation must reach.
pub const POST_FEC_TARGET: f64 = 1e-12;
/// Pre-FEC BER above which the signal is unrecoverable.
pub const PRE_FEC_CUTOFF: f64 = 3e-2;

/// PAM constellation size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModulationOrder {
    Pam2,
    Pam4,
    Pam8,
}

impl ModulationOrder {
    pub fn from_levels(levels: u8) -> Result<Self> {
        match levels {
            2 => Ok(ModulationOrder::Pam2),
            4 => Ok(ModulationOrder::Pam4),
            8 => Ok(ModulationOrder::Pam8),
            other => Err(Error::ConfigValidation(format!(
                "unsupported modulation order {other} (expected 2, 4 or 8)"
            ))),
        }
    }

    pub fn levels(self) -> u8 {
        match self {
            ModulationOrder::Pam2 => 2,
            ModulationOrder::Pam4 => 4,
            ModulationOrder::Pam8 => 8,
        }
    }

    pub fn bits_per_symbol(self) -> u32 {
        match self {
            ModulationOrder::Pam2 => 1,
            ModulationOrder::Pam4 => 2,
            ModulationOrder::Pam8 => 3,
        }
    }
}

/// Operating point a BER model is queried at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerContext {
    pub fsr: usize,
    pub awg_ports: usize,
    pub wavelength_count: usize,
    pub modulation: ModulationOrder,
    pub load: f64,
    pub class: TrafficClass,
}

/// Pre-FEC BER as a function of the operating point.
///
/// Implementations must return values in [0, 1]; the pipeline rejects
/// anything else as a model-contract violation.
pub trait BerModel: Sync {
    fn pre_fec_ber(&self, ctx: &BerContext) -> Result<f64>;
}

/// Shipped parametric model: `c_M * load^a * (N / N_W)^g`, scaled down for
/// intradomain paths, clamped into [0, 1].
///
/// The constants are synthetic. They are calibrated so 2-PAM is effectively
/// error-free, 4-PAM always stays below the FEC cutoff, and 8-PAM crosses
/// 1e-2 at high load for small FSR counts; absolute values carry no
/// physical meaning beyond those regimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticBerModel {
    pub coefficient_pam2: f64,
    pub coefficient_pam4: f64,
    pub coefficient_pam8: f64,
    pub load_exponent: f64,
    pub port_scale_exponent: f64,
    pub intra_scale: f64,
}

impl Default for SyntheticBerModel {
    fn default() -> Self {
        SyntheticBerModel {
            coefficient_pam2: 1e-13,
            coefficient_pam4: 1e-2,
            coefficient_pam8: 0.6,
            load_exponent: 2.0,
            port_scale_exponent: 2.0,
            intra_scale: 0.1,
        }
    }
}

impl SyntheticBerModel {
    fn coefficient(&self, modulation: ModulationOrder) -> f64 {
        match modulation {
            ModulationOrder::Pam2 => self.coefficient_pam2,
            ModulationOrder::Pam4 => self.coefficient_pam4,
            ModulationOrder::Pam8 => self.coefficient_pam8,
        }
    }
}

impl BerModel for SyntheticBerModel {
    fn pre_fec_ber(&self, ctx: &BerContext) -> Result<f64> {
        let port_scale = ctx.awg_ports as f64 / ctx.wavelength_count as f64;
        let class_scale = match ctx.class {
            TrafficClass::Interdomain => 1.0,
            TrafficClass::Intradomain => self.intra_scale,
        };
        let ber = self.coefficient(ctx.modulation)
            * ctx.load.powf(self.load_exponent)
            * port_scale.powf(self.port_scale_exponent)
            * class_scale;
        Ok(ber.clamp(0.0, 1.0))
    }
}

/// One externally computed table cell.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct BerTableRow {
    pub fsr: usize,
    pub load: f64,
    pub modulation: u8,
    pub ber: f64,
}

/// Table-driven model: bilinear interpolation over (FSR, load) per
/// modulation order, for plugging in externally computed physical-layer
/// results. Queries needing a missing cell or falling outside the table
/// fail with an interpolation-range error.
#[derive(Debug, Clone)]
pub struct TableBerModel {
    rows: Vec<BerTableRow>,
    fsr_grid: Vec<usize>,
    load_grid: Vec<f64>,
}

impl TableBerModel {
    pub fn new(rows: Vec<BerTableRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ConfigValidation("BER table is empty".to_string()));
        }
        for row in &rows {
            if !(0.0..=1.0).contains(&row.ber) || row.ber.is_nan() {
                return Err(Error::ConfigValidation(format!(
                    "BER table value {} outside [0, 1]",
                    row.ber
                )));
            }
            ModulationOrder::from_levels(row.modulation)?;
        }
        let mut fsr_grid: Vec<usize> = rows.iter().map(|r| r.fsr).collect();
        fsr_grid.sort_unstable();
        fsr_grid.dedup();
        let mut load_grid: Vec<f64> = rows.iter().map(|r| r.load).collect();
        load_grid.sort_by(f64::total_cmp);
        load_grid.dedup();
        Ok(TableBerModel {
            rows,
            fsr_grid,
            load_grid,
        })
    }

    /// Parses `fsr,load,modulation,ber` lines; `#` comments and a header
    /// line are skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("fsr,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::ConfigValidation(format!(
                    "BER table line {}: expected 4 fields, got {}",
                    line_no + 1,
                    fields.len()
                )));
            }
            let parse_err = |e: &dyn std::fmt::Display| {
                Error::ConfigValidation(format!("BER table line {}: {e}", line_no + 1))
            };
            rows.push(BerTableRow {
                fsr: fields[0].parse().map_err(|e| parse_err(&e))?,
                load: fields[1].parse().map_err(|e| parse_err(&e))?,
                modulation: fields[2].parse().map_err(|e| parse_err(&e))?,
                ber: fields[3].parse().map_err(|e| parse_err(&e))?,
            });
        }
        Self::new(rows)
    }

    fn cell(&self, fsr: usize, load: f64, modulation: u8) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.fsr == fsr && r.load == load && r.modulation == modulation)
            .map(|r| r.ber)
    }

    fn bracket<T: PartialOrd + Copy>(grid: &[T], value: T) -> Option<(T, T)> {
        if grid.is_empty() || value < grid[0] || value > grid[grid.len() - 1] {
            return None;
        }
        let upper = grid.iter().position(|g| *g >= value)?;
        if grid[upper] == value {
            return Some((value, value));
        }
        Some((grid[upper - 1], grid[upper]))
    }
}

impl BerModel for TableBerModel {
    fn pre_fec_ber(&self, ctx: &BerContext) -> Result<f64> {
        let out_of_range = || Error::InterpolationRange {
            fsr: ctx.fsr as f64,
            load: ctx.load,
            modulation: ctx.modulation.levels(),
        };
        let (f_lo, f_hi) = Self::bracket(&self.fsr_grid, ctx.fsr).ok_or_else(out_of_range)?;
        let (l_lo, l_hi) = Self::bracket(&self.load_grid, ctx.load).ok_or_else(out_of_range)?;
        let m = ctx.modulation.levels();
        let corner = |f: usize, l: f64| self.cell(f, l, m).ok_or_else(out_of_range);
        let tf = if f_hi == f_lo {
            0.0
        } else {
            (ctx.fsr as f64 - f_lo as f64) / (f_hi as f64 - f_lo as f64)
        };
        let tl = if l_hi == l_lo {
            0.0
        } else {
            (ctx.load - l_lo) / (l_hi - l_lo)
        };
        let low = corner(f_lo, l_lo)? * (1.0 - tl) + corner(f_lo, l_hi)? * tl;
        let high = corner(f_hi, l_lo)? * (1.0 - tl) + corner(f_hi, l_hi)? * tl;
        Ok(low * (1.0 - tf) + high * tf)
    }
}

/// Outcome of the rate adaptation for one pre-FEC BER.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FecSelection {
    /// Message bytes: odd, in 1..=255; `None` above the pre-FEC cutoff.
    pub k: Option<u16>,
    /// `k / 255`, or zero when the signal is unrecoverable.
    pub code_rate: f64,
    /// Post-FEC BER estimate at the selected `k`.
    pub post_fec_ber: Option<f64>,
}

// ln(j!) for j = 0..=255, built once.
fn ln_factorials() -> [f64; 256] {
    let mut table = [0.0f64; 256];
    for j in 1..256 {
        table[j] = table[j - 1] + (j as f64).ln();
    }
    table
}

/// Post-FEC BER estimates indexed by correction capability t = 0..=127.
fn post_fec_ber_by_t(symbol_error: f64) -> Vec<f64> {
    let n = RS_BLOCK_LENGTH as usize;
    let mut weighted = vec![0.0f64; n + 1];
    if symbol_error > 0.0 {
        let lnf = ln_factorials();
        let ln_p = symbol_error.ln();
        let ln_q = (-symbol_error).ln_1p();
        for (j, slot) in weighted.iter_mut().enumerate().skip(1) {
            let ln_binom = lnf[n] - lnf[j] - lnf[n - j];
            *slot = j as f64 * (ln_binom + j as f64 * ln_p + (n - j) as f64 * ln_q).exp();
        }
    }
    // tail(t) = sum over j > t of the weighted terms.
    let mut suffix = 0.0;
    let mut tails = vec![0.0f64; n + 1];
    for j in (0..=n).rev() {
        suffix += weighted[j];
        tails[j] = suffix;
    }
    (0..=127).map(|t| tails[t + 1] / n as f64 / 8.0).collect()
}

/// Largest odd `k` with post-FEC BER at or below the target, or `None` when
/// the pre-FEC BER exceeds the cutoff.
pub fn fec_select(pre_fec_ber: f64) -> Result<FecSelection> {
    if !(0.0..=1.0).contains(&pre_fec_ber) || pre_fec_ber.is_nan() {
        return Err(Error::Domain(format!(
            "pre-FEC BER {pre_fec_ber} outside [0, 1]"
        )));
    }
    if pre_fec_ber > PRE_FEC_CUTOFF {
        return Ok(FecSelection {
            k: None,
            code_rate: 0.0,
            post_fec_ber: None,
        });
    }
    let symbol_error = 1.0 - (1.0 - pre_fec_ber).powi(8);
    let by_t = post_fec_ber_by_t(symbol_error);
    for (t, &post) in by_t.iter().enumerate() {
        if post <= POST_FEC_TARGET {
            let k = RS_BLOCK_LENGTH - 2 * t as u16;
            return Ok(FecSelection {
                k: Some(k),
                code_rate: k as f64 / RS_BLOCK_LENGTH as f64,
                post_fec_ber: Some(post),
            });
        }
    }
    // Below the cutoff even t = 127 clears the target by a wide margin.
    unreachable!("no RS(255, k) rate found for pre-FEC BER {pre_fec_ber}")
}

/// Per-grid-point cross-layer results for one modulation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossLayerRow {
    pub fsr: usize,
    pub load: f64,
    pub modulation: u8,
    /// Model BER at the point (interdomain path).
    pub pre_fec_ber: f64,
    pub code_rate: f64,
    /// Per granted connection: `symbol rate * bits/symbol * k / 255` in Gb/s.
    pub effective_rate_gbps: f64,
    /// Mean granted interdomain connections per cycle.
    pub granted_inter_mean: f64,
    /// Mean total interdomain bit rate per cycle, normalized by
    /// `N (K - 1) r_inter`, in Gb/s.
    pub t_inter_gbps: f64,
    pub t_inter_std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossLayerReport {
    pub modulation: u8,
    pub symbol_rate_gbaud: f64,
    pub rows: Vec<CrossLayerRow>,
}

/// Runs the Monte Carlo schedule over the plan's grid and folds the BER
/// model and rate adaptation into normalized interdomain throughput.
///
/// Seeds match [`crate::montecarlo::estimate`] run for run, so grant counts
/// agree with the blocking-probability sweep and are identical across
/// modulation orders.
pub fn evaluate_crosslayer(
    plan: &SimulationPlan,
    model: &dyn BerModel,
    modulation: ModulationOrder,
    symbol_rate_gbaud: f64,
) -> Result<CrossLayerReport> {
    plan.validate()?;
    if !(symbol_rate_gbaud > 0.0) {
        return Err(Error::ConfigValidation(format!(
            "symbol rate {symbol_rate_gbaud} Gbaud must be positive"
        )));
    }
    let mut rows = Vec::with_capacity(plan.fsr_values.len() * plan.loads.len());
    for (fsr_index, &fsr) in plan.fsr_values.iter().enumerate() {
        let config = plan.config_for(fsr)?;
        for (load_index, &load) in plan.loads.iter().enumerate() {
            let ctx = BerContext {
                fsr,
                awg_ports: config.awg_ports(),
                wavelength_count: config.wavelength_count(),
                modulation,
                load,
                class: TrafficClass::Interdomain,
            };
            let ber = model.pre_fec_ber(&ctx)?;
            if !(0.0..=1.0).contains(&ber) || ber.is_nan() {
                return Err(Error::ModelContract { value: ber });
            }
            let fec = fec_select(ber)?;
            let rate_per_connection =
                symbol_rate_gbaud * modulation.bits_per_symbol() as f64 * fec.code_rate;

            let granted: Vec<u64> = (0..plan.runs)
                .into_par_iter()
                .map(|run| {
                    let run_seed = derive_run_seed(plan.master_seed, fsr_index, load_index, run);
                    let (batch_seed, schedule_seed) = run_sub_seeds(run_seed);
                    let batch = traffic::generate_batch(&config, load, plan.r_inter, batch_seed)
                        .expect("plan validated");
                    let outcome = scheduler::schedule(
                        &config,
                        &batch,
                        schedule_seed,
                        &plan.policy.for_cycle(run),
                    );
                    outcome.interdomain.granted
                })
                .collect();

            let runs = plan.runs as f64;
            let granted_mean = granted.iter().sum::<u64>() as f64 / runs;
            let denominator =
                config.awg_ports() as f64 * config.nodes_per_coupler() as f64 * plan.r_inter;
            let normalize = |bitrate: f64| {
                if denominator > 0.0 {
                    bitrate / denominator
                } else {
                    0.0
                }
            };
            let t_inter = normalize(granted_mean * rate_per_connection);
            let t_inter_std_error = if plan.runs >= 2 {
                let mean = granted_mean;
                let var = granted
                    .iter()
                    .map(|&g| (g as f64 - mean).powi(2))
                    .sum::<f64>()
                    / (runs - 1.0);
                Some(normalize((var / runs).sqrt() * rate_per_connection))
            } else {
                None
            };
            rows.push(CrossLayerRow {
                fsr,
                load,
                modulation: modulation.levels(),
                pre_fec_ber: ber,
                code_rate: fec.code_rate,
                effective_rate_gbps: rate_per_connection,
                granted_inter_mean: granted_mean,
                t_inter_gbps: t_inter,
                t_inter_std_error,
            });
        }
    }
    Ok(CrossLayerReport {
        modulation: modulation.levels(),
        symbol_rate_gbaud,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduler::SchedulerPolicy;

    #[test]
    fn error_free_input_selects_the_full_rate() {
        let fec = fec_select(0.0).unwrap();
        assert_eq!(fec.k, Some(255));
        assert_eq!(fec.code_rate, 1.0);
        assert_eq!(fec.post_fec_ber, Some(0.0));
    }

    #[test]
    fn beyond_cutoff_is_unrecoverable() {
        for ber in [0.031, 0.05, 0.5, 1.0] {
            let fec = fec_select(ber).unwrap();
            assert_eq!(fec.k, None);
            assert_eq!(fec.code_rate, 0.0);
        }
    }

    /// Spot values from the exact big-number oracle.
    #[test]
    fn oracle_spot_values() {
        assert_eq!(fec_select(1e-3).unwrap().k, Some(223));
        assert_eq!(fec_select(1e-2).unwrap().k, Some(151));
        assert_eq!(fec_select(0.0299).unwrap().k, Some(51));
        assert_eq!(fec_select(0.03).unwrap().k, Some(51));
    }

    #[test]
    fn cutoff_continuity() {
        assert!(fec_select(PRE_FEC_CUTOFF).unwrap().k.is_some());
        assert!(fec_select(PRE_FEC_CUTOFF + 1e-6).unwrap().k.is_none());
    }

    #[test]
    fn domain_errors() {
        assert!(fec_select(-0.1).is_err());
        assert!(fec_select(1.1).is_err());
        assert!(fec_select(f64::NAN).is_err());
    }

    #[test]
    fn selected_rate_is_nonincreasing_in_ber() {
        let mut last_k = u16::MAX;
        for i in 0..10_000 {
            let ber = 10f64.powf(-12.0 + 10.477 * i as f64 / 9_999.0);
            if ber > PRE_FEC_CUTOFF {
                break;
            }
            let k = fec_select(ber).unwrap().k.unwrap();
            assert!(k <= last_k, "k jumped up at ber {ber}");
            last_k = k;
        }
    }

    #[test]
    fn selected_k_is_odd_and_meets_target() {
        for i in 0..60 {
            let ber = 10f64.powf(-11.0 + 9.0 * i as f64 / 59.0);
            if ber > PRE_FEC_CUTOFF {
                break;
            }
            let fec = fec_select(ber).unwrap();
            let k = fec.k.unwrap();
            assert_eq!(k % 2, 1);
            assert!(fec.post_fec_ber.unwrap() <= POST_FEC_TARGET);
        }
    }

    #[test]
    fn synthetic_model_trends() {
        let model = SyntheticBerModel::default();
        let ctx = |fsr: usize, load: f64, modulation: ModulationOrder| BerContext {
            fsr,
            awg_ports: 64 / fsr,
            wavelength_count: 64,
            modulation,
            load,
            class: TrafficClass::Interdomain,
        };
        let orders = [
            ModulationOrder::Pam2,
            ModulationOrder::Pam4,
            ModulationOrder::Pam8,
        ];
        for &m in &orders {
            for fsr in [1usize, 2, 4, 8] {
                let mut prev = -1.0;
                for i in 1..=10 {
                    let load = i as f64 / 10.0;
                    let ber = model.pre_fec_ber(&ctx(fsr, load, m)).unwrap();
                    assert!((0.0..=1.0).contains(&ber));
                    assert!(ber >= prev, "BER not monotone in load");
                    prev = ber;
                }
            }
            // Nonincreasing in F at a fixed wavelength budget.
            let mut prev = f64::INFINITY;
            for fsr in [1usize, 2, 4, 8] {
                let ber = model.pre_fec_ber(&ctx(fsr, 0.7, m)).unwrap();
                assert!(ber <= prev);
                prev = ber;
            }
        }
        // Nondecreasing in modulation order.
        for w in orders.windows(2) {
            let low = model.pre_fec_ber(&ctx(2, 0.7, w[0])).unwrap();
            let high = model.pre_fec_ber(&ctx(2, 0.7, w[1])).unwrap();
            assert!(high >= low);
        }
        // 2-PAM effectively error-free; 4-PAM always decodable; 8-PAM dies
        // at high load for small FSR counts.
        assert!(
            model
                .pre_fec_ber(&ctx(1, 1.0, ModulationOrder::Pam2))
                .unwrap()
                < POST_FEC_TARGET
        );
        assert!(
            model
                .pre_fec_ber(&ctx(1, 1.0, ModulationOrder::Pam4))
                .unwrap()
                <= PRE_FEC_CUTOFF
        );
        assert!(
            model
                .pre_fec_ber(&ctx(2, 0.5, ModulationOrder::Pam8))
                .unwrap()
                > PRE_FEC_CUTOFF
        );
        // Intradomain paths see fewer impairment stages.
        let inter = model
            .pre_fec_ber(&ctx(2, 0.7, ModulationOrder::Pam8))
            .unwrap();
        let intra = model
            .pre_fec_ber(&BerContext {
                class: TrafficClass::Intradomain,
                ..ctx(2, 0.7, ModulationOrder::Pam8)
            })
            .unwrap();
        assert!(intra <= inter);
    }

    #[test]
    fn table_model_interpolates_and_rejects_gaps() {
        let table = TableBerModel::from_csv_str(
            "fsr,load,modulation,ber\n\
             1,0.1,2,1e-6\n\
             1,0.9,2,1e-4\n\
             2,0.1,2,1e-8\n\
             2,0.9,2,1e-5\n",
        )
        .unwrap();
        let ctx = |fsr: usize, load: f64| BerContext {
            fsr,
            awg_ports: 64 / fsr,
            wavelength_count: 64,
            modulation: ModulationOrder::Pam2,
            load,
            class: TrafficClass::Interdomain,
        };
        // Exact corners.
        assert_eq!(table.pre_fec_ber(&ctx(1, 0.1)).unwrap(), 1e-6);
        assert_eq!(table.pre_fec_ber(&ctx(2, 0.9)).unwrap(), 1e-5);
        // Midpoint in load on the F=1 edge.
        let mid = table.pre_fec_ber(&ctx(1, 0.5)).unwrap();
        assert!((mid - (1e-6 + 1e-4) / 2.0).abs() < 1e-12);
        // Outside the hull.
        assert!(matches!(
            table.pre_fec_ber(&ctx(4, 0.5)),
            Err(Error::InterpolationRange { .. })
        ));
        assert!(matches!(
            table.pre_fec_ber(&ctx(1, 0.95)),
            Err(Error::InterpolationRange { .. })
        ));
        // Missing modulation cell.
        let wrong_m = BerContext {
            modulation: ModulationOrder::Pam4,
            ..ctx(1, 0.5)
        };
        assert!(matches!(
            table.pre_fec_ber(&wrong_m),
            Err(Error::InterpolationRange { .. })
        ));
    }

    #[test]
    fn table_model_rejects_incomplete_bracket() {
        // 2x2 grid with one hole: interpolating inside needs all corners.
        let table =
            TableBerModel::from_csv_str("1,0.1,2,1e-6\n1,0.9,2,1e-4\n2,0.1,2,1e-8\n").unwrap();
        let ctx = BerContext {
            fsr: 2,
            awg_ports: 32,
            wavelength_count: 64,
            modulation: ModulationOrder::Pam2,
            load: 0.5,
            class: TrafficClass::Interdomain,
        };
        assert!(matches!(
            table.pre_fec_ber(&ctx),
            Err(Error::InterpolationRange { .. })
        ));
    }

    struct ConstantBer(f64);

    impl BerModel for ConstantBer {
        fn pre_fec_ber(&self, _ctx: &BerContext) -> Result<f64> {
            Ok(self.0)
        }
    }

    fn small_plan() -> SimulationPlan {
        SimulationPlan {
            wavelength_count: 16,
            coupler_ports: 8,
            fsr_values: vec![4],
            loads: vec![0.6],
            r_inter: 0.25,
            runs: 8,
            master_seed: 3,
            policy: SchedulerPolicy::default(),
        }
    }

    #[test]
    fn zero_load_means_zero_throughput() {
        let mut plan = small_plan();
        plan.loads = vec![0.0];
        let report =
            evaluate_crosslayer(&plan, &ConstantBer(0.0), ModulationOrder::Pam2, 28.0).unwrap();
        assert_eq!(report.rows[0].t_inter_gbps, 0.0);
    }

    /// With an error-free model the throughput is exactly
    /// `28 * mean granted / (N (K-1) r_inter)`, cross-checked against an
    /// independent rerun of the same seeded cycles.
    #[test]
    fn zero_ber_throughput_matches_hand_computation() {
        let plan = small_plan();
        let report =
            evaluate_crosslayer(&plan, &ConstantBer(0.0), ModulationOrder::Pam2, 28.0).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.code_rate, 1.0);
        assert_eq!(row.effective_rate_gbps, 28.0);

        let config = plan.config_for(4).unwrap();
        let mut total_granted = 0u64;
        for run in 0..plan.runs {
            let seed = derive_run_seed(plan.master_seed, 0, 0, run);
            let (batch_seed, schedule_seed) = run_sub_seeds(seed);
            let batch = traffic::generate_batch(&config, 0.6, plan.r_inter, batch_seed).unwrap();
            let outcome =
                scheduler::schedule(&config, &batch, schedule_seed, &plan.policy.for_cycle(run));
            total_granted += outcome.interdomain.granted;
        }
        let mean = total_granted as f64 / plan.runs as f64;
        let expected = 28.0 * mean / (4.0 * 7.0 * 0.25);
        assert!((row.t_inter_gbps - expected).abs() < 1e-12);
        assert!((row.granted_inter_mean - mean).abs() < 1e-12);
    }

    #[test]
    fn effective_rate_formula_is_exact() {
        let plan = small_plan();
        for (m, bits) in [
            (ModulationOrder::Pam2, 1.0),
            (ModulationOrder::Pam4, 2.0),
            (ModulationOrder::Pam8, 3.0),
        ] {
            let report = evaluate_crosslayer(&plan, &ConstantBer(1e-3), m, 28.0).unwrap();
            let row = &report.rows[0];
            let k = fec_select(1e-3).unwrap().k.unwrap() as f64;
            assert_eq!(row.effective_rate_gbps, 28.0 * bits * k / 255.0);
        }
    }

    #[test]
    fn model_contract_violations_are_rejected() {
        let plan = small_plan();
        let result = evaluate_crosslayer(&plan, &ConstantBer(1.5), ModulationOrder::Pam2, 28.0);
        assert!(matches!(result, Err(Error::ModelContract { value }) if value == 1.5));
    }
}
