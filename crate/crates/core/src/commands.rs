//! The command layer behind the CLI: runs the pipelines and emits CSV.
//!
//! Every CSV starts with a provenance comment (config hash and master seed)
//! followed by a header row. Values are comma-separated with `.` decimals
//! and LF line endings; floats print in Rust's shortest round-trip form and
//! undefined values print as empty fields. Given the same config, reruns
//! produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analytics::{self, AnalyticInput};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::montecarlo::{self, BpEstimate, DeviationReport};
use crate::physical::{self, ModulationOrder};

pub const ANALYTIC_FILE: &str = "analytic_bp.csv";
pub const ESTIMATES_FILE: &str = "bp_estimates.csv";
pub const DEVIATION_FILE: &str = "bp_deviation.csv";
pub const CROSSLAYER_FILE: &str = "crosslayer.csv";

fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

fn write_csv(
    out_dir: &Path,
    name: &str,
    config: &ExperimentConfig,
    header: &str,
    rows: &[String],
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let mut text = String::new();
    writeln!(
        text,
        "# config_sha256={} master_seed={}",
        config.hash(),
        config.master_seed
    )
    .expect("string write");
    writeln!(text, "{header}").expect("string write");
    for row in rows {
        writeln!(text, "{row}").expect("string write");
    }
    let path = out_dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Closed-form curves over the load grid: the F=1 and F=2 interdomain
/// chains, the single-coupler limit, and the intradomain chain fed by each.
pub fn cmd_analyze(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let n_w = config.wavelength_count;
    let k = config.coupler_ports;
    let two_fsr_ports = if n_w % 2 == 0 && n_w / 2 >= 2 {
        Some(n_w / 2)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(config.loads.len());
    for &load in &config.loads {
        let f1_input = AnalyticInput::new(n_w, k, load, config.r_inter)?;
        let f1 = analytics::bp_inter_f1(&f1_input);
        let intra_f1 = analytics::bp_intra(&f1_input, f1.b_inter)?;
        let coupler = analytics::bp_single_coupler(&f1_input);
        let intra_coupler = analytics::bp_intra(&f1_input, coupler)?;
        let f2 = match two_fsr_ports {
            Some(n) => {
                let input = AnalyticInput::new(n, k, load, config.r_inter)?;
                let f2 = analytics::bp_inter_f2(&input);
                let intra = analytics::bp_intra(&input, f2.b_inter)?;
                Some((f2.b_inter, intra.b_intra))
            }
            None => None,
        };
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(load),
            fmt_f64(f1.b_inter),
            fmt_opt(f2.map(|(b, _)| b)),
            fmt_f64(coupler),
            fmt_f64(intra_f1.b_intra),
            fmt_opt(f2.map(|(_, b)| b)),
            fmt_f64(intra_coupler.b_intra),
        ));
    }
    let path = write_csv(
        out_dir,
        ANALYTIC_FILE,
        config,
        "load,b_inter_f1,b_inter_f2,b_coupler,b_intra_f1,b_intra_f2,b_intra_coupler",
        &rows,
    )?;
    Ok(vec![path])
}

fn estimate_rows(estimates: &[BpEstimate]) -> Vec<String> {
    estimates
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                e.fsr,
                fmt_f64(e.load),
                e.runs,
                e.interdomain.offered,
                e.interdomain.granted,
                e.interdomain.blocked_wavelength_shortage,
                e.interdomain.blocked_receiver_busy,
                e.interdomain.blocked_receiver_contention,
                fmt_opt(e.interdomain.bp),
                fmt_opt(e.interdomain.std_error),
                e.intradomain.offered,
                e.intradomain.granted,
                e.intradomain.blocked_wavelength_shortage,
                e.intradomain.blocked_receiver_busy,
                e.intradomain.blocked_receiver_contention,
                fmt_opt(e.intradomain.bp),
                fmt_opt(e.intradomain.std_error),
            )
        })
        .collect()
}

const ESTIMATE_HEADER: &str = "fsr,load,runs,inter_offered,inter_granted,\
inter_blocked_wavelength_shortage,inter_blocked_receiver_busy,\
inter_blocked_receiver_contention,b_inter,b_inter_se,intra_offered,\
intra_granted,intra_blocked_wavelength_shortage,intra_blocked_receiver_busy,\
intra_blocked_receiver_contention,b_intra,b_intra_se";

fn deviation_rows(report: &DeviationReport) -> Vec<String> {
    report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.fsr,
                fmt_f64(r.load),
                r.kind.as_str(),
                fmt_opt(r.mc_b_inter),
                fmt_f64(r.analytic_b_inter),
                fmt_opt(r.abs_dev_inter),
                fmt_opt(r.mc_b_intra),
                fmt_f64(r.analytic_b_intra),
                fmt_opt(r.abs_dev_intra),
                r.exceeds_tolerance,
            )
        })
        .collect()
}

const DEVIATION_HEADER: &str = "fsr,load,analytic_kind,mc_b_inter,analytic_b_inter,\
abs_dev_inter,mc_b_intra,analytic_b_intra,abs_dev_intra,exceeds_tolerance";

/// Monte Carlo sweep plus the per-point deviation from the closed forms.
pub fn cmd_simulate(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let plan = config.to_plan();
    let estimates = montecarlo::estimate(&plan)?;
    let analytic = montecarlo::analytic_points(&plan)?;
    let report =
        montecarlo::compare_with_analytics(&estimates, &analytic, config.agreement_tolerance)?;
    let estimates_path = write_csv(
        out_dir,
        ESTIMATES_FILE,
        config,
        ESTIMATE_HEADER,
        &estimate_rows(&estimates),
    )?;
    let deviation_path = write_csv(
        out_dir,
        DEVIATION_FILE,
        config,
        DEVIATION_HEADER,
        &deviation_rows(&report),
    )?;
    Ok(vec![estimates_path, deviation_path])
}

/// BER, code rate and normalized interdomain throughput grids for every
/// configured modulation order.
pub fn cmd_crosslayer(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let plan = config.to_plan();
    let model = config.build_ber_model()?;
    let mut rows = Vec::new();
    for &levels in &config.modulations {
        let modulation = ModulationOrder::from_levels(levels)?;
        let report = physical::evaluate_crosslayer(
            &plan,
            model.as_ref(),
            modulation,
            config.symbol_rate_gbaud,
        )?;
        for r in &report.rows {
            rows.push(format!(
                "{},{},{},{},{},{},{},{},{}",
                r.fsr,
                fmt_f64(r.load),
                r.modulation,
                fmt_f64(r.pre_fec_ber),
                fmt_f64(r.code_rate),
                fmt_f64(r.effective_rate_gbps),
                fmt_f64(r.granted_inter_mean),
                fmt_f64(r.t_inter_gbps),
                fmt_opt(r.t_inter_std_error),
            ));
        }
    }
    let path = write_csv(
        out_dir,
        CROSSLAYER_FILE,
        config,
        "fsr,load,modulation,pre_fec_ber,code_rate,effective_rate_gbps,\
granted_inter_mean,t_inter_gbps,t_inter_se",
        &rows,
    )?;
    Ok(vec![path])
}

/// The full pipeline: analyze, simulate and crosslayer into one directory.
pub fn cmd_sweep(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = cmd_analyze(config, out_dir)?;
    paths.extend(cmd_simulate(config, out_dir)?);
    paths.extend(cmd_crosslayer(config, out_dir)?);
    Ok(paths)
}
