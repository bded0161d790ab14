//! Experiment configuration: a single JSON file validated against every
//! module-level invariant before anything runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::montecarlo::SimulationPlan;
use crate::physical::{BerModel, ModulationOrder, SyntheticBerModel, TableBerModel};
use crate::scheduler::{SchedulerPolicy, StartRule, WavelengthPolicy};

/// Iteration start rule, as spelled in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartOption {
    RoundRobin,
    Random,
}

/// Intradomain wavelength assignment, as spelled in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WavelengthOption {
    Random,
    FirstFit,
}

impl std::str::FromStr for WavelengthOption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(WavelengthOption::Random),
            "first-fit" => Ok(WavelengthOption::FirstFit),
            other => Err(Error::ConfigValidation(format!(
                "unknown wavelength policy {other:?} (expected \"random\" or \"first-fit\")"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerOptions {
    pub start: StartOption,
    pub wavelength_policy: WavelengthOption,
    pub physical_occupancy: bool,
}

impl Default for SchedulerOptions {
    fn default() -> Self {
        SchedulerOptions {
            start: StartOption::RoundRobin,
            wavelength_policy: WavelengthOption::Random,
            physical_occupancy: false,
        }
    }
}

/// BER model choice: the shipped synthetic model or an external table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BerModelConfig {
    Synthetic(SyntheticBerModel),
    Table { path: PathBuf },
}

impl Default for BerModelConfig {
    fn default() -> Self {
        BerModelConfig::Synthetic(SyntheticBerModel::default())
    }
}

/// The whole experiment: switch dimensions, grids, seeds, policies and the
/// physical-layer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub wavelength_count: usize,
    pub coupler_ports: usize,
    pub fsr_values: Vec<usize>,
    pub loads: Vec<f64>,
    pub r_inter: f64,
    pub runs: u64,
    pub master_seed: u64,
    pub scheduler: SchedulerOptions,
    pub ber_model: BerModelConfig,
    pub modulations: Vec<u8>,
    pub symbol_rate_gbaud: f64,
    /// Flagging threshold for the estimate-versus-analytic deviation table.
    pub agreement_tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::paper_defaults()
    }
}

impl ExperimentConfig {
    /// The reference operating point: 64 wavelengths, 64-port couplers,
    /// F in {1, 2, 4, 8}, loads 0.1..=1.0, r_inter 0.25, 10,000 runs,
    /// 28 Gbaud, modulations {2, 4, 8}.
    pub fn paper_defaults() -> Self {
        ExperimentConfig {
            wavelength_count: 64,
            coupler_ports: 64,
            fsr_values: vec![1, 2, 4, 8],
            loads: (1..=10).map(|i| i as f64 / 10.0).collect(),
            r_inter: 0.25,
            runs: 10_000,
            master_seed: 1,
            scheduler: SchedulerOptions::default(),
            ber_model: BerModelConfig::default(),
            modulations: vec![2, 4, 8],
            symbol_rate_gbaud: 28.0,
            agreement_tolerance: 0.05,
        }
    }

    /// Parses a config file; JSON syntax errors keep serde's line/column
    /// diagnostics.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::ConfigParse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        Ok(config)
    }

    /// Checks every module-level invariant the runs will rely on.
    pub fn validate(&self) -> Result<()> {
        self.to_plan().validate()?;
        if self.modulations.is_empty() {
            return Err(Error::ConfigValidation("modulations is empty".to_string()));
        }
        for &m in &self.modulations {
            ModulationOrder::from_levels(m)?;
        }
        if !(self.symbol_rate_gbaud > 0.0) {
            return Err(Error::ConfigValidation(format!(
                "symbol_rate_gbaud = {} must be positive",
                self.symbol_rate_gbaud
            )));
        }
        if !(self.agreement_tolerance > 0.0) {
            return Err(Error::ConfigValidation(format!(
                "agreement_tolerance = {} must be positive",
                self.agreement_tolerance
            )));
        }
        if let BerModelConfig::Table { path } = &self.ber_model {
            if !path.is_file() {
                return Err(Error::ConfigValidation(format!(
                    "BER table {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn scheduler_policy(&self) -> SchedulerPolicy {
        SchedulerPolicy {
            start: match self.scheduler.start {
                StartOption::RoundRobin => StartRule::RoundRobin { cycle: 0 },
                StartOption::Random => StartRule::Random,
            },
            wavelength_policy: match self.scheduler.wavelength_policy {
                WavelengthOption::Random => WavelengthPolicy::Random,
                WavelengthOption::FirstFit => WavelengthPolicy::FirstFit,
            },
            physical_occupancy: self.scheduler.physical_occupancy,
        }
    }

    pub fn to_plan(&self) -> SimulationPlan {
        SimulationPlan {
            wavelength_count: self.wavelength_count,
            coupler_ports: self.coupler_ports,
            fsr_values: self.fsr_values.clone(),
            loads: self.loads.clone(),
            r_inter: self.r_inter,
            runs: self.runs,
            master_seed: self.master_seed,
            policy: self.scheduler_policy(),
        }
    }

    /// Instantiates the configured BER model.
    pub fn build_ber_model(&self) -> Result<Box<dyn BerModel>> {
        match &self.ber_model {
            BerModelConfig::Synthetic(model) => Ok(Box::new(model.clone())),
            BerModelConfig::Table { path } => {
                let text = std::fs::read_to_string(path)?;
                Ok(Box::new(TableBerModel::from_csv_str(&text)?))
            }
        }
    }

    /// SHA-256 of the canonical JSON serialization, recorded in every
    /// emitted CSV for provenance.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_defaults_validate() {
        let config = ExperimentConfig::paper_defaults();
        config.validate().unwrap();
        assert_eq!(config.runs, 10_000);
        assert_eq!(config.fsr_values, vec![1, 2, 4, 8]);
        assert_eq!(config.coupler_ports, 64);
        assert_eq!(config.wavelength_count, 64);
        assert_eq!(config.r_inter, 0.25);
        assert_eq!(config.symbol_rate_gbaud, 28.0);
        assert_eq!(config.loads.len(), 10);
    }

    #[test]
    fn indivisible_fsr_is_rejected() {
        let mut config = ExperimentConfig::paper_defaults();
        config.fsr_values = vec![1, 3];
        let err = config.validate().unwrap_err();
        assert!(err.is_validation(), "unexpected error kind: {err:?}");
    }

    #[test]
    fn bad_modulation_is_rejected() {
        let mut config = ExperimentConfig::paper_defaults();
        config.modulations = vec![2, 16];
        assert!(config.validate().is_err());
    }

    #[test]
    fn partial_config_files_fill_defaults() {
        let parsed: ExperimentConfig =
            serde_json::from_str(r#"{ "runs": 7, "master_seed": 42 }"#).unwrap();
        assert_eq!(parsed.runs, 7);
        assert_eq!(parsed.master_seed, 42);
        assert_eq!(parsed.coupler_ports, 64);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let parsed: std::result::Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{ "runz": 7 }"#);
        assert!(parsed.is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::paper_defaults();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.master_seed = 2;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = ExperimentConfig::paper_defaults();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let parsed: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, config);
    }
}
