//! Command-line front end: configuration ingestion, experiment orchestration
//! and CSV emission.
//!
//! Exit codes: 0 on success, 2 for configuration/validation problems
//! (including CLI usage errors), 3 for runtime failures such as BER-model
//! contract violations, table interpolation gaps or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fsrswitch::commands;
use fsrswitch::config::{ExperimentConfig, WavelengthOption};

const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fsrswitch",
    version,
    about = "AWG multi-FSR distributed multicast switch: analytics, Monte Carlo and cross-layer sweeps",
    after_help = "Flags override FSRSWITCH_* environment variables, which override the config file.\n\
                  Outputs are CSV: '#' provenance comment, header row, comma separators, '.' decimals, LF endings."
)]
struct Cli {
    /// Experiment config file (JSON). Defaults to the built-in reference
    /// settings when omitted.
    #[arg(long, global = true, env = "FSRSWITCH_CONFIG")]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true, env = "FSRSWITCH_SEED")]
    seed: Option<u64>,

    /// Monte Carlo runs per grid point override.
    #[arg(long, global = true, env = "FSRSWITCH_RUNS")]
    runs: Option<u64>,

    /// Output directory for the emitted CSV files.
    #[arg(long, global = true, env = "FSRSWITCH_OUT", default_value = "out")]
    out: PathBuf,

    /// Force the reference operating point (64 wavelengths, 64-port
    /// couplers, F in {1,2,4,8}, loads 0.1..=1.0, r_inter 0.25, 10,000
    /// runs, 28 Gbaud) on top of the loaded config.
    #[arg(long, global = true)]
    paper_defaults: bool,

    /// Also hold granted interdomain wavelengths in the source coupler.
    #[arg(long, global = true)]
    physical_occupancy: bool,

    /// Intradomain wavelength assignment: "random" or "first-fit".
    #[arg(long, global = true, env = "FSRSWITCH_WAVELENGTH_POLICY")]
    wavelength_policy: Option<WavelengthOption>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form blocking-probability curves over the load grid.
    Analyze,
    /// Monte Carlo blocking probabilities plus deviation from the closed forms.
    Simulate,
    /// BER, RS(255,k) code rate and normalized interdomain throughput grids.
    Crosslayer,
    /// The full pipeline: analyze, simulate and crosslayer.
    Sweep,
}

impl Cli {
    fn effective_config(&self) -> fsrswitch::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::paper_defaults(),
        };
        if self.paper_defaults {
            let reference = ExperimentConfig::paper_defaults();
            config.wavelength_count = reference.wavelength_count;
            config.coupler_ports = reference.coupler_ports;
            config.fsr_values = reference.fsr_values;
            config.loads = reference.loads;
            config.r_inter = reference.r_inter;
            config.runs = reference.runs;
            config.symbol_rate_gbaud = reference.symbol_rate_gbaud;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(runs) = self.runs {
            config.runs = runs;
        }
        if let Some(policy) = self.wavelength_policy {
            config.scheduler.wavelength_policy = policy;
        }
        if self.physical_occupancy {
            config.scheduler.physical_occupancy = true;
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: &Cli) -> fsrswitch::Result<Vec<PathBuf>> {
    let config = cli.effective_config()?;
    match cli.command {
        Command::Analyze => commands::cmd_analyze(&config, &cli.out),
        Command::Simulate => commands::cmd_simulate(&config, &cli.out),
        Command::Crosslayer => commands::cmd_crosslayer(&config, &cli.out),
        Command::Sweep => commands::cmd_sweep(&config, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_validation() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}
