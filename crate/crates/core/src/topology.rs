//! Cyclic AWG routing: which wavelengths connect AWG input `i` to output `j`,
//! and the fairness partition used to share them between the two directions
//! of a coupler pair.
//!
//! Ports and wavelengths are 1-based throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions of the switch architecture and quantities derived from them.
///
/// `N x N` AWG, `N` star couplers with `K` ports each (one toward the AWG,
/// `K - 1` toward nodes), `F` usable free spectral ranges and
/// `N_W = F * N` wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchConfig {
    awg_ports: usize,
    coupler_ports: usize,
    fsr_count: usize,
    wavelength_count: usize,
}

impl SwitchConfig {
    /// Builds a configuration from the AWG port count `n`, coupler port count
    /// `k` and FSR count `f`; the wavelength count is `f * n` by construction.
    pub fn new(awg_ports: usize, coupler_ports: usize, fsr_count: usize) -> Result<Self> {
        if awg_ports < 2 {
            return Err(Error::InvalidDimensions(format!(
                "awg_ports must be >= 2, got {awg_ports}"
            )));
        }
        if coupler_ports < 2 {
            return Err(Error::InvalidDimensions(format!(
                "coupler_ports must be >= 2, got {coupler_ports}"
            )));
        }
        if fsr_count < 1 {
            return Err(Error::InvalidDimensions(
                "fsr_count must be >= 1".to_string(),
            ));
        }
        Ok(SwitchConfig {
            awg_ports,
            coupler_ports,
            fsr_count,
            wavelength_count: fsr_count * awg_ports,
        })
    }

    /// Builds a configuration from a fixed wavelength budget: the AWG port
    /// count is derived as `wavelength_count / fsr_count`.
    pub fn from_wavelength_budget(
        wavelength_count: usize,
        coupler_ports: usize,
        fsr_count: usize,
    ) -> Result<Self> {
        if fsr_count == 0 || wavelength_count % fsr_count != 0 {
            return Err(Error::IndivisibleWavelengths {
                wavelengths: wavelength_count,
                fsr: fsr_count,
            });
        }
        Self::new(wavelength_count / fsr_count, coupler_ports, fsr_count)
    }

    pub fn awg_ports(&self) -> usize {
        self.awg_ports
    }

    pub fn coupler_ports(&self) -> usize {
        self.coupler_ports
    }

    pub fn fsr_count(&self) -> usize {
        self.fsr_count
    }

    pub fn wavelength_count(&self) -> usize {
        self.wavelength_count
    }

    /// Nodes attached to each coupler (one coupler port feeds the AWG).
    pub fn nodes_per_coupler(&self) -> usize {
        self.coupler_ports - 1
    }

    /// Total nodes the switch interconnects: `N * (K - 1)`.
    pub fn total_nodes(&self) -> usize {
        self.awg_ports * self.nodes_per_coupler()
    }

    pub(crate) fn check_port(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.awg_ports {
            return Err(Error::PortOutOfRange {
                index,
                max: self.awg_ports,
            });
        }
        Ok(())
    }
}

/// A wavelength index in `1..=N_W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WavelengthId(pub usize);

impl WavelengthId {
    /// Zero-based position, used for occupancy bookkeeping.
    pub(crate) fn slot(self) -> usize {
        self.0 - 1
    }
}

impl std::fmt::Display for WavelengthId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed AWG link from input port `input` to output port `output`.
///
/// `input == output` is a valid AWG link but the scheduler never uses it:
/// traffic staying inside a coupler bypasses the AWG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link {
    pub input: usize,
    pub output: usize,
}

impl Link {
    pub fn new(input: usize, output: usize) -> Self {
        Link { input, output }
    }
}

/// The two halves of a link wavelength set, used to split resources fairly
/// between the two directions of a coupler pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavelengthPartition {
    /// Lowest-index half, `ceil(F / 2)` wavelengths.
    pub w1: Vec<WavelengthId>,
    /// Remaining half, `floor(F / 2)` wavelengths.
    pub w2: Vec<WavelengthId>,
}

/// Wavelengths usable on the AWG link from input `i` to output `j`:
/// `f * N - mod(1 - i - j, N)` for `f = 1..=F`, in ascending order.
pub fn link_wavelengths(config: &SwitchConfig, link: Link) -> Result<Vec<WavelengthId>> {
    config.check_port(link.input)?;
    config.check_port(link.output)?;
    let n = config.awg_ports;
    // Nonnegative remainder of (1 - i - j) mod N, computed without going
    // through signed arithmetic: 1 - i - j == -(i + j - 1).
    let offset = (n - (link.input + link.output - 1) % n) % n;
    Ok((1..=config.fsr_count)
        .map(|f| WavelengthId(f * n - offset))
        .collect())
}

/// Splits the link wavelength set into its two directional halves
/// (lowest-index half first). Undefined for a single FSR.
pub fn partition(config: &SwitchConfig, link: Link) -> Result<WavelengthPartition> {
    if config.fsr_count < 2 {
        return Err(Error::PartitionUndefined);
    }
    let all = link_wavelengths(config, link)?;
    let half = (config.fsr_count + 1) / 2;
    Ok(WavelengthPartition {
        w1: all[..half].to_vec(),
        w2: all[half..].to_vec(),
    })
}

/// True iff the links `i -> j` and `j -> i` share the same wavelength set
/// (they always do for a cyclic AWG; exposed for tests).
pub fn reciprocity_check(config: &SwitchConfig, i: usize, j: usize) -> Result<bool> {
    Ok(link_wavelengths(config, Link::new(i, j))? == link_wavelengths(config, Link::new(j, i))?)
}
