use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by configuration validation and by the runtime pipeline.
///
/// The CLI maps [`Error::is_validation`] to one exit code and everything else
/// to another, so new variants should be added to the right group.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid switch dimensions: {0}")]
    InvalidDimensions(String),

    #[error("port index {index} out of range 1..={max}")]
    PortOutOfRange { index: usize, max: usize },

    #[error("wavelength count {wavelengths} is not divisible by FSR count {fsr}")]
    IndivisibleWavelengths { wavelengths: usize, fsr: usize },

    #[error("wavelength partition is undefined for a single FSR")]
    PartitionUndefined,

    #[error("{name} = {value} is not a probability in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("coupler port count 2 leaves no intradomain destinations (r_inter < 1)")]
    NoIntraDestinations,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("estimate/analytic grids differ: {0}")]
    GridMismatch(String),

    #[error("BER model returned {value} outside [0, 1]")]
    ModelContract { value: f64 },

    #[error("point (fsr={fsr}, load={load}, modulation={modulation}) outside BER table range")]
    InterpolationRange { fsr: f64, load: f64, modulation: u8 },

    #[error("config validation failed: {0}")]
    ConfigValidation(String),

    #[error("failed to parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("malformed batch line {line}: {message}")]
    BatchParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that indicate bad user input (config file, dimensions,
    /// probabilities) rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimensions(_)
                | Error::PortOutOfRange { .. }
                | Error::IndivisibleWavelengths { .. }
                | Error::PartitionUndefined
                | Error::InvalidProbability { .. }
                | Error::NoIntraDestinations
                | Error::ConfigValidation(_)
                | Error::ConfigParse { .. }
        )
    }
}
