use thiserror::Error;

use crate::fock::{Channel, ModeId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("channel {0} appears in both factors of a tensor product")]
    OverlappingChannels(Channel),

    #[error("ket holds {photons} photons, truncation allows at most {max}")]
    TruncationExceeded { photons: usize, max: usize },

    #[error("mode {0} is not acted on by the unitary")]
    UnknownMode(ModeId),

    #[error("mode {0} listed twice")]
    DuplicateMode(ModeId),

    #[error("internal label {index} outside the declared basis of size {dim}")]
    InternalIndexOutOfRange { index: u8, dim: usize },

    #[error("matrix is not unitary (max |U^dag U - I| = {deviation:e})")]
    NonUnitaryMatrix { deviation: f64 },

    #[error("unitary spans {modes} modes, limit is {max}")]
    TooManyModes { modes: usize, max: usize },

    #[error("photon number mismatch: input has {input}, output has {output}")]
    PhotonNumberMismatch { input: usize, output: usize },

    #[error("channel `{0}` used more than once in one element")]
    DuplicateChannel(String),

    #[error("beamsplitter transmissivity {0} outside [0, 1]")]
    BadTransmissivity(f64),

    #[error("parameter `{name}` has invalid value {value}")]
    BadParameter { name: &'static str, value: f64 },

    #[error("overlap matrix is not a valid Gram matrix: {0}")]
    NotPsd(String),

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("unknown detector `{0}`")]
    UnknownDetector(String),

    #[error("detectors on channel {0} use analyzers that are not jointly measurable")]
    IncompatibleAnalyzers(Channel),

    #[error("click pattern has zero probability")]
    ZeroProbabilityPattern,

    #[error("conditional state is mixed (purity {purity:.6})")]
    MixedConditionalState { purity: f64 },

    #[error("degenerate fringe fit: {0}")]
    DegenerateFit(String),

    #[error("GHZ post-selection requires alpha == beta")]
    AsymmetricInput,

    #[error("calibration of `{target}` failed, best residual {residual:e}")]
    CalibrationFailed { target: String, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

impl Error {
    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OverlappingChannels(_) => "overlapping_channels",
            Error::TruncationExceeded { .. } => "truncation_exceeded",
            Error::UnknownMode(_) => "unknown_mode",
            Error::DuplicateMode(_) => "duplicate_mode",
            Error::InternalIndexOutOfRange { .. } => "internal_index_out_of_range",
            Error::NonUnitaryMatrix { .. } => "non_unitary_matrix",
            Error::TooManyModes { .. } => "too_many_modes",
            Error::PhotonNumberMismatch { .. } => "photon_number_mismatch",
            Error::DuplicateChannel(_) => "duplicate_channel",
            Error::BadTransmissivity(_) => "bad_transmissivity",
            Error::BadParameter { .. } => "bad_parameter",
            Error::NotPsd(_) => "not_psd",
            Error::UnknownChannel(_) => "unknown_channel",
            Error::UnknownDetector(_) => "unknown_detector",
            Error::IncompatibleAnalyzers(_) => "incompatible_analyzers",
            Error::ZeroProbabilityPattern => "zero_probability_pattern",
            Error::MixedConditionalState { .. } => "mixed_conditional_state",
            Error::DegenerateFit(_) => "degenerate_fit",
            Error::AsymmetricInput => "asymmetric_input",
            Error::CalibrationFailed { .. } => "calibration_failed",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::TomlDe(_) => "config_parse",
            Error::TomlSer(_) => "config_serialize",
        }
    }
}
