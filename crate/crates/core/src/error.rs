use thiserror::Error;

use crate::interferometer::MeasurementModel;
use crate::params::RegimeTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{0}` must be strictly positive")]
    NonPositiveParameter(&'static str),

    #[error("parameter `{0}` must be non-negative")]
    NegativeParameter(&'static str),

    #[error("parameter `{0}` must be finite")]
    NonFiniteParameter(&'static str),

    #[error("efficiency `{name}` = {value} lies outside (0, 1]")]
    EtaOutOfRange { name: &'static str, value: f64 },

    #[error("regime thresholds must satisfy 0 < high ({high}) < low ({low})")]
    InvalidThresholds { high: f64, low: f64 },

    #[error("temperature must be strictly positive and finite, got {0} K")]
    NonPositiveTemperature(f64),

    #[error("tolerance {0} must lie in (0, 1)")]
    InvalidTolerance(f64),

    #[error("Fock truncation needs n_max = {required}, above the cap of {cap}")]
    TruncationOverflow { required: u64, cap: usize },

    #[error("model {model} is not valid in the {regime} regime (pass an override to force it)")]
    ModelRegimeMismatch {
        model: MeasurementModel,
        regime: RegimeTag,
    },

    #[error("brute-force oracle supports at most {cap} photons, got {photons}")]
    PhotonNumberTooLarge { photons: f64, cap: f64 },

    #[error(
        "optical truncation dim {dim} too small: coherent-state norm deficit {norm_deficit:e}"
    )]
    TruncationTooSmall { dim: usize, norm_deficit: f64 },

    #[error("observation outside estimator domain: {0}")]
    OutOfDomain(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(&'static str),

    #[error("temperature response |d<M>/dT| = {slope:e} is below the 1e-30 floor")]
    DerivativeUnderflow { slope: f64 },
}
