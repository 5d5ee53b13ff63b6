//! Interferometric thermometry of a harmonically bound mirror.
//!
//! A probe beam picks up a position-dependent phase from a thermally
//! oscillating mirror, and the interference observable
//! `M = A2^dag A1 + A1^dag A2` loses contrast as the mirror heats up.
//! This crate evaluates `<M>` and `<M^2>` under several models, inverts
//! them for temperature, and gives closed-form and propagated resolutions.
//! A truncated Fock-space oracle cross-checks the analytic models.

pub mod checks;
pub mod error;
pub mod estimation;
pub mod fock_oracle;
pub mod interferometer;
pub mod laguerre;
pub mod params;
pub mod thermal;

pub use error::{Error, Result};
pub use estimation::{
    estimate_high_t, estimate_low_t, resolution_closed_form, resolution_propagated, Estimator,
    Observation, ResolutionFormula, ResolutionReport, TemperatureResult,
};
pub use interferometer::{
    effective_frequency, mean_m, second_moment, MeasurementModel, MeasurementStats, ModelOptions,
    SecondMoment,
};
pub use params::{
    classify_regime, small_phase_parameter, validate, ExperimentSpec, KerrSpec, LightSpec,
    LossSpec, Mirrors, PhysicalConstants, Regime, RegimeTag, RegimeThresholds, SampleSpec,
    ValidatedSpec, Warning,
};
pub use thermal::{make_thermal, ThermalOscillator};
