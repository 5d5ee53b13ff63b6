//! Physical constants, experiment parameters and temperature-regime routing.
//!
//! Everything is strict SI. Both the sample frequency `omega` and the probe
//! frequency `omega_p` are angular frequencies (rad/s); the phase picked up per
//! unit of mirror displacement is `omega_p / c`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default high-temperature threshold on `hbar*omega / (K*T)`.
pub const DEFAULT_HIGH_T_THRESHOLD: f64 = 1e-2;
/// Default low-temperature threshold on `hbar*omega / (K*T)`.
pub const DEFAULT_LOW_T_THRESHOLD: f64 = 1e2;
/// Warn once the small-phase parameter `<(omega_p' x / c)^2>` exceeds this.
pub const SMALL_PHASE_WARNING: f64 = 0.1;

/// Thermal energy `K*T` of the reference scenario, in joules.
pub const REFERENCE_THERMAL_ENERGY: f64 = 1e-21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub boltzmann: f64,
    /// Propagation speed of light in vacuum (m/s).
    pub light_speed: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        boltzmann: 1.380_649e-23,
        light_speed: 2.997_924_58e8,
    };

    /// `hbar = K = c = 1`. Handy for oracle tests where only dimensionless
    /// combinations matter.
    pub const NATURAL: PhysicalConstants = PhysicalConstants {
        hbar: 1.0,
        boltzmann: 1.0,
        light_speed: 1.0,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// The harmonic-oscillator sample standing in for a mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// kg
    pub mass: f64,
    /// rad/s
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightSpec {
    /// Probe angular frequency (rad/s).
    pub omega_p: f64,
    /// Mean photon number `N = |alpha|^2` over both arms.
    pub photon_number: f64,
    /// Refractive index of the surrounding gas.
    pub refractive_index: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KerrSpec {
    /// Nonlinear phase shift per photon.
    pub chi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub eta_detect: f64,
    pub eta_reflect: f64,
}

impl LossSpec {
    pub const LOSSLESS: LossSpec = LossSpec {
        eta_detect: 1.0,
        eta_reflect: 1.0,
    };

    pub fn product(&self) -> f64 {
        self.eta_detect * self.eta_reflect
    }
}

impl Default for LossSpec {
    fn default() -> Self {
        Self::LOSSLESS
    }
}

/// How many interferometer mirrors are replaced by thermal samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mirrors {
    #[default]
    OneThermal,
    /// Two identical, independent samples, one per arm.
    TwoThermal,
}

impl Mirrors {
    /// Multiplier on the phase variance: the arm-length difference of two
    /// independent samples has twice the variance of one.
    pub fn factor(self) -> f64 {
        match self {
            Mirrors::OneThermal => 1.0,
            Mirrors::TwoThermal => 2.0,
        }
    }
}

impl fmt::Display for Mirrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mirrors::OneThermal => "one",
            Mirrors::TwoThermal => "two",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// High-T iff `hbar*omega/(K*T) <= high`.
    pub high: f64,
    /// Low-T iff `hbar*omega/(K*T) >= low`.
    pub low: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            high: DEFAULT_HIGH_T_THRESHOLD,
            low: DEFAULT_LOW_T_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub constants: PhysicalConstants,
    pub sample: SampleSpec,
    pub light: LightSpec,
    pub kerr: KerrSpec,
    pub loss: LossSpec,
    pub mirrors: Mirrors,
    pub thresholds: RegimeThresholds,
}

impl ExperimentSpec {
    /// 0.1 ng oscillator at 100 rad/s, probed by 10^10 photons at 10^10 rad/s
    /// in a gas with chi = 1e-8 and unit refractive index, lossless, one
    /// thermal mirror.
    pub fn reference() -> Self {
        Self {
            constants: PhysicalConstants::SI,
            sample: SampleSpec {
                mass: 1e-10,
                omega: 1e2,
            },
            light: LightSpec {
                omega_p: 1e10,
                photon_number: 1e10,
                refractive_index: 1.0,
            },
            kerr: KerrSpec { chi: 1e-8 },
            loss: LossSpec::LOSSLESS,
            mirrors: Mirrors::OneThermal,
            thresholds: RegimeThresholds::default(),
        }
    }

    pub fn with_mirrors(mut self, mirrors: Mirrors) -> Self {
        self.mirrors = mirrors;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.kerr.chi = chi;
        self
    }

    pub fn with_photon_number(mut self, n: f64) -> Self {
        self.light.photon_number = n;
        self
    }

    pub fn with_loss(mut self, eta_detect: f64, eta_reflect: f64) -> Self {
        self.loss = LossSpec {
            eta_detect,
            eta_reflect,
        };
        self
    }
}

/// Non-fatal conditions attached to a validated spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    LargeKerr { chi: f64 },
    SubUnityRefractiveIndex { refractive_index: f64 },
    LargePhase { temperature: f64, value: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::LargeKerr { chi } => {
                write!(f, "chi = {chi:e} is not small; Kerr linearisation is unreliable")
            }
            Warning::SubUnityRefractiveIndex { refractive_index } => {
                write!(f, "refractive index {refractive_index} is below 1")
            }
            Warning::LargePhase { temperature, value } => write!(
                f,
                "small-phase parameter {value:e} exceeds {SMALL_PHASE_WARNING} at T = {temperature:e} K"
            ),
        }
    }
}

/// An [`ExperimentSpec`] whose invariants have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSpec {
    spec: ExperimentSpec,
    warnings: Vec<Warning>,
}

fn positive(value: f64, name: &'static str) -> Result<()> {
    if !value.is_finite() {
        Err(Error::NonFiniteParameter(name))
    } else if value <= 0.0 {
        Err(Error::NonPositiveParameter(name))
    } else {
        Ok(())
    }
}

fn non_negative(value: f64, name: &'static str) -> Result<()> {
    if !value.is_finite() {
        Err(Error::NonFiniteParameter(name))
    } else if value < 0.0 {
        Err(Error::NegativeParameter(name))
    } else {
        Ok(())
    }
}

fn efficiency(value: f64, name: &'static str) -> Result<()> {
    if value.is_finite() && value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::EtaOutOfRange { name, value })
    }
}

pub fn validate(spec: &ExperimentSpec) -> Result<ValidatedSpec> {
    let c = &spec.constants;
    positive(c.hbar, "hbar")?;
    positive(c.boltzmann, "boltzmann")?;
    positive(c.light_speed, "light_speed")?;
    positive(spec.sample.mass, "mass")?;
    positive(spec.sample.omega, "omega")?;
    positive(spec.light.omega_p, "omega_p")?;
    non_negative(spec.light.photon_number, "photon_number")?;
    positive(spec.light.refractive_index, "refractive_index")?;
    non_negative(spec.kerr.chi, "chi")?;
    efficiency(spec.loss.eta_detect, "eta_detect")?;
    efficiency(spec.loss.eta_reflect, "eta_reflect")?;

    let t = spec.thresholds;
    if !(t.high.is_finite() && t.low.is_finite() && t.high > 0.0 && t.high < t.low) {
        return Err(Error::InvalidThresholds {
            high: t.high,
            low: t.low,
        });
    }

    let mut warnings = Vec::new();
    if spec.kerr.chi >= 1.0 {
        warnings.push(Warning::LargeKerr { chi: spec.kerr.chi });
    }
    if spec.light.refractive_index < 1.0 {
        warnings.push(Warning::SubUnityRefractiveIndex {
            refractive_index: spec.light.refractive_index,
        });
    }
    Ok(ValidatedSpec {
        spec: *spec,
        warnings,
    })
}

impl ValidatedSpec {
    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.spec.constants
    }

    pub fn mirrors(&self) -> Mirrors {
        self.spec.mirrors
    }

    /// Static warnings (chi, refractive index).
    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Static warnings plus the temperature-dependent small-phase check.
    pub fn warnings_at(&self, temperature: f64) -> Vec<Warning> {
        let mut out = self.warnings.clone();
        if let Ok(value) = small_phase_parameter(self, temperature) {
            if value > SMALL_PHASE_WARNING {
                out.push(Warning::LargePhase { temperature, value });
            }
        }
        out
    }

    /// Re-checks the wrapped spec; always reproduces `self`.
    pub fn revalidate(&self) -> Result<ValidatedSpec> {
        validate(&self.spec)
    }

    /// Same validated spec with a different mirror configuration.
    pub fn with_mirrors(&self, mirrors: Mirrors) -> ValidatedSpec {
        let mut out = self.clone();
        out.spec.mirrors = mirrors;
        out
    }

    pub fn photon_number(&self) -> f64 {
        self.spec.light.photon_number
    }

    /// `eta_detect * eta_reflect`.
    pub fn efficiency(&self) -> f64 {
        self.spec.loss.product()
    }

    /// Photon number after mean-field loss scaling, `eta * N`.
    pub fn detected_photons(&self) -> f64 {
        self.efficiency() * self.photon_number()
    }

    /// Kerr-enhanced probe frequency `[1 + chi/2 (N + 1)] n0 omega_p`.
    pub fn effective_omega_p(&self) -> f64 {
        self.kerr_scaled_omega_p(1.0)
    }

    /// `[1 + chi/2 (N + offset)] n0 omega_p`. Offset 1 drives the mean, offset 2
    /// the truncated second moment.
    pub(crate) fn kerr_scaled_omega_p(&self, offset: f64) -> f64 {
        let l = &self.spec.light;
        let chi = self.spec.kerr.chi;
        if chi == 0.0 {
            return l.refractive_index * l.omega_p;
        }
        (1.0 + 0.5 * chi * (l.photon_number + offset)) * l.refractive_index * l.omega_p
    }

    /// Whether the Kerr gas changes the phase response at all.
    pub fn is_nonlinear(&self) -> bool {
        self.spec.kerr.chi != 0.0 || self.spec.light.refractive_index != 1.0
    }

    /// Phase per unit displacement, `omega_p' / c` (1/m).
    pub fn wavenumber(&self) -> f64 {
        self.effective_omega_p() / self.spec.constants.light_speed
    }

    /// Ground-state position variance `hbar / (2 m omega)` (m^2).
    pub fn zero_point_variance(&self) -> f64 {
        let c = &self.spec.constants;
        c.hbar / (2.0 * self.spec.sample.mass * self.spec.sample.omega)
    }

    /// Per-photon ground-state correction `b = (omega_p'/c)^2 hbar / (4 m omega)`
    /// for a single thermal mirror.
    pub fn ground_correction(&self) -> f64 {
        let k = self.wavenumber();
        0.5 * k * k * self.zero_point_variance()
    }

    /// `hbar*omega / (K*T)`.
    pub fn energy_ratio(&self, temperature: f64) -> Result<f64> {
        check_temperature(temperature)?;
        let c = &self.spec.constants;
        Ok(c.hbar * self.spec.sample.omega / (c.boltzmann * temperature))
    }

    /// Temperature at which `hbar*omega / (K*T)` equals `ratio`.
    pub fn temperature_for_ratio(&self, ratio: f64) -> f64 {
        let c = &self.spec.constants;
        c.hbar * self.spec.sample.omega / (c.boltzmann * ratio)
    }
}

pub(crate) fn check_temperature(temperature: f64) -> Result<()> {
    if temperature.is_finite() && temperature > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(temperature))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    HighT,
    Intermediate,
    LowT,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeTag::HighT => "high_t",
            RegimeTag::Intermediate => "intermediate",
            RegimeTag::LowT => "low_t",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    /// `hbar*omega / (K*T)`
    pub ratio: f64,
}

pub fn classify_regime(spec: &ValidatedSpec, temperature: f64) -> Result<Regime> {
    let ratio = spec.energy_ratio(temperature)?;
    let t = spec.spec.thresholds;
    let tag = if ratio <= t.high {
        RegimeTag::HighT
    } else if ratio >= t.low {
        RegimeTag::LowT
    } else {
        RegimeTag::Intermediate
    };
    Ok(Regime { tag, ratio })
}

/// `<(omega_p' x / c)^2> = (omega_p'/c)^2 hbar/(2 m omega) (2 nbar + 1)` for one
/// sample. The approximate models are expansions in this quantity.
pub fn small_phase_parameter(spec: &ValidatedSpec, temperature: f64) -> Result<f64> {
    let ratio = spec.energy_ratio(temperature)?;
    let k = spec.wavenumber();
    Ok(k * k * spec.zero_point_variance() * crate::thermal::occupation_weight(ratio))
}
