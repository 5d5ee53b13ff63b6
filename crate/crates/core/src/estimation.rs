//! Temperature estimators and resolution formulas.
//!
//! The high-temperature estimator inverts the continuum model
//! `<M> = N - N f b (1 + 2 K T / (hbar omega))` exactly, and the
//! low-temperature one inverts the two-level model
//! `d = b (1 + 3 q) / (1 + q)`, `q = exp(-hbar omega / K T)`, giving
//! `T = hbar omega / (K ln((3b - d)/(d - b)))`.
//!
//! Observations may be passed as `<M>` itself or, to avoid cancellation
//! against `N`, as the deficit `N - <M>` or its thermal part.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{
    mean_m, second_moment, MeasurementModel, MeasurementStats, ModelOptions,
};
use crate::params::{check_temperature, classify_regime, Mirrors, RegimeTag, ValidatedSpec};

/// Default relative step for the temperature derivative.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-6;
/// Slopes below this are treated as no response at all.
pub const SLOPE_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    HighTOne,
    HighTTwo,
    LowTOne,
    KerrHighTOne,
}

/// A measured value of the interference signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    /// `<M>`
    Mean(f64),
    /// `eta N - <M>`
    Deficit(f64),
    /// Deficit beyond its zero-temperature value.
    ThermalExcess(f64),
}

impl Observation {
    /// The most precise representation the stats carry.
    pub fn from_stats(stats: &MeasurementStats) -> Self {
        match stats.thermal_excess {
            Some(e) => Observation::ThermalExcess(e),
            None => Observation::Deficit(stats.deficit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureResult {
    pub t_hat: f64,
    pub estimator: Estimator,
    /// Whether `t_hat` lies in the regime the estimator was derived for.
    pub valid_domain: bool,
    /// Per-photon ground correction `b` (low-T estimator only).
    pub b: Option<f64>,
    /// Per-photon deficit `d` (low-T estimator only).
    pub d: Option<f64>,
}

/// Zero-temperature deficit per detected photon of the second-order models.
pub fn ground_deficit_per_photon(spec: &ValidatedSpec) -> f64 {
    spec.mirrors().factor() * spec.ground_correction()
}

fn excess_per_photon(spec: &ValidatedSpec, obs: Observation, ground: f64) -> Result<f64> {
    let photons = spec.detected_photons();
    if photons <= 0.0 {
        return Err(Error::OutOfDomain("no detected photons".into()));
    }
    let value = match obs {
        Observation::Mean(m) => ((photons - m) - photons * ground) / photons,
        Observation::Deficit(d) => (d - photons * ground) / photons,
        Observation::ThermalExcess(e) => e / photons,
    };
    if value.is_nan() {
        return Err(Error::OutOfDomain("observation is NaN".into()));
    }
    Ok(value)
}

/// Inverse of the continuum model. Covers one mirror, two mirrors and the
/// Kerr-enhanced probe through `omega_p'`.
pub fn estimate_high_t(spec: &ValidatedSpec, obs: Observation) -> Result<TemperatureResult> {
    let f = spec.mirrors().factor();
    let excess = excess_per_photon(spec, obs, ground_deficit_per_photon(spec))?;
    let s = spec.spec();
    let k = spec.wavenumber();
    let m_omega2 = s.sample.mass * s.sample.omega * s.sample.omega;
    let t_hat = excess * 2.0 * m_omega2 / (f * k * k * s.constants.boltzmann);
    if !(t_hat > 0.0 && t_hat.is_finite()) {
        return Err(Error::OutOfDomain(format!(
            "implied temperature {t_hat:e} K is not positive"
        )));
    }
    let estimator = match (spec.mirrors(), spec.is_nonlinear()) {
        (Mirrors::TwoThermal, _) => Estimator::HighTTwo,
        (Mirrors::OneThermal, true) => Estimator::KerrHighTOne,
        (Mirrors::OneThermal, false) => Estimator::HighTOne,
    };
    Ok(TemperatureResult {
        t_hat,
        estimator,
        valid_domain: classify_regime(spec, t_hat)?.tag == RegimeTag::HighT,
        b: None,
        d: None,
    })
}

/// Inverse of the two-level model; requires `b < d < 2b`.
pub fn estimate_low_t(spec: &ValidatedSpec, obs: Observation) -> Result<TemperatureResult> {
    if spec.mirrors() != Mirrors::OneThermal {
        return Err(Error::UnsupportedConfiguration(
            "the two-level estimator is defined for one thermal mirror",
        ));
    }
    let b = spec.ground_correction();
    let e = excess_per_photon(spec, obs, b)?;
    if e <= 0.0 {
        return Err(Error::OutOfDomain(format!("d <= b (d - b = {e:e})")));
    }
    if e >= b {
        return Err(Error::OutOfDomain(format!(
            "d >= 2b (d - b = {e:e}, b = {b:e})"
        )));
    }
    let c = spec.constants();
    let log = ((2.0 * b - e) / e).ln();
    let t_hat = c.hbar * spec.spec().sample.omega / (c.boltzmann * log);
    if !(t_hat > 0.0 && t_hat.is_finite()) {
        return Err(Error::OutOfDomain(format!(
            "implied temperature {t_hat:e} K"
        )));
    }
    Ok(TemperatureResult {
        t_hat,
        estimator: Estimator::LowTOne,
        valid_domain: classify_regime(spec, t_hat)?.tag == RegimeTag::LowT,
        b: Some(b),
        d: Some(b + e),
    })
}

/// The four closed-form resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionFormula {
    /// `2 m omega^2 / (N K (omega_p/c)^2)`
    SingleMirror,
    /// `m omega^2 / (N K (omega_p/c)^2)`
    TwoMirror,
    /// `m omega^2 / (N K (omega_p'/c)^2)`
    KerrSingleMirror,
    /// `m omega^2 / (eta1 eta2 N K (omega_p'/c)^2)`
    Lossy,
}

impl fmt::Display for ResolutionFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResolutionFormula::SingleMirror => "single_mirror",
            ResolutionFormula::TwoMirror => "two_mirror",
            ResolutionFormula::KerrSingleMirror => "kerr_single_mirror",
            ResolutionFormula::Lossy => "lossy",
        })
    }
}

/// Picks the formula matching the configuration: lossy setups use
/// [`ResolutionFormula::Lossy`], otherwise mirror count and Kerr decide.
pub fn select_formula(spec: &ValidatedSpec) -> ResolutionFormula {
    if spec.efficiency() < 1.0 {
        return ResolutionFormula::Lossy;
    }
    match (spec.mirrors(), spec.is_nonlinear()) {
        (Mirrors::OneThermal, false) => ResolutionFormula::SingleMirror,
        (Mirrors::OneThermal, true) => ResolutionFormula::KerrSingleMirror,
        (Mirrors::TwoThermal, false) => ResolutionFormula::TwoMirror,
        (Mirrors::TwoThermal, true) => ResolutionFormula::Lossy,
    }
}

/// Evaluates one closed-form resolution (K) for `spec`.
pub fn closed_form_resolution(spec: &ValidatedSpec, formula: ResolutionFormula) -> f64 {
    let s = spec.spec();
    let c = &s.constants;
    let m_omega2 = s.sample.mass * s.sample.omega * s.sample.omega;
    let n = s.light.photon_number;
    let base = |omega_p: f64| {
        let k = omega_p / c.light_speed;
        m_omega2 / (n * c.boltzmann * k * k)
    };
    match formula {
        ResolutionFormula::SingleMirror => 2.0 * base(s.light.omega_p),
        ResolutionFormula::TwoMirror => base(s.light.omega_p),
        ResolutionFormula::KerrSingleMirror => base(spec.effective_omega_p()),
        ResolutionFormula::Lossy => base(spec.effective_omega_p()) / spec.efficiency(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormResolution {
    pub formula: ResolutionFormula,
    pub delta_t: f64,
}

pub fn resolution_closed_form(spec: &ValidatedSpec) -> ClosedFormResolution {
    let formula = select_formula(spec);
    ClosedFormResolution {
        formula,
        delta_t: closed_form_resolution(spec, formula),
    }
}

/// Analytic `d<M>/dT` of the continuum model: `-eta N f (omega_p'/c)^2 K / (2 m omega^2)`.
pub fn analytic_slope(spec: &ValidatedSpec) -> f64 {
    let s = spec.spec();
    let k = spec.wavenumber();
    let m_omega2 = s.sample.mass * s.sample.omega * s.sample.omega;
    -spec.detected_photons() * spec.mirrors().factor() * k * k * s.constants.boltzmann
        / (2.0 * m_omega2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionReport {
    pub model: MeasurementModel,
    pub temperature: f64,
    pub formula: ResolutionFormula,
    /// Closed-form resolution selected for the configuration (K).
    pub delta_t_closed_form: f64,
    /// Numerical `d<M>/dT` (1/K).
    pub dm_dt: f64,
    /// Analytic slope, continuum model only.
    pub dm_dt_analytic: Option<f64>,
    /// Exact `Delta M` from the second moment.
    pub delta_m: f64,
    /// `Delta M ~ N` convention.
    pub delta_m_photon_number: f64,
    /// `delta_m / |dm_dt|` (K)
    pub delta_t_propagated: f64,
    /// `delta_m_photon_number / |dm_dt|` (K)
    pub delta_t_photon_number: f64,
    /// `delta_m^2 / dm_dt^2`, the noise-to-signal ratio taken literally as a
    /// ratio of squares (K^2).
    pub delta_t_squared_ratio: f64,
}

fn signal(stats: &MeasurementStats) -> f64 {
    stats.thermal_excess.unwrap_or(stats.deficit)
}

/// Temperature resolution from first-order error propagation,
/// `Delta M / |d<M>/dT|`, with a Richardson-refined central difference at
/// relative step `step`.
pub fn resolution_propagated(
    spec: &ValidatedSpec,
    temperature: f64,
    model: MeasurementModel,
    opts: &ModelOptions,
    step: f64,
) -> Result<ResolutionReport> {
    check_temperature(temperature)?;
    if !(step > 0.0 && step < 0.5) {
        return Err(Error::InvalidTolerance(step));
    }
    let centre = second_moment(spec, temperature, model, opts)?;
    let shifted = ModelOptions {
        override_regime: true,
        ..*opts
    };
    let at = |t: f64| -> Result<f64> { Ok(signal(&mean_m(spec, t, model, &shifted)?)) };
    let diff = |h: f64| -> Result<f64> {
        let up = at(temperature * (1.0 + h))?;
        let down = at(temperature * (1.0 - h))?;
        Ok((up - down) / (2.0 * h * temperature))
    };
    let coarse = diff(step)?;
    let fine = diff(0.5 * step)?;
    // the signal grows as <M> falls
    let dm_dt = -(4.0 * fine - coarse) / 3.0;
    if dm_dt.is_nan() || dm_dt.abs() < SLOPE_FLOOR {
        return Err(Error::DerivativeUnderflow { slope: dm_dt });
    }

    let exact = match model {
        MeasurementModel::FockBruteForce => centre,
        _ => second_moment(spec, temperature, MeasurementModel::ExactGaussian, opts)?,
    };
    let sec = exact.second.expect("second moment requested");
    let closed = resolution_closed_form(spec);
    let slope = dm_dt.abs();
    Ok(ResolutionReport {
        model,
        temperature,
        formula: closed.formula,
        delta_t_closed_form: closed.delta_t,
        dm_dt,
        dm_dt_analytic: (model == MeasurementModel::QuadraticHighT).then(|| analytic_slope(spec)),
        delta_m: sec.delta_m,
        delta_m_photon_number: sec.delta_m_photon_number,
        delta_t_propagated: sec.delta_m / slope,
        delta_t_photon_number: sec.delta_m_photon_number / slope,
        delta_t_squared_ratio: (sec.delta_m / slope).powi(2),
    })
}
