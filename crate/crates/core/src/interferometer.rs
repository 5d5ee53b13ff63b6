//! Statistics of the interference observable `M = A2^dag A1 + A1^dag A2`.
//!
//! Every model is evaluated per detected photon first. The per-photon
//! *deficit* `1 - <M>/N` and the *thermal excess* (deficit minus its zero
//! temperature value) are carried alongside `<M>` itself: at realistic
//! parameters the thermal signal sits twelve orders of magnitude below `N`
//! and would be lost to cancellation in `N - <M>`.
//!
//! Loss is a mean-field scaling of the photon number, `N -> eta1 eta2 N`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_oracle::{exact_m_stats, FockDims};
use crate::params::{classify_regime, Mirrors, RegimeTag, ValidatedSpec};
use crate::thermal::{
    fock_distribution_with_cap, laguerre_average, make_thermal, ThermalOscillator,
    DEFAULT_TRUNCATION_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementModel {
    /// Continuum (high-T) second-order expansion.
    QuadraticHighT,
    /// Two lowest Fock levels, second order in the phase.
    TwoLevelLowT,
    /// Gaussian characteristic function of the thermal position.
    ExactGaussian,
    /// Truncated Fock sum of Laguerre diagonal elements.
    LaguerreSum,
    /// Truncated optical Fock space, small photon numbers only.
    FockBruteForce,
}

impl MeasurementModel {
    pub const ALL: [MeasurementModel; 5] = [
        MeasurementModel::QuadraticHighT,
        MeasurementModel::TwoLevelLowT,
        MeasurementModel::ExactGaussian,
        MeasurementModel::LaguerreSum,
        MeasurementModel::FockBruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasurementModel::QuadraticHighT => "quadratic_high_t",
            MeasurementModel::TwoLevelLowT => "two_level_low_t",
            MeasurementModel::ExactGaussian => "exact_gaussian",
            MeasurementModel::LaguerreSum => "laguerre_sum",
            MeasurementModel::FockBruteForce => "fock_brute_force",
        }
    }

    /// Default model for a regime: the matching approximation, or the exact
    /// Gaussian in between.
    pub fn for_regime(tag: RegimeTag) -> Self {
        match tag {
            RegimeTag::HighT => MeasurementModel::QuadraticHighT,
            RegimeTag::LowT => MeasurementModel::TwoLevelLowT,
            RegimeTag::Intermediate => MeasurementModel::ExactGaussian,
        }
    }

    fn required_regime(self) -> Option<RegimeTag> {
        match self {
            MeasurementModel::QuadraticHighT => Some(RegimeTag::HighT),
            MeasurementModel::TwoLevelLowT => Some(RegimeTag::LowT),
            _ => None,
        }
    }
}

impl fmt::Display for MeasurementModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasurementModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        MeasurementModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown measurement model `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    /// Evaluate an approximation outside the regime it was derived for.
    pub override_regime: bool,
    /// Tail tolerance for [`MeasurementModel::LaguerreSum`].
    pub truncation_tol: f64,
    pub truncation_cap: usize,
    pub fock: FockDims,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            override_regime: false,
            truncation_tol: 1e-12,
            truncation_cap: DEFAULT_TRUNCATION_CAP,
            fock: FockDims::default(),
        }
    }
}

impl ModelOptions {
    pub fn overriding() -> Self {
        Self {
            override_regime: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondMoment {
    pub mean_m2: f64,
    /// `<M^2> - <M>^2` as evaluated; may dip below zero when an approximate
    /// model is pushed outside its validity.
    pub variance: f64,
    /// `sqrt(max(0, variance))`
    pub delta_m: f64,
    /// The coarse `Delta M ~ N` convention (detected photon number).
    pub delta_m_photon_number: f64,
}

impl SecondMoment {
    pub(crate) fn from_variance(mean_m2: f64, variance: f64, photons: f64) -> Self {
        Self {
            mean_m2,
            variance,
            delta_m: variance.max(0.0).sqrt(),
            delta_m_photon_number: photons,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementStats {
    pub model: MeasurementModel,
    pub mirrors: Mirrors,
    pub temperature: f64,
    pub effective_omega_p: f64,
    pub mean_m: f64,
    /// `eta N - <M>`, computed without cancellation.
    pub deficit: f64,
    /// Part of the deficit that vanishes at zero temperature. Not available
    /// from the brute-force oracle.
    pub thermal_excess: Option<f64>,
    pub second: Option<SecondMoment>,
}

/// `[1 + chi/2 (N + 1)] n0 omega_p`
pub fn effective_frequency(spec: &ValidatedSpec) -> f64 {
    spec.effective_omega_p()
}

/// Per-photon response of one model at one temperature.
#[derive(Debug, Clone, Copy)]
struct PhotonResponse {
    deficit: f64,
    excess: Option<f64>,
    /// `<M^2>/N^2 - 1 - 1/N`, i.e. `-D2/2` with `D2` the deficit at twice the
    /// phase.
    second_offset: f64,
    /// `(Var M - N) / N^2`
    excess_variance: f64,
}

fn check_regime(
    spec: &ValidatedSpec,
    temperature: f64,
    model: MeasurementModel,
    opts: &ModelOptions,
) -> Result<()> {
    let regime = classify_regime(spec, temperature)?;
    if let Some(required) = model.required_regime() {
        if regime.tag != required && !opts.override_regime {
            return Err(Error::ModelRegimeMismatch {
                model,
                regime: regime.tag,
            });
        }
    }
    Ok(())
}

/// Second-order expansion with occupation weight `w = 1 + w_minus_one`:
/// deficit `f b w`. The second moment uses the `(N + 2)` Kerr factor.
fn second_order(spec: &ValidatedSpec, w_minus_one: f64) -> PhotonResponse {
    let f = spec.mirrors().factor();
    let b = spec.ground_correction();
    let w = 1.0 + w_minus_one;
    let deficit = f * b * w;

    let s = spec.spec();
    let c = s.constants.light_speed;
    let k = spec.wavenumber();
    let k2 = spec.kerr_scaled_omega_p(2.0) / c;
    // k - k2 = -chi/2 n0 omega_p / c, exactly zero without Kerr
    let k_gap = -0.5 * s.kerr.chi * s.light.refractive_index * s.light.omega_p / c;
    let zpf2 = spec.zero_point_variance();
    let d2 = 2.0 * f * k2 * k2 * zpf2 * w;
    let cross = f * w * zpf2 * k_gap * (k + k2);
    PhotonResponse {
        deficit,
        excess: Some(f * b * w_minus_one),
        second_offset: -0.5 * d2,
        excess_variance: cross - deficit * deficit,
    }
}

fn exact_gaussian(spec: &ValidatedSpec, osc: &ThermalOscillator) -> PhotonResponse {
    let f = spec.mirrors().factor();
    let b = spec.ground_correction();
    let u = f * b * (1.0 + 2.0 * osc.nbar);
    let deficit = -(-u).exp_m1();
    let excess = (-f * b).exp() * -(-2.0 * f * b * osc.nbar).exp_m1();
    let spread = (-2.0 * u).exp_m1();
    PhotonResponse {
        deficit,
        excess: Some(excess),
        second_offset: 0.5 * (-4.0 * u).exp_m1(),
        excess_variance: 0.5 * spread * spread,
    }
}

fn laguerre(
    spec: &ValidatedSpec,
    osc: &ThermalOscillator,
    opts: &ModelOptions,
) -> Result<PhotonResponse> {
    let dist = fock_distribution_with_cap(osc, opts.truncation_tol, opts.truncation_cap)?;
    let lambda = spec.wavenumber() * osc.x_zpf;
    let single = laguerre_average(&dist, lambda);
    let double = laguerre_average(&dist, 2.0 * lambda);
    let ground = -(-0.5 * lambda * lambda).exp_m1();
    // independent mirrors multiply their characteristic functions
    let combine = |d: f64| match spec.mirrors() {
        Mirrors::OneThermal => d,
        Mirrors::TwoThermal => d * (2.0 - d),
    };
    let d1 = combine(single.deficit);
    let d2 = combine(double.deficit);
    Ok(PhotonResponse {
        deficit: d1,
        excess: Some(d1 - combine(ground)),
        second_offset: -0.5 * d2,
        excess_variance: 2.0 * d1 - 0.5 * d2 - d1 * d1,
    })
}

fn assemble(
    spec: &ValidatedSpec,
    temperature: f64,
    model: MeasurementModel,
    r: PhotonResponse,
    with_second: bool,
) -> MeasurementStats {
    let photons = spec.detected_photons();
    let second = with_second.then(|| {
        let mean_m2 = photons * photons * (1.0 + r.second_offset) + photons;
        let variance = photons + photons * photons * r.excess_variance;
        SecondMoment::from_variance(mean_m2, variance, photons)
    });
    MeasurementStats {
        model,
        mirrors: spec.mirrors(),
        temperature,
        effective_omega_p: spec.effective_omega_p(),
        mean_m: photons * (1.0 - r.deficit),
        deficit: photons * r.deficit,
        thermal_excess: r.excess.map(|e| photons * e),
        second,
    }
}

fn evaluate(
    spec: &ValidatedSpec,
    temperature: f64,
    model: MeasurementModel,
    opts: &ModelOptions,
    with_second: bool,
) -> Result<MeasurementStats> {
    check_regime(spec, temperature, model, opts)?;
    let osc = make_thermal(spec, temperature)?;
    let response = match model {
        MeasurementModel::QuadraticHighT => second_order(spec, 2.0 / osc.energy_ratio),
        MeasurementModel::TwoLevelLowT => {
            let q = osc.level_ratio();
            second_order(spec, 2.0 * q / (1.0 + q))
        }
        MeasurementModel::ExactGaussian => exact_gaussian(spec, &osc),
        MeasurementModel::LaguerreSum => laguerre(spec, &osc, opts)?,
        MeasurementModel::FockBruteForce => {
            let mut stats = exact_m_stats(
                spec,
                temperature,
                spec.mirrors(),
                spec.spec().kerr.chi != 0.0,
                &opts.fock,
            )?;
            if !with_second {
                stats.second = None;
            }
            return Ok(stats);
        }
    };
    Ok(assemble(spec, temperature, model, response, with_second))
}

/// `<M>` under `model`; `second` is left empty.
pub fn mean_m(
    spec: &ValidatedSpec,
    temperature: f64,
    model: MeasurementModel,
    opts: &ModelOptions,
) -> Result<MeasurementStats> {
    evaluate(spec, temperature, model, opts, false)
}

/// `<M>`, `<M^2>` and both `Delta M` conventions under `model`.
pub fn second_moment(
    spec: &ValidatedSpec,
    temperature: f64,
    model: MeasurementModel,
    opts: &ModelOptions,
) -> Result<MeasurementStats> {
    evaluate(spec, temperature, model, opts, true)
}
