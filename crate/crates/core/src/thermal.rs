//! Thermal state of the oscillator sample.
//!
//! Convention for the Laguerre elements: with `k` the phase per unit
//! displacement and `x_zpf^2 = hbar / (2 m omega)`, set `lambda = k x_zpf`.
//! Then `<n| exp(i k x) |n> = exp(-lambda^2 / 2) L_n(lambda^2)`, and the thermal
//! average of that is the Gaussian `exp(-k^2 <x^2> / 2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laguerre::{CompensatedSum, LaguerreSeq};
use crate::params::{check_temperature, PhysicalConstants, SampleSpec, ValidatedSpec};

/// Largest Fock cutoff [`fock_distribution`] will build by default.
pub const DEFAULT_TRUNCATION_CAP: usize = 1_000_000;

/// `2 nbar + 1 = coth(r / 2)` for `r = hbar omega / (K T)`.
pub fn occupation_weight(ratio: f64) -> f64 {
    1.0 + 2.0 * mean_occupation(ratio)
}

/// Bose-Einstein occupation `1 / (exp(r) - 1)`.
pub fn mean_occupation(ratio: f64) -> f64 {
    1.0 / ratio.exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalOscillator {
    /// 1/(K T), in 1/J
    pub beta: f64,
    /// `beta * hbar * omega`
    pub energy_ratio: f64,
    pub nbar: f64,
    /// `sqrt(hbar / (2 m omega))`, m
    pub x_zpf: f64,
    /// `<x^2> = x_zpf^2 (2 nbar + 1)`, m^2
    pub x_var: f64,
}

impl ThermalOscillator {
    pub fn new(
        constants: &PhysicalConstants,
        sample: &SampleSpec,
        temperature: f64,
    ) -> Result<Self> {
        check_temperature(temperature)?;
        let beta = 1.0 / (constants.boltzmann * temperature);
        let energy_ratio = beta * constants.hbar * sample.omega;
        let zpf2 = constants.hbar / (2.0 * sample.mass * sample.omega);
        Ok(Self::from_parts(energy_ratio, beta, zpf2))
    }

    /// Oscillator specified directly by `hbar omega / (K T)` and `x_zpf`;
    /// `beta` is left in units of `1/(hbar omega)`.
    pub fn from_ratio(energy_ratio: f64, x_zpf: f64) -> Self {
        Self::from_parts(energy_ratio, energy_ratio, x_zpf * x_zpf)
    }

    fn from_parts(energy_ratio: f64, beta: f64, zpf2: f64) -> Self {
        let nbar = mean_occupation(energy_ratio);
        Self {
            beta,
            energy_ratio,
            nbar,
            x_zpf: zpf2.sqrt(),
            x_var: zpf2 * (1.0 + 2.0 * nbar),
        }
    }

    pub fn zero_point_variance(&self) -> f64 {
        self.x_zpf * self.x_zpf
    }

    /// Boltzmann factor `exp(-hbar omega / K T)` between neighbouring levels.
    pub fn level_ratio(&self) -> f64 {
        (-self.energy_ratio).exp()
    }
}

pub fn make_thermal(spec: &ValidatedSpec, temperature: f64) -> Result<ThermalOscillator> {
    ThermalOscillator::new(spec.constants(), &spec.spec().sample, temperature)
}

/// Truncated geometric law `p_n = q^n (1 - q)`, `q = exp(-beta hbar omega)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockDistribution {
    pub probabilities: Vec<f64>,
    /// Highest level kept, `n_max`.
    pub truncation: usize,
    /// `q^(n_max + 1)`, the probability of every level above `n_max`.
    pub tail_mass: f64,
}

pub fn fock_distribution(osc: &ThermalOscillator, tol: f64) -> Result<FockDistribution> {
    fock_distribution_with_cap(osc, tol, DEFAULT_TRUNCATION_CAP)
}

pub fn fock_distribution_with_cap(
    osc: &ThermalOscillator,
    tol: f64,
    cap: usize,
) -> Result<FockDistribution> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let x = osc.energy_ratio;
    let tail = |n: usize| (-((n + 1) as f64) * x).exp();

    // smallest n with q^(n+1) <= tol
    let estimate = (-tol.ln() / x).ceil() - 1.0;
    if estimate.is_nan() || estimate > cap as f64 {
        let required = if estimate.is_finite() {
            estimate as u64
        } else {
            u64::MAX
        };
        return Err(Error::TruncationOverflow { required, cap });
    }
    let mut n_max = estimate.max(0.0) as usize;
    while n_max > 0 && tail(n_max - 1) <= tol {
        n_max -= 1;
    }
    while tail(n_max) > tol {
        n_max += 1;
    }
    if n_max > cap {
        return Err(Error::TruncationOverflow {
            required: n_max as u64,
            cap,
        });
    }

    let ground = -(-x).exp_m1();
    let probabilities = (0..=n_max)
        .map(|n| ground * (-(n as f64) * x).exp())
        .collect();
    Ok(FockDistribution {
        probabilities,
        truncation: n_max,
        tail_mass: tail(n_max),
    })
}

impl FockDistribution {
    pub fn kept_mass(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for &p in &self.probabilities {
            s.add(p);
        }
        s.total()
    }

    /// `sum_n p_n f(n)` over the kept levels.
    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut s = CompensatedSum::default();
        for (n, &p) in self.probabilities.iter().enumerate() {
            s.add(p * f(n));
        }
        s.total()
    }
}

/// `<n| x^2 |n> = (2n + 1) x_zpf^2`.
pub fn x2_diagonal(n: usize, x_zpf: f64) -> f64 {
    (2 * n + 1) as f64 * x_zpf * x_zpf
}

/// `<n| cos(k x) |n> = exp(-lambda^2/2) L_n(lambda^2)` with `lambda = k x_zpf`.
pub fn cos_diagonal(n: usize, lambda: f64) -> f64 {
    let y = lambda * lambda;
    (-0.5 * y).exp() * crate::laguerre::laguerre(n, y)
}

/// Thermal average of the Laguerre elements over a truncated distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreAverage {
    /// `sum_{n <= n_max} p_n <n|cos(kx)|n>`
    pub value: f64,
    /// `1 - value`, accumulated term by term (includes the tail mass).
    pub deficit: f64,
}

pub fn laguerre_average(dist: &FockDistribution, lambda: f64) -> LaguerreAverage {
    let y = lambda * lambda;
    let envelope = (-0.5 * y).exp();
    let ground_deficit = -(-0.5 * y).exp_m1();
    let mut value = CompensatedSum::default();
    let mut deficit = CompensatedSum::default();
    for (p, term) in dist.probabilities.iter().zip(LaguerreSeq::new(y)) {
        value.add(p * envelope * term.value);
        deficit.add(p * (ground_deficit + envelope * term.complement));
    }
    deficit.add(dist.tail_mass);
    LaguerreAverage {
        value: value.total(),
        deficit: deficit.total(),
    }
}

/// `<cos(k x)>` in the thermal state: the Gaussian characteristic function
/// `exp(-k^2 <x^2> / 2)`.
pub fn thermal_cos_exact(osc: &ThermalOscillator, k: f64) -> f64 {
    (-0.5 * k * k * osc.x_var).exp()
}
