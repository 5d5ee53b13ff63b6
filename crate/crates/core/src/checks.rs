//! Self-check suite: operator identities, model agreement and round trips.
//!
//! Every check reports a deviation and the tolerance it was held to. The
//! tolerances can be scaled globally, which is how a deliberately broken
//! run is produced.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::estimation::{
    closed_form_resolution, estimate_high_t, estimate_low_t, resolution_propagated, Observation,
    ResolutionFormula, DEFAULT_RELATIVE_STEP,
};
use crate::fock_oracle::{
    coherent_state, exact_m_stats, exact_two_mirror_phase, matrix_cos_diagonal,
    verify_kerr_identity, verify_phase_identity, FockDims,
};
use crate::interferometer::{mean_m, second_moment, MeasurementModel, ModelOptions};
use crate::params::{
    small_phase_parameter, validate, ExperimentSpec, Mirrors, PhysicalConstants, ValidatedSpec,
    REFERENCE_THERMAL_ENERGY,
};
use crate::thermal::{cos_diagonal, make_thermal, thermal_cos_exact, ThermalOscillator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub tolerance_scale: f64,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }
}

/// Raw result of one check: observed deviation, nominal tolerance, note.
struct Measured {
    deviation: f64,
    tolerance: f64,
    detail: String,
}

impl Measured {
    fn new(deviation: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            deviation,
            tolerance,
            detail: detail.into(),
        }
    }
}

type Check = (&'static str, fn() -> Result<Measured>);

const FAST: &[Check] = &[
    ("phase_identity", phase_identity),
    ("kerr_identity", kerr_identity),
    ("coherent_norm", coherent_norm),
    ("cos_diagonal_vs_matrix", cos_diagonal_vs_matrix),
    ("laguerre_vs_gaussian", laguerre_vs_gaussian),
    ("quadratic_vs_gaussian", quadratic_vs_gaussian),
    ("two_level_vs_laguerre", two_level_vs_laguerre),
    ("two_mirror_double_sum", two_mirror_double_sum),
    ("high_t_round_trip", high_t_round_trip),
    ("low_t_round_trip", low_t_round_trip),
    ("two_mirror_doubling", two_mirror_doubling),
    ("resolution_scaling", resolution_scaling),
    ("effective_frequency", effective_frequency_ratio),
    ("analytic_slope", analytic_slope),
    ("shot_noise_limit", shot_noise_limit),
];

const FULL: &[Check] = &[
    ("fock_linear_n4", || fock_linear(4.0)),
    ("fock_linear_n9", || fock_linear(9.0)),
    ("fock_linear_n16", || fock_linear(16.0)),
    ("fock_linear_n25", || fock_linear(25.0)),
    ("fock_two_mirror_n9", fock_two_mirror),
    ("kerr_residual_second_order", kerr_residual_order),
];

/// Names of the checks run at `level`, in order.
pub fn check_names(level: Level) -> Vec<&'static str> {
    checks(level).map(|(name, _)| *name).collect()
}

fn checks(level: Level) -> impl Iterator<Item = &'static Check> {
    let extra: &'static [Check] = match level {
        Level::Fast => &[],
        Level::Full => FULL,
    };
    FAST.iter().chain(extra.iter())
}

/// Runs the suite; each tolerance is multiplied by `tolerance_scale`.
pub fn run_verify(level: Level, tolerance_scale: f64) -> VerifyReport {
    let outcomes = checks(level)
        .map(|(name, f)| {
            let start = Instant::now();
            let result = f();
            let seconds = start.elapsed().as_secs_f64();
            match result {
                Ok(m) => {
                    let tolerance = m.tolerance * tolerance_scale;
                    CheckOutcome {
                        name,
                        passed: m.deviation <= tolerance,
                        deviation: m.deviation,
                        tolerance,
                        detail: m.detail,
                        seconds,
                    }
                }
                Err(e) => CheckOutcome {
                    name,
                    passed: false,
                    deviation: f64::NAN,
                    tolerance: f64::NAN,
                    detail: e.to_string(),
                    seconds,
                },
            }
        })
        .collect();
    VerifyReport {
        level,
        tolerance_scale,
        outcomes,
    }
}

fn reference(chi: f64) -> ValidatedSpec {
    validate(&ExperimentSpec::reference().with_chi(chi)).expect("reference parameters are valid")
}

fn reference_temperature() -> f64 {
    REFERENCE_THERMAL_ENERGY / PhysicalConstants::SI.boltzmann
}

/// Natural units with `m = omega = hbar = c = 1` and `k x_zpf = lambda`.
fn natural(lambda: f64, photons: f64, chi: f64) -> ValidatedSpec {
    let mut s = ExperimentSpec::reference()
        .with_chi(chi)
        .with_photon_number(photons);
    s.constants = PhysicalConstants::NATURAL;
    s.sample.mass = 1.0;
    s.sample.omega = 1.0;
    s.light.omega_p = lambda * 2f64.sqrt();
    validate(&s).expect("natural-unit parameters are valid")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

const ANGLES: [f64; 3] = [0.1, 0.7, 2.9];

fn phase_identity() -> Result<Measured> {
    let dev = ANGLES
        .iter()
        .map(|&p| verify_phase_identity(30, p))
        .fold(0.0, f64::max);
    Ok(Measured::new(dev, 1e-12, "dim 30"))
}

fn kerr_identity() -> Result<Measured> {
    let mut dev: f64 = 0.0;
    for &theta in &ANGLES {
        for chi in [0.0, 0.05] {
            dev = dev.max(verify_kerr_identity(30, theta, chi));
        }
    }
    Ok(Measured::new(dev, 1e-12, "dim 30, chi in {0, 0.05}"))
}

fn coherent_norm() -> Result<Measured> {
    let psi = coherent_state(5f64.sqrt(), 40)?;
    Ok(Measured::new(
        (psi.norm_squared() - 1.0).abs(),
        1e-10,
        "|beta|^2 = 5, dim 40",
    ))
}

fn cos_diagonal_vs_matrix() -> Result<Measured> {
    let dev = [0, 1, 5, 9]
        .iter()
        .map(|&n| (cos_diagonal(n, 0.3) - matrix_cos_diagonal(n, 0.3, 80)).abs())
        .fold(0.0, f64::max);
    Ok(Measured::new(dev, 1e-12, "lambda 0.3, dim 80"))
}

fn laguerre_vs_gaussian() -> Result<Measured> {
    let opts = ModelOptions::overriding();
    let mut dev: f64 = 0.0;
    for mirrors in [Mirrors::OneThermal, Mirrors::TwoThermal] {
        let v = natural(0.3, 1.0, 0.0).with_mirrors(mirrors);
        for ratio in [0.01, 0.1, 1.0, 10.0] {
            let t = v.temperature_for_ratio(ratio);
            let l = mean_m(&v, t, MeasurementModel::LaguerreSum, &opts)?;
            let g = mean_m(&v, t, MeasurementModel::ExactGaussian, &opts)?;
            dev = dev.max((l.deficit - g.deficit).abs() - opts.truncation_tol);
        }
    }
    Ok(Measured::new(
        dev.max(0.0),
        1e-10,
        "per photon, beyond tail mass",
    ))
}

/// The continuum model omits the ground-state `x_zpf^2` in `<x^2>`, so the
/// bound is the second-order remainder plus that offset.
fn quadratic_vs_gaussian() -> Result<Measured> {
    // the grid ends on the threshold, where rounding may tip the classifier
    let opts = ModelOptions::overriding();
    let mut worst: f64 = 0.0;
    for chi in [0.0, 1e-8] {
        let v = reference(chi);
        for ratio in log_grid(1e-12, 1e-2, 20) {
            let t = v.temperature_for_ratio(ratio);
            let q = mean_m(&v, t, MeasurementModel::QuadraticHighT, &opts)?;
            let g = mean_m(&v, t, MeasurementModel::ExactGaussian, &opts)?;
            let n = v.photon_number();
            let s = small_phase_parameter(&v, t)?;
            let bound = s * s / 8.0
                + 0.5 * v.wavenumber().powi(2) * v.zero_point_variance()
                + 4.0 * f64::EPSILON * q.deficit / n;
            worst = worst.max((q.deficit - g.deficit).abs() / n / bound);
        }
    }
    Ok(Measured::new(
        worst,
        1.0,
        "ratio to s^2/8 + k^2 x_zpf^2 / 2",
    ))
}

fn two_level_vs_laguerre() -> Result<Measured> {
    let v = reference(0.0);
    let b = v.ground_correction();
    let opts = ModelOptions::default();
    let mut dev: f64 = 0.0;
    for ratio in [100.0, 300.0, 1000.0] {
        let t = v.temperature_for_ratio(ratio);
        let a = mean_m(&v, t, MeasurementModel::TwoLevelLowT, &opts)?;
        let l = mean_m(&v, t, MeasurementModel::LaguerreSum, &opts)?;
        dev = dev.max((a.deficit - l.deficit).abs() / v.photon_number() / b);
    }
    Ok(Measured::new(dev, 1e-3, "relative to b"))
}

fn two_mirror_double_sum() -> Result<Measured> {
    let mut dev: f64 = 0.0;
    for ratio in [0.5, 2.0] {
        let osc = ThermalOscillator::from_ratio(ratio, 1.0);
        let k = 0.4;
        let literal = exact_two_mirror_phase(&osc, k, 1e-15)?;
        let one = thermal_cos_exact(&osc, k);
        dev = dev.max((literal - one * one).abs());
    }
    Ok(Measured::new(dev, 1e-12, "double sum vs squared Gaussian"))
}

fn high_t_round_trip() -> Result<Measured> {
    let opts = ModelOptions::default();
    let mut dev: f64 = 0.0;
    for chi in [0.0, 1e-8] {
        for mirrors in [Mirrors::OneThermal, Mirrors::TwoThermal] {
            let v = reference(chi).with_mirrors(mirrors);
            for ratio in [1e-11, 1e-6, 1e-3] {
                let t = v.temperature_for_ratio(ratio);
                let s = mean_m(&v, t, MeasurementModel::QuadraticHighT, &opts)?;
                let e = estimate_high_t(&v, Observation::from_stats(&s))?;
                dev = dev.max(rel(e.t_hat, t));
            }
        }
    }
    Ok(Measured::new(dev, 1e-12, "relative"))
}

fn low_t_round_trip() -> Result<Measured> {
    let v = natural(0.5, 1024.0, 0.0);
    let opts = ModelOptions::default();
    let mut dev: f64 = 0.0;
    for ratio in [100.0, 300.0, 700.0] {
        let t = v.temperature_for_ratio(ratio);
        let s = mean_m(&v, t, MeasurementModel::TwoLevelLowT, &opts)?;
        let e = estimate_low_t(&v, Observation::from_stats(&s))?;
        dev = dev.max(rel(e.t_hat, t));
    }
    Ok(Measured::new(dev, 1e-10, "relative"))
}

fn two_mirror_doubling() -> Result<Measured> {
    let one = reference(0.0);
    let two = one.with_mirrors(Mirrors::TwoThermal);
    let t = reference_temperature();
    let opts = ModelOptions::default();
    let a = mean_m(&one, t, MeasurementModel::QuadraticHighT, &opts)?;
    let b = mean_m(&two, t, MeasurementModel::QuadraticHighT, &opts)?;
    let single = closed_form_resolution(&one, ResolutionFormula::SingleMirror);
    let double = closed_form_resolution(&one, ResolutionFormula::TwoMirror);
    let dev = (b.deficit - 2.0 * a.deficit).abs() + (double - single / 2.0).abs();
    Ok(Measured::new(dev, 0.0, "exact"))
}

fn resolution_scaling() -> Result<Measured> {
    let base = ExperimentSpec::reference().with_chi(0.0);
    let single = |s: &ExperimentSpec| -> Result<f64> {
        Ok(closed_form_resolution(
            &validate(s)?,
            ResolutionFormula::SingleMirror,
        ))
    };
    let lossy = |s: &ExperimentSpec| -> Result<f64> {
        Ok(closed_form_resolution(
            &validate(s)?,
            ResolutionFormula::Lossy,
        ))
    };
    let mut dev: f64 = 0.0;
    for n in [1e8, 1e10, 1e12] {
        let s = base.with_photon_number(n);
        dev = dev.max(rel(
            single(&s.with_photon_number(2.0 * n))?,
            single(&s)? / 2.0,
        ));
    }
    for wp in [1e8, 1e10, 1e12] {
        let mut s = base;
        s.light.omega_p = wp;
        let mut faster = s;
        faster.light.omega_p = 10.0 * wp;
        dev = dev.max(rel(single(&faster)?, single(&s)? / 100.0));
    }
    let kerr = base.with_chi(1e-8);
    for eta in [0.1, 0.5, 0.9] {
        dev = dev.max(rel(lossy(&kerr.with_loss(eta, 1.0))?, lossy(&kerr)? / eta));
    }
    Ok(Measured::new(dev, 1e-12, "N, omega_p and eta grids"))
}

fn effective_frequency_ratio() -> Result<Measured> {
    let v = reference(1e-8);
    let ratio = v.effective_omega_p() / v.spec().light.omega_p;
    Ok(Measured::new(
        (ratio - 51.0).abs(),
        1e-6,
        format!("ratio {ratio}"),
    ))
}

fn analytic_slope() -> Result<Measured> {
    let mut dev: f64 = 0.0;
    for mirrors in [Mirrors::OneThermal, Mirrors::TwoThermal] {
        let v = reference(1e-8).with_mirrors(mirrors);
        let r = resolution_propagated(
            &v,
            reference_temperature(),
            MeasurementModel::QuadraticHighT,
            &ModelOptions::default(),
            DEFAULT_RELATIVE_STEP,
        )?;
        dev = dev.max(rel(r.dm_dt, r.dm_dt_analytic.unwrap_or(f64::NAN)));
    }
    Ok(Measured::new(dev, 1e-6, "numeric vs analytic d<M>/dT"))
}

fn shot_noise_limit() -> Result<Measured> {
    let mut s = ExperimentSpec::reference().with_chi(0.0);
    s.light.omega_p = 1e-3;
    let v = validate(&s)?;
    let stats = second_moment(
        &v,
        reference_temperature(),
        MeasurementModel::ExactGaussian,
        &ModelOptions::default(),
    )?;
    let sec = stats.second.expect("second moment requested");
    let n = v.photon_number();
    Ok(Measured::new(
        rel(sec.delta_m, n.sqrt()),
        1e-8,
        "Delta M vs sqrt(N)",
    ))
}

/// Linear one-mirror oracle against `N exp(-k^2 <x^2> / 2)`.
fn fock_linear(photons: f64) -> Result<Measured> {
    let v = natural(0.3, photons, 0.0);
    let t = v.temperature_for_ratio(2f64.ln());
    let stats = exact_m_stats(&v, t, Mirrors::OneThermal, false, &FockDims::default())?;
    let osc = make_thermal(&v, t)?;
    let expected = photons * thermal_cos_exact(&osc, v.wavenumber());
    Ok(Measured::new(
        (stats.mean_m - expected).abs(),
        1e-8,
        format!("N = {photons}"),
    ))
}

fn fock_two_mirror() -> Result<Measured> {
    let v = natural(0.3, 9.0, 0.0).with_mirrors(Mirrors::TwoThermal);
    let t = v.temperature_for_ratio(2f64.ln());
    let opts = ModelOptions::overriding();
    let fock = mean_m(&v, t, MeasurementModel::FockBruteForce, &opts)?;
    let g = mean_m(&v, t, MeasurementModel::ExactGaussian, &opts)?;
    Ok(Measured::new((fock.mean_m - g.mean_m).abs(), 1e-8, "N = 9"))
}

/// Oracle vs the `omega_p'` substitution: the residual should shrink about
/// fourfold when `chi` halves.
fn kerr_residual_order() -> Result<Measured> {
    let opts = ModelOptions::overriding();
    let residual = |chi: f64| -> Result<f64> {
        let v = natural(0.3, 4.0, chi);
        let t = v.temperature_for_ratio(2f64.ln());
        let fock = mean_m(&v, t, MeasurementModel::FockBruteForce, &opts)?;
        let g = mean_m(&v, t, MeasurementModel::ExactGaussian, &opts)?;
        Ok((fock.mean_m - g.mean_m).abs())
    };
    let ratio = residual(1e-3)? / residual(5e-4)?;
    Ok(Measured::new(
        ((ratio.log2() - 2.0) / 2.0).abs(),
        0.05,
        format!("halving ratio {ratio:.4}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let report = run_verify(Level::Fast, 1.0);
        for o in &report.outcomes {
            assert!(
                o.passed,
                "{} {:e} > {:e} ({})",
                o.name, o.deviation, o.tolerance, o.detail
            );
        }
        assert!(report.outcomes.len() >= 12);
    }

    #[test]
    fn tampered_tolerance_fails() {
        let report = run_verify(Level::Fast, 1e-300);
        assert!(!report.all_passed());
        assert!(report.failures() > 0);
    }

    #[test]
    fn full_adds_oracle_checks() {
        let fast = check_names(Level::Fast);
        let full = check_names(Level::Full);
        assert!(full.len() > fast.len());
        assert!(full.contains(&"fock_linear_n25"));
    }
}
