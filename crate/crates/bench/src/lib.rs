//! Shared fixtures for the benchmarks.

use thermofringe::{validate, ExperimentSpec, PhysicalConstants, ValidatedSpec};

/// Thermal energy of the reference point, in joules.
pub const THERMAL_ENERGY: f64 = 1e-21;

/// The reference setup with Kerr gas.
pub fn reference() -> ValidatedSpec {
    validate(&ExperimentSpec::reference()).expect("reference parameters are valid")
}

pub fn reference_temperature() -> f64 {
    THERMAL_ENERGY / PhysicalConstants::SI.boltzmann
}

/// Natural units with `k x_zpf = lambda`, used where Fock sums must stay short.
pub fn natural(lambda: f64, photons: f64, chi: f64) -> ValidatedSpec {
    let mut s = ExperimentSpec::reference()
        .with_chi(chi)
        .with_photon_number(photons);
    s.constants = PhysicalConstants::NATURAL;
    s.sample.mass = 1.0;
    s.sample.omega = 1.0;
    s.light.omega_p = lambda * 2f64.sqrt();
    validate(&s).expect("natural-unit parameters are valid")
}
