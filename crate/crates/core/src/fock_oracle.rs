//! Brute-force truncated Fock-space oracle.
//!
//! The optical arms are dense `dim x dim` matrices acting on truncated
//! coherent states. The mechanical modes are never tensored in: every arm
//! unitary is diagonal in the photon-number basis with phase
//! `k x h(m)`, so an operator element `O_ab` only picks up
//! `exp(i k x (h_a - h_b))`, whose thermal average is an exact Laguerre sum
//! over the mechanical Fock levels.
//!
//! Operator identities are compared on the interior block only; the last two
//! rows and columns carry truncation artifacts by construction.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interferometer::{MeasurementModel, MeasurementStats, SecondMoment};
use crate::params::{Mirrors, ValidatedSpec};
use crate::thermal::{
    cos_diagonal, fock_distribution_with_cap, laguerre_average, make_thermal, FockDistribution,
    ThermalOscillator, DEFAULT_TRUNCATION_CAP,
};

/// Largest photon number the oracle accepts by default.
pub const DEFAULT_PHOTON_CAP: f64 = 25.0;
/// Allowed coherent-state norm deficit after truncation.
pub const COHERENT_NORM_TOL: f64 = 1e-10;

const EDGE: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMode {
    dim: usize,
    lowering: DMatrix<Complex64>,
}

impl TruncatedMode {
    pub fn new(dim: usize) -> Self {
        let mut lowering = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            lowering[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Self { dim, lowering }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lowering(&self) -> &DMatrix<Complex64> {
        &self.lowering
    }

    pub fn raising(&self) -> DMatrix<Complex64> {
        self.lowering.adjoint()
    }

    pub fn number(&self) -> DMatrix<Complex64> {
        self.raising() * &self.lowering
    }

    /// `diag(exp(-i phase(n)))`
    pub fn diagonal_unitary(&self, phase: impl Fn(usize) -> f64) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_fn(self.dim, |n, _| {
            Complex64::from_polar(1.0, -phase(n))
        }))
    }
}

fn interior_max_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows().saturating_sub(EDGE);
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Max interior deviation of `U^dag A U` from `exp(-i phase) A` for
/// `U = exp(-i phase n)`.
pub fn verify_phase_identity(dim: usize, phase: f64) -> f64 {
    let mode = TruncatedMode::new(dim.max(3));
    let u = mode.diagonal_unitary(|n| phase * n as f64);
    let rotated = u.adjoint() * mode.lowering() * &u;
    let expected = mode.lowering() * Complex64::from_polar(1.0, -phase);
    interior_max_deviation(&rotated, &expected)
}

/// Max interior deviation of `U^dag A U` from
/// `exp(-i theta (1 + chi/2)) exp(-i theta chi n) A` for
/// `U = exp(-i theta (n + chi/2 n^2))`.
pub fn verify_kerr_identity(dim: usize, theta: f64, chi: f64) -> f64 {
    let mode = TruncatedMode::new(dim.max(3));
    let u = mode.diagonal_unitary(|n| {
        let n = n as f64;
        theta * (n + 0.5 * chi * n * n)
    });
    let rotated = u.adjoint() * mode.lowering() * &u;
    let number_phase = mode.diagonal_unitary(|n| theta * chi * n as f64);
    let expected =
        number_phase * mode.lowering() * Complex64::from_polar(1.0, -theta * (1.0 + 0.5 * chi));
    interior_max_deviation(&rotated, &expected)
}

/// Truncated coherent state with real amplitude `beta`.
pub fn coherent_state(beta: f64, dim: usize) -> Result<DVector<Complex64>> {
    let mut amp = Vec::with_capacity(dim);
    let mut c = (-0.5 * beta * beta).exp();
    for m in 0..dim {
        amp.push(Complex64::new(c, 0.0));
        c *= beta / ((m + 1) as f64).sqrt();
    }
    let psi = DVector::from_vec(amp);
    let norm_deficit = (1.0 - psi.norm_squared()).abs();
    if dim == 0 || norm_deficit > COHERENT_NORM_TOL {
        return Err(Error::TruncationTooSmall { dim, norm_deficit });
    }
    Ok(psi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockDims {
    /// Optical cutoff per arm; `None` picks `ceil(N + 10 sqrt(N)) + 8`.
    pub optical: Option<usize>,
    /// Tail tolerance for the mechanical Fock distribution.
    pub mechanical_tol: f64,
    pub mechanical_cap: usize,
    pub photon_cap: f64,
}

impl Default for FockDims {
    fn default() -> Self {
        Self {
            optical: None,
            mechanical_tol: 1e-14,
            mechanical_cap: DEFAULT_TRUNCATION_CAP,
            photon_cap: DEFAULT_PHOTON_CAP,
        }
    }
}

fn min_optical_dim(photons: f64) -> usize {
    (photons + 10.0 * photons.sqrt()).ceil() as usize
}

/// Input state: both arms in `|alpha/sqrt2>`, mechanical modes thermal.
#[derive(Debug, Clone)]
pub struct CompositeState {
    pub optical1: DVector<Complex64>,
    pub optical2: DVector<Complex64>,
    pub mechanical: FockDistribution,
}

impl CompositeState {
    pub fn new(photons: f64, dim: usize, mechanical: FockDistribution) -> Result<Self> {
        let beta = (0.5 * photons).sqrt();
        let optical1 = coherent_state(beta, dim)?;
        let optical2 = optical1.clone();
        Ok(Self {
            optical1,
            optical2,
            mechanical,
        })
    }
}

/// Raw optical moments before any loss scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMoments {
    pub mean_m: f64,
    pub mean_m2: f64,
    /// `<A1^dag A1 + A2^dag A2>`
    pub photons: f64,
    /// Largest imaginary part seen in `<M>` or `<M^2>`.
    pub imaginary_residue: f64,
}

struct Arm<'a> {
    psi: &'a DVector<Complex64>,
    /// Photon-number phase profile `h(m)`; `None` means the arm is fixed.
    profile: Option<Vec<f64>>,
}

struct PhaseAverager<'a> {
    dist: &'a FockDistribution,
    k: f64,
    x_zpf: f64,
}

impl PhaseAverager<'_> {
    /// Thermal average of `exp(i k x delta)`.
    fn average(&self, delta: f64) -> f64 {
        if delta == 0.0 {
            return 1.0;
        }
        laguerre_average(self.dist, self.k * delta * self.x_zpf).value
    }
}

impl Arm<'_> {
    fn expectation(&self, op: &DMatrix<Complex64>, phases: &PhaseAverager<'_>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..op.nrows() {
            for b in 0..op.ncols() {
                let o = op[(a, b)];
                if o == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let weight = match &self.profile {
                    Some(h) => phases.average(h[a] - h[b]),
                    None => 1.0,
                };
                acc += self.psi[a].conj() * o * self.psi[b] * weight;
            }
        }
        acc
    }
}

/// Exact `<M>`, `<M^2>` for photon number `photons` with the given thermal
/// oscillator. `kerr` switches on the `chi/2 n^2` phase; `k` is `omega_p/c`.
#[allow(clippy::too_many_arguments)]
pub fn oracle_moments(
    photons: f64,
    k: f64,
    refractive_index: f64,
    chi: f64,
    kerr: bool,
    mirrors: Mirrors,
    osc: &ThermalOscillator,
    dims: &FockDims,
) -> Result<OracleMoments> {
    if photons > dims.photon_cap {
        return Err(Error::PhotonNumberTooLarge {
            photons,
            cap: dims.photon_cap,
        });
    }
    let floor = min_optical_dim(photons);
    let dim = dims.optical.unwrap_or(floor + 8).max(3);
    if dim < floor {
        let psi: f64 = {
            let beta2 = 0.5 * photons;
            // norm captured by the requested cutoff, for the error report
            let mut c = (-beta2).exp();
            let mut s = 0.0;
            for m in 0..dim {
                s += c;
                c *= beta2 / (m + 1) as f64;
            }
            s
        };
        return Err(Error::TruncationTooSmall {
            dim,
            norm_deficit: 1.0 - psi,
        });
    }
    let mechanical = fock_distribution_with_cap(osc, dims.mechanical_tol, dims.mechanical_cap)?;
    let state = CompositeState::new(photons, dim, mechanical)?;

    let profile: Vec<f64> = (0..dim)
        .map(|m| {
            let m = m as f64;
            let nonlinear = if kerr { 0.5 * chi * m * m } else { 0.0 };
            refractive_index * (m + nonlinear)
        })
        .collect();
    let phases = PhaseAverager {
        dist: &state.mechanical,
        k,
        x_zpf: osc.x_zpf,
    };
    let arm1 = Arm {
        psi: &state.optical1,
        profile: match mirrors {
            Mirrors::OneThermal => None,
            Mirrors::TwoThermal => Some(profile.clone()),
        },
    };
    let arm2 = Arm {
        psi: &state.optical2,
        profile: Some(profile),
    };

    let mode = TruncatedMode::new(dim);
    let a = mode.lowering().clone();
    let ad = mode.raising();
    let a2 = &a * &a;
    let ad2 = &ad * &ad;
    let n_op = &ad * &a;
    let anti_n = &a * &ad;

    let e1 = |op: &DMatrix<Complex64>| arm1.expectation(op, &phases);
    let e2 = |op: &DMatrix<Complex64>| arm2.expectation(op, &phases);

    let mean = e1(&a) * e2(&ad) + e1(&ad) * e2(&a);
    let n1 = e1(&n_op);
    let n2 = e2(&n_op);
    let second = e2(&ad2) * e1(&a2) + n2 * e1(&anti_n) + e2(&anti_n) * n1 + e1(&ad2) * e2(&a2);

    Ok(OracleMoments {
        mean_m: mean.re,
        mean_m2: second.re,
        photons: (n1 + n2).re,
        imaginary_residue: mean.im.abs().max(second.im.abs()),
    })
}

/// Exact measurement statistics by brute force. Loss is applied afterwards as
/// a beam splitter on coherent light: the normally ordered part of `M^2`
/// scales with `eta^2`, the shot-noise part with `eta`.
pub fn exact_m_stats(
    spec: &ValidatedSpec,
    temperature: f64,
    mirrors: Mirrors,
    kerr_on: bool,
    dims: &FockDims,
) -> Result<MeasurementStats> {
    let osc = make_thermal(spec, temperature)?;
    let s = spec.spec();
    let k = s.light.omega_p / s.constants.light_speed;
    let raw = oracle_moments(
        s.light.photon_number,
        k,
        s.light.refractive_index,
        s.kerr.chi,
        kerr_on,
        mirrors,
        &osc,
        dims,
    )?;
    let eta = spec.efficiency();
    let photons = spec.detected_photons();
    let mean_m = eta * raw.mean_m;
    let mean_m2 = eta * eta * (raw.mean_m2 - raw.photons) + eta * raw.photons;
    let variance = mean_m2 - mean_m * mean_m;
    Ok(MeasurementStats {
        model: MeasurementModel::FockBruteForce,
        mirrors,
        temperature,
        effective_omega_p: spec.effective_omega_p(),
        mean_m,
        deficit: photons - mean_m,
        thermal_excess: None,
        second: Some(SecondMoment::from_variance(mean_m2, variance, photons)),
    })
}

/// `<cos(k (x1 - x2))>` for two independent identical oscillators as the
/// literal double sum over both Fock ladders.
pub fn exact_two_mirror_phase(osc: &ThermalOscillator, k: f64, tol: f64) -> Result<f64> {
    let dist = fock_distribution_with_cap(osc, tol, 20_000)?;
    let lambda = k * osc.x_zpf;
    let diag: Vec<f64> = (0..dist.probabilities.len())
        .map(|n| cos_diagonal(n, lambda))
        .collect();
    let mut total = 0.0;
    for (n, pn) in dist.probabilities.iter().enumerate() {
        let mut row = 0.0;
        for (m, pm) in dist.probabilities.iter().enumerate() {
            // <n|e^{ikx}|n> <m|e^{-ikx}|m>, both real
            row += pm * diag[m];
        }
        total += pn * diag[n] * row;
    }
    Ok(total)
}

/// `<n| cos(lambda (a + a^dag)) |n>` from the eigendecomposition of a
/// truncated position matrix.
pub fn matrix_cos_diagonal(n: usize, lambda: f64, dim: usize) -> f64 {
    let x = position_matrix(dim);
    let eig = SymmetricEigen::new(x);
    (0..dim)
        .map(|j| {
            let v = eig.eigenvectors[(n, j)];
            v * v * (lambda * eig.eigenvalues[j]).cos()
        })
        .sum()
}

/// `<n| x^2 |n>` from the truncated position matrix.
pub fn matrix_x2_diagonal(n: usize, x_zpf: f64, dim: usize) -> f64 {
    let x = position_matrix(dim) * x_zpf;
    (&x * &x)[(n, n)]
}

fn position_matrix(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else if i == j + 1 {
            (i as f64).sqrt()
        } else {
            0.0
        }
    })
}
