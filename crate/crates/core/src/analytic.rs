//! Closed-form readout model: qubit-conditioned pointer states of the
//! resonator, the distribution of the integrated output signal, outcome
//! probabilities, and the measurement-induced dephasing rate.
//!
//! Sign conventions follow the rotating-frame Hamiltonian
//! `H = (ε/2)σ_z + (δω + gσ_z)a†a + f(a + a†)`: with the qubit in the
//! sigma_z eigenstate `s` the resonator sees the detuning `δω + g s`, and the
//! pointer amplitude below is the exact conditional field of that Hamiltonian
//! started from the vacuum.

use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{SigmaZ, SystemParams};

/// Variance of a vacuum quadrature in these units, used by the zero-point
/// noise model in place of `S_II t`.
pub const ZERO_POINT_VARIANCE: f64 = 0.5;

fn wrap_phase(x: f64) -> f64 {
    let mut y = libm::remainder(x, 2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// Resonator amplitude conditioned on one qubit eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerState {
    pub sigma_z: SigmaZ,
    /// Steady-state modulus `f / sqrt(δω_i² + κ²/4)`.
    pub amplitude: f64,
    /// Steady-state phase, in (-π, π].
    pub phase: f64,
    /// Qubit-dependent detuning `δω_i = δω + g σ_z`.
    pub detuning: f64,
}

impl PointerState {
    pub fn steady(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }

    /// `α_i(t) = A_i e^{iφ_i} [1 - e^{-iδω_i t - κt/2}]`.
    pub fn alpha(&self, kappa: f64, t: f64) -> Complex64 {
        let decay = Complex64::new(-0.5 * kappa * t, -self.detuning * t).exp();
        self.steady() * (Complex64::new(1.0, 0.0) - decay)
    }
}

pub fn pointer_state(params: &SystemParams, sigma_z: SigmaZ) -> PointerState {
    let detuning = params.delta_omega + params.g * sigma_z.value();
    let half_kappa = 0.5 * params.kappa;
    let amplitude = params.f / libm::sqrt(detuning * detuning + half_kappa * half_kappa);
    let phase = wrap_phase(-libm::atan2(detuning, half_kappa) - FRAC_PI_2);
    PointerState {
        sigma_z,
        amplitude,
        phase,
        detuning,
    }
}

pub fn alpha_of_t(ps: &PointerState, kappa: f64, t: f64) -> Complex64 {
    ps.alpha(kappa, t)
}

/// Steady resonator amplitudes and photon numbers for both qubit states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyAmplitudes {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub n_plus: f64,
    pub n_minus: f64,
}

/// `α_±^s = -if / (κ/2 + i(δω ± g))`, `n_± = f² / [κ²/4 + (δω ± g)²]`.
pub fn steady_amplitudes(params: &SystemParams) -> SteadyAmplitudes {
    let half_kappa = 0.5 * params.kappa;
    let amp = |det: f64| Complex64::new(0.0, -params.f) / Complex64::new(half_kappa, det);
    let photons = |det: f64| params.f * params.f / (half_kappa * half_kappa + det * det);
    let plus = params.delta_omega + params.g;
    let minus = params.delta_omega - params.g;
    SteadyAmplitudes {
        alpha_plus: amp(plus),
        alpha_minus: amp(minus),
        n_plus: photons(plus),
        n_minus: photons(minus),
    }
}

/// `A = f (e^{2iφ₀} - e^{2iφ₁}) / √2`, with φ₀ for σ_z = +1 and φ₁ for σ_z = -1.
pub fn signal_amplitude(params: &SystemParams) -> Complex64 {
    let phi0 = pointer_state(params, SigmaZ::Plus).phase;
    let phi1 = pointer_state(params, SigmaZ::Minus).phase;
    let e = |phi: f64| Complex64::from_polar(1.0, 2.0 * phi);
    (e(phi0) - e(phi1)) * (params.f / SQRT_2)
}

/// Separation `δx(t) = |A| t` of the two outcome distributions along the
/// quadrature rotated to `arg A`.
pub fn signal_separation(params: &SystemParams, t: f64) -> f64 {
    signal_amplitude(params).norm() * t
}

/// Density of the integrated signal at `x` given the qubit state:
/// a Gaussian with mean `√2 Re α_i(t)` and variance `S_II t`.
pub fn conditional_signal_pdf(params: &SystemParams, sigma_z: SigmaZ, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            requirement: "> 0",
        });
    }
    let mean = SQRT_2 * pointer_state(params, sigma_z).alpha(params.kappa, t).re;
    let var = params.s_ii * t;
    let dx = x - mean;
    Ok(libm::exp(-dx * dx / (2.0 * var)) / libm::sqrt(2.0 * PI * var))
}

/// Which noise broadens the integrated signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    /// Detector back-action: variance `S_II t`.
    Backaction,
    /// Vacuum quadrature noise: variance [`ZERO_POINT_VARIANCE`].
    ZeroPoint,
}

/// `P(I, t) = ½[1 + I ⟨σ_z⟩₀ erf(|A| t / sqrt(2 var))]` for a given `|A|`.
pub fn probability_from_amplitude(
    abs_a: f64,
    s_ii: f64,
    sz0: f64,
    t: f64,
    outcome: SigmaZ,
    noise: NoiseModel,
) -> Result<f64> {
    if !(sz0.abs() <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "sz0",
            requirement: "in [-1, 1]",
        });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            requirement: ">= 0",
        });
    }
    let arg = match noise {
        NoiseModel::Backaction => abs_a * libm::sqrt(t) / libm::sqrt(2.0 * s_ii),
        NoiseModel::ZeroPoint => abs_a * t / libm::sqrt(2.0 * ZERO_POINT_VARIANCE),
    };
    let x = outcome.value() * sz0 * libm::erf(arg);
    // the likelier outcome is formed in [0.5, 1] so that 1 - p is exact and
    // the two outcomes sum to exactly one
    let likely = 0.5 * (1.0 + x.abs());
    Ok(if x >= 0.0 { likely } else { 1.0 - likely })
}

pub fn outcome_probability_with(
    params: &SystemParams,
    sz0: f64,
    t: f64,
    outcome: SigmaZ,
    noise: NoiseModel,
) -> Result<f64> {
    let abs_a = signal_amplitude(params).norm();
    probability_from_amplitude(abs_a, params.s_ii, sz0, t, outcome, noise)
}

/// Outcome probability with back-action noise.
pub fn outcome_probability(params: &SystemParams, sz0: f64, t: f64, outcome: SigmaZ) -> Result<f64> {
    outcome_probability_with(params, sz0, t, outcome, NoiseModel::Backaction)
}

/// `Γ_m = (n_+ + n_-) κ g² / (κ²/4 + g² + δω²)`.
pub fn gamma_m(params: &SystemParams) -> f64 {
    let s = steady_amplitudes(params);
    let k = params.kappa;
    let g = params.g;
    let dw = params.delta_omega;
    (s.n_plus + s.n_minus) * k * g * g / (0.25 * k * k + g * g + dw * dw)
}

/// The same rate from the steady amplitudes, `2g Im(α_-^s conj(α_+^s))`.
///
/// The conjugate is what makes this equal to [`gamma_m`]; the unconjugated
/// product `α_+^s α_-^s` does not reproduce it.
pub fn gamma_m_from_amplitudes(params: &SystemParams) -> f64 {
    let s = steady_amplitudes(params);
    2.0 * params.g * (s.alpha_minus * s.alpha_plus.conj()).im
}

/// Pointer-state overlap at time `t` from the rate formula and from the
/// coherent states themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapDecay {
    /// `e^{-Γ_m t}`.
    pub formula: f64,
    /// `|⟨α_-(t)|α_+(t)⟩| = exp(-|α_+(t) - α_-(t)|² / 2)`.
    pub exact: f64,
}

pub fn overlap_decay(params: &SystemParams, t: f64) -> OverlapDecay {
    let plus = pointer_state(params, SigmaZ::Plus).alpha(params.kappa, t);
    let minus = pointer_state(params, SigmaZ::Minus).alpha(params.kappa, t);
    OverlapDecay {
        formula: libm::exp(-gamma_m(params) * t),
        exact: libm::exp(-0.5 * (plus - minus).norm_sqr()),
    }
}

/// Dephasing rate `κ n̄ θ₀²`, `θ₀ = arctan(2g/κ)`, valid for δω = 0 and g ≪ κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakCouplingRate {
    pub rate: f64,
    /// `f² / (κ²/4 + g²)`, the photon number for either qubit state at δω = 0.
    pub n_bar: f64,
    pub theta0: f64,
    /// δω ≠ 0 was supplied; the expression assumes a resonant drive.
    pub detuned: bool,
    /// g > κ/5, outside the weak-coupling regime.
    pub strong_coupling: bool,
}

pub fn weak_coupling_gamma_m(params: &SystemParams) -> WeakCouplingRate {
    let k = params.kappa;
    let g = params.g;
    let n_bar = params.f * params.f / (0.25 * k * k + g * g);
    let theta0 = libm::atan(2.0 * g / k);
    WeakCouplingRate {
        rate: k * n_bar * theta0 * theta0,
        n_bar,
        theta0,
        detuned: params.delta_omega != 0.0,
        strong_coupling: g.abs() > k / 5.0,
    }
}
