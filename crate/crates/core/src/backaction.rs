//! Qubit dynamics under the photon-number noise of the driven resonator
//! when the coupling is not aligned with the qubit energy axis.
//!
//! The coupling is `g σ_n δn` with `σ_n = cos η σ_z + sin η σ_x` in the qubit
//! energy basis. Second-order perturbation theory in `g` gives relaxation,
//! excitation and dephasing rates set by the number-noise spectrum.
//!
//! Spectral densities are full-axis transforms,
//! `S(ω) = ∫_{-∞}^{∞} dτ e^{iωτ} C(τ)`. A one-sided transform is half of this
//! at points where the spectrum is symmetric.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::ode;
use crate::params::SystemParams;
use crate::state::{HERMITIAN_TOL, TRACE_TOL};

/// Energy eigenbasis of `(ε/2)σ_z + (Δ/2)σ_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitEigenbasis {
    /// Mixing angle `atan2(Δ, ε)`.
    pub eta: f64,
    /// `E = sqrt(ε² + Δ²)`.
    pub splitting: f64,
    /// `cos(η/2)|0⟩ + sin(η/2)|1⟩`, energy `+E/2`.
    pub up: [Complex64; 2],
    /// `-sin(η/2)|0⟩ + cos(η/2)|1⟩`, energy `-E/2`.
    pub down: [Complex64; 2],
}

impl QubitEigenbasis {
    /// `σ_n = cos η σ_z + sin η σ_x`, written in the energy basis (up first).
    pub fn sigma_n(&self) -> ComplexMatrix {
        let (s, c) = libm::sincos(self.eta);
        ComplexMatrix::from_real(2, 2, &[c, s, s, -c]).expect("2x2")
    }

    /// Energies `[+E/2, -E/2]` of the up and down states.
    pub fn energies(&self) -> [f64; 2] {
        [0.5 * self.splitting, -0.5 * self.splitting]
    }
}

pub fn eigenbasis(epsilon: f64, delta: f64) -> Result<QubitEigenbasis> {
    if epsilon == 0.0 && delta == 0.0 {
        return Err(Error::UndefinedMixingAngle);
    }
    if !epsilon.is_finite() || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "epsilon, delta",
            requirement: "finite",
        });
    }
    let eta = libm::atan2(delta, epsilon);
    let (s, c) = libm::sincos(0.5 * eta);
    Ok(QubitEigenbasis {
        eta,
        splitting: libm::hypot(epsilon, delta),
        up: [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        down: [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    })
}

/// Lorentzian number noise of the driven resonator at its operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpectrum {
    pub n_bar: f64,
    pub kappa: f64,
    pub delta_omega: f64,
}

impl NoiseSpectrum {
    /// Operating point `n̄ = f² / (κ²/4 + δω²)`, qubit pull neglected.
    pub fn from_params(params: &SystemParams) -> Self {
        let hk = 0.5 * params.kappa;
        NoiseSpectrum {
            n_bar: params.f * params.f / (hk * hk + params.delta_omega * params.delta_omega),
            kappa: params.kappa,
            delta_omega: params.delta_omega,
        }
    }

    /// `C(τ) = ⟨δn(τ)δn(0)⟩ = n̄ e^{-iδωτ - κ|τ|/2}`.
    pub fn correlator(&self, tau: f64) -> Complex64 {
        let c = Complex64::new(-0.5 * self.kappa * tau.abs(), -self.delta_omega * tau).exp();
        c * self.n_bar
    }

    /// `S(ω) = n̄κ / [(ω - δω)² + κ²/4]`.
    pub fn density(&self, omega: f64) -> f64 {
        let x = omega - self.delta_omega;
        self.n_bar * self.kappa / (x * x + 0.25 * self.kappa * self.kappa)
    }

    /// `∫₀ᵗ dτ C(τ) e^{-iωτ}`; `t = ∞` is allowed.
    pub fn partial_transform(&self, omega: f64, t: f64) -> Complex64 {
        let z = Complex64::new(0.5 * self.kappa, self.delta_omega + omega);
        let tail = if t.is_infinite() {
            Complex64::new(0.0, 0.0)
        } else {
            (-z * t).exp()
        };
        (Complex64::new(1.0, 0.0) - tail) / z * self.n_bar
    }

    /// `∫₀ᵗ dτ C(τ)* e^{-iωτ}`, the reversed operator ordering.
    pub fn partial_transform_reversed(&self, omega: f64, t: f64) -> Complex64 {
        self.partial_transform(-omega, t).conj()
    }
}

pub fn number_correlator(params: &SystemParams, tau: f64) -> Complex64 {
    NoiseSpectrum::from_params(params).correlator(tau)
}

pub fn spectral_density(params: &SystemParams, omega: f64) -> f64 {
    NoiseSpectrum::from_params(params).density(omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub gamma_down: f64,
    pub gamma_up: f64,
    /// Total coherence decay `(Γ_↑ + Γ_↓)/2 + γ_φ`.
    pub gamma_phi: f64,
    pub gamma_phi_pure: f64,
    /// From `Γ_↑/Γ_↓ = exp(-E/T_eff)`; negative under inversion, `+∞` when
    /// the rates are equal.
    pub t_eff: f64,
}

impl RateSet {
    pub fn relaxation_rate(&self) -> f64 {
        self.gamma_up + self.gamma_down
    }

    /// Long-time population of the up state.
    pub fn up_population(&self) -> f64 {
        let total = self.relaxation_rate();
        if total > 0.0 {
            self.gamma_up / total
        } else {
            f64::NAN
        }
    }
}

/// Golden-rule rates for the coupling `g σ_n δn`.
pub fn rates(params: &SystemParams, basis: &QubitEigenbasis) -> Result<RateSet> {
    if !(basis.splitting > 0.0) {
        return Err(Error::InvalidParameter {
            name: "splitting",
            requirement: "> 0",
        });
    }
    let spec = NoiseSpectrum::from_params(params);
    let e = basis.splitting;
    let (s, c) = libm::sincos(basis.eta);
    let g2 = params.g * params.g;
    let gamma_down = g2 * s * s * spec.density(e);
    let gamma_up = g2 * s * s * spec.density(-e);
    let gamma_phi_pure = g2 * c * c * spec.density(0.0);
    let gamma_phi = 0.5 * (gamma_up + gamma_down) + gamma_phi_pure;

    let t_eff = if gamma_down == 0.0 {
        if gamma_up > 0.0 {
            return Err(Error::UndefinedTemperature { gamma_up });
        }
        f64::INFINITY
    } else if gamma_up == gamma_down {
        f64::INFINITY
    } else {
        -e / libm::log(gamma_up / gamma_down)
    };

    Ok(RateSet {
        gamma_down,
        gamma_up,
        gamma_phi,
        gamma_phi_pure,
        t_eff,
    })
}

/// Indexed `[k][k'][l][l']`, acting as `ρ̇_{kk'} = -Σ M_{kk'll'} ρ_{ll'}`.
pub type Tensor4 = [[[[Complex64; 2]; 2]; 2]; 2];

fn zero_tensor() -> Tensor4 {
    [[[[Complex64::new(0.0, 0.0); 2]; 2]; 2]; 2]
}

fn sigma_n_interaction(basis: &QubitEigenbasis, t: f64) -> Op2 {
    let e = basis.energies();
    let s = basis.sigma_n();
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            out[k][l] = s[(k, l)] * Complex64::new(0.0, (e[k] - e[l]) * t).exp();
        }
    }
    out
}

type Op2 = [[Complex64; 2]; 2];

/// `g² [(σ A) ⊗ 1 - A ρ σ + 1 ⊗ (B σ) - σ ρ B]` in tensor form, with
/// `σ = σ(t)` and `A`, `B` the past operator `σ(t - τ)` weighted by `C(τ)`
/// and `C(τ)*` respectively.
fn assemble(g2: f64, now: &Op2, pa: &Op2, pb: &Op2) -> Tensor4 {
    let mut m = zero_tensor();
    for k in 0..2 {
        for kp in 0..2 {
            for l in 0..2 {
                for lp in 0..2 {
                    let mut v = Complex64::new(0.0, 0.0);
                    if kp == lp {
                        for j in 0..2 {
                            v += now[k][j] * pa[j][l];
                        }
                    }
                    v -= pa[k][l] * now[lp][kp];
                    if k == l {
                        for j in 0..2 {
                            v += pb[lp][j] * now[j][kp];
                        }
                    }
                    v -= now[k][l] * pb[lp][kp];
                    m[k][kp][l][lp] = v * g2;
                }
            }
        }
    }
    m
}

/// Memory kernel `M(t, τ)` of the second-order equation of motion for the
/// interaction-picture qubit state.
pub fn redfield_tensor(params: &SystemParams, basis: &QubitEigenbasis, t: f64, tau: f64) -> Tensor4 {
    let spec = NoiseSpectrum::from_params(params);
    let now = sigma_n_interaction(basis, t);
    let before = sigma_n_interaction(basis, t - tau);
    let c = spec.correlator(tau);
    let weight = |w: Complex64| before.map(|row| row.map(|x| x * w));
    assemble(params.g * params.g, &now, &weight(c), &weight(c.conj()))
}

/// `∫₀ᵗ M(t, τ) dτ` in closed form; `t = ∞` in the transforms gives the
/// Markov limit of the coefficients.
pub fn integrated_redfield_tensor(
    params: &SystemParams,
    basis: &QubitEigenbasis,
    t: f64,
    memory: f64,
) -> Tensor4 {
    let spec = NoiseSpectrum::from_params(params);
    let e = basis.energies();
    let s = basis.sigma_n();
    let now = sigma_n_interaction(basis, t);
    // σ_{jl}(t-τ) = σ_{jl}(t) e^{-iω_{jl}τ}
    let mut pa = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut pb = pa;
    for j in 0..2 {
        for l in 0..2 {
            let w = e[j] - e[l];
            let x = s[(j, l)] * Complex64::new(0.0, w * t).exp();
            pa[j][l] = x * spec.partial_transform(w, memory);
            pb[j][l] = x * spec.partial_transform_reversed(w, memory);
        }
    }
    assemble(params.g * params.g, &now, &pa, &pb)
}

/// Applies `-Σ M_{kk'll'} ρ_{ll'}`.
pub fn contract(m: &Tensor4, rho: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |k, kp| {
        let mut v = Complex64::new(0.0, 0.0);
        for l in 0..2 {
            for lp in 0..2 {
                v -= m[k][kp][l][lp] * rho[(l, lp)];
            }
        }
        v
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReducedMode {
    /// Memory integral over `[0, t]`, recomputed at every step.
    TimeDependent,
    /// Constant rates from [`rates`].
    #[default]
    Markov,
}

/// Qubit state in the energy basis (up first), Schrödinger picture.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRecord {
    pub t_grid: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
}

impl ReducedRecord {
    /// `⟨σ_z⟩` in the energy basis at each time.
    pub fn sigma_z(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|r| r[(0, 0)].re - r[(1, 1)].re)
            .collect()
    }

    pub fn coherence(&self) -> Vec<Complex64> {
        self.states.iter().map(|r| r[(0, 1)]).collect()
    }
}

fn check_qubit_state(rho: &ComplexMatrix) -> Result<()> {
    if rho.shape() != (2, 2) {
        return Err(Error::DimensionMismatch {
            op: "evolve_reduced",
            left: (2, 2),
            right: rho.shape(),
        });
    }
    if !rho.is_finite() {
        return Err(Error::InvalidState("non-finite entries"));
    }
    if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(Error::InvalidState("trace differs from 1"));
    }
    if !rho.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::InvalidState("not Hermitian"));
    }
    Ok(())
}

pub fn evolve_reduced(
    params: &SystemParams,
    basis: &QubitEigenbasis,
    rho0: &ComplexMatrix,
    t_grid: &[f64],
    mode: ReducedMode,
) -> Result<ReducedRecord> {
    params.validate()?;
    check_qubit_state(rho0)?;
    ode::check_grid(t_grid)?;
    let e = basis.splitting;
    let states = match mode {
        ReducedMode::Markov => {
            let r = rates(params, basis)?;
            let total = r.relaxation_rate();
            let p0 = rho0[(0, 0)].re;
            let c0 = rho0[(0, 1)];
            t_grid
                .iter()
                .map(|&t| {
                    let p = if total > 0.0 {
                        let p_inf = r.gamma_up / total;
                        p_inf + (p0 - p_inf) * libm::exp(-total * t)
                    } else {
                        p0
                    };
                    let c = c0 * Complex64::new(-r.gamma_phi * t, -e * t).exp();
                    ComplexMatrix::from_vec(
                        2,
                        2,
                        alloc::vec![
                            Complex64::new(p, 0.0),
                            c,
                            c.conj(),
                            Complex64::new(1.0 - p, 0.0)
                        ],
                    )
                    .expect("2x2")
                })
                .collect()
        }
        ReducedMode::TimeDependent => {
            let rate = e.max(params.kappa).max(params.delta_omega.abs());
            let h = ode::default_step(rate, t_grid);
            let interaction = ode::integrate(
                |t, rho: &ComplexMatrix| contract(&integrated_redfield_tensor(params, basis, t, t), rho),
                rho0.clone(),
                t_grid,
                h,
            )?;
            interaction
                .into_iter()
                .zip(t_grid)
                .map(|(mut r, &t)| {
                    // ρ_{01} = ρ^I_{01} e^{-iEt}
                    let phase = Complex64::new(0.0, -e * t).exp();
                    r[(0, 1)] *= phase;
                    r[(1, 0)] *= phase.conj();
                    r
                })
                .collect()
        }
    };
    Ok(ReducedRecord {
        t_grid: t_grid.to_vec(),
        states,
    })
}
