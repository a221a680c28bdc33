//! Master-equation integrator for the joint qubit ⊗ resonator state.
//!
//! The generator is `L ρ = -i[H, ρ] + Σ_k r_k D[L_k] ρ` with
//! `D[L]ρ = LρL† - ½{L†L, ρ}`. It is applied as
//! `-i(H_eff ρ - ρ H_eff†) + Σ r_k L_k ρ L_k†`, `H_eff = H - (i/2) Σ r_k L_k†L_k`,
//! with sparse operators acting on dense states.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::analytic::pointer_state;
use crate::backaction::eigenbasis;
use crate::error::{Error, Result};
use crate::fock::{
    annihilation, lift_qubit, lift_resonator, number, qubit_operator, FockSpace, QubitOperator,
};
use crate::linalg::{ComplexMatrix, SparseMatrix};
use crate::ode;
use crate::params::{SigmaZ, SystemParams};
use crate::quad::adaptive_simpson;
use crate::state::DensityMatrix;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// How the resonator frequency couples to the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingMode {
    /// `g σ_z a†a` with the qubit term `(ε/2)σ_z`; Δ is dropped.
    #[default]
    SigmaZ,
    /// `g σ_n a†a` in the qubit energy basis, `σ_n = cos η σ_z + sin η σ_x`,
    /// with the qubit term `(E/2)σ_z`.
    SigmaN,
}

/// One damping channel `rate · D[jump]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissipator {
    pub rate: f64,
    pub jump: ComplexMatrix,
}

#[derive(Debug, Clone)]
struct Channel {
    rate: f64,
    jump: SparseMatrix,
    jump_adj: SparseMatrix,
}

#[derive(Debug, Clone)]
pub struct Liouvillian {
    params: SystemParams,
    space: FockSpace,
    coupling: CouplingMode,
    hamiltonian: ComplexMatrix,
    dissipators: Vec<Dissipator>,
    h_eff: SparseMatrix,
    h_eff_adj: SparseMatrix,
    channels: Vec<Channel>,
    qubit_splitting: f64,
}

pub fn build_liouvillian(
    params: &SystemParams,
    space: FockSpace,
    coupling: CouplingMode,
) -> Result<Liouvillian> {
    params.validate()?;
    let sz = qubit_operator(QubitOperator::SigmaZ);
    let (qubit_splitting, coupling_op) = match coupling {
        CouplingMode::SigmaZ => (params.epsilon, sz.clone()),
        CouplingMode::SigmaN => {
            let basis = eigenbasis(params.epsilon, params.delta)?;
            (basis.splitting, basis.sigma_n())
        }
    };

    let a = lift_resonator(&annihilation(space));
    let n_op = number(space);
    let mut h = lift_qubit(&sz, space).scale_real(0.5 * qubit_splitting);
    h += &lift_resonator(&n_op).scale_real(params.delta_omega);
    h += &coupling_op.kron(&n_op).scale_real(params.g);
    h += &(&a + &a.adjoint()).scale_real(params.f);

    let dissipators = vec![
        Dissipator {
            rate: params.kappa,
            jump: a,
        },
        Dissipator {
            rate: params.gamma1,
            jump: lift_qubit(&qubit_operator(QubitOperator::SigmaMinus), space),
        },
        Dissipator {
            rate: 0.5 * params.gamma2,
            jump: lift_qubit(&sz, space),
        },
    ];

    let mut h_eff = h.clone();
    let mut channels = Vec::new();
    for d in dissipators.iter().filter(|d| d.rate > 0.0) {
        let ldl = d.jump.adjoint().matmul(&d.jump)?;
        h_eff.axpy(Complex64::new(0.0, -0.5 * d.rate), &ldl);
        let jump = SparseMatrix::from_dense(&d.jump);
        channels.push(Channel {
            rate: d.rate,
            jump_adj: jump.adjoint(),
            jump,
        });
    }
    let h_eff_sparse = SparseMatrix::from_dense(&h_eff);

    Ok(Liouvillian {
        params: *params,
        space,
        coupling,
        hamiltonian: h,
        dissipators,
        h_eff_adj: h_eff_sparse.adjoint(),
        h_eff: h_eff_sparse,
        channels,
        qubit_splitting,
    })
}

impl Liouvillian {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn coupling(&self) -> CouplingMode {
        self.coupling
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    /// `[(κ, a), (γ₁, σ_-), (γ₂/2, σ_z)]`, lifted to the joint space.
    pub fn dissipators(&self) -> &[Dissipator] {
        &self.dissipators
    }

    /// Qubit level splitting used in the Hamiltonian (`ε` or `E`).
    pub fn qubit_splitting(&self) -> f64 {
        self.qubit_splitting
    }

    pub fn max_rate(&self) -> f64 {
        let p = &self.params;
        self.qubit_splitting
            .abs()
            .max(p.delta_omega.abs() + p.g.abs())
            .max(p.kappa)
            .max(p.f)
            .max(p.gamma1)
            .max(p.gamma2)
    }

    pub fn default_step(&self, t_grid: &[f64]) -> f64 {
        ode::default_step(self.max_rate(), t_grid)
    }

    /// `L ρ` for a joint-space matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.space.joint_dim();
        debug_assert_eq!(rho.shape(), (d, d));
        let mut out = ComplexMatrix::zeros(d, d);
        self.h_eff.mul_left_into(rho, -I, &mut out);
        self.h_eff_adj.mul_right_into(rho, I, &mut out);
        let mut tmp = ComplexMatrix::zeros(d, d);
        for ch in &self.channels {
            tmp.as_mut_slice().fill(Complex64::new(0.0, 0.0));
            ch.jump.mul_left_into(rho, Complex64::new(1.0, 0.0), &mut tmp);
            ch.jump_adj
                .mul_right_into(&tmp, Complex64::new(ch.rate, 0.0), &mut out);
        }
        out
    }

    /// Propagates a raw matrix over `t_grid` and returns it at every grid time.
    pub fn propagate(
        &self,
        rho0: &ComplexMatrix,
        t_grid: &[f64],
        max_step: Option<f64>,
    ) -> Result<Vec<ComplexMatrix>> {
        let d = self.space.joint_dim();
        if rho0.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                op: "propagate",
                left: (d, d),
                right: rho0.shape(),
            });
        }
        let h = max_step.unwrap_or_else(|| self.default_step(t_grid));
        ode::integrate(|_, r: &ComplexMatrix| self.apply(r), rho0.clone(), t_grid, h)
    }
}

/// Scalar observables of one joint state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub sigma_z: f64,
    pub sigma_x: f64,
    pub field: Complex64,
    pub photons: f64,
    /// `|ρ_01|` of the reduced qubit state.
    pub coherence: f64,
    /// Population of the two highest Fock levels.
    pub top_fock: f64,
}

/// Fock levels counted as "top" for the truncation check.
pub const TOP_FOCK_LEVELS: usize = 2;

/// Reads the observables straight from matrix elements.
pub fn observe(rho: &DensityMatrix) -> Observables {
    let n = rho.space().dim();
    let m = rho.matrix();
    let mut sigma_z = 0.0;
    let mut photons = 0.0;
    let mut rho01 = Complex64::new(0.0, 0.0);
    let mut field = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let p0 = m[(k, k)].re;
        let p1 = m[(n + k, n + k)].re;
        sigma_z += p0 - p1;
        photons += k as f64 * (p0 + p1);
        rho01 += m[(k, n + k)];
        if k > 0 {
            let s = libm::sqrt(k as f64);
            field += (m[(k, k - 1)] + m[(n + k, n + k - 1)]) * s;
        }
    }
    Observables {
        sigma_z,
        sigma_x: 2.0 * rho01.re,
        field,
        photons,
        coherence: rho01.norm(),
        top_fock: rho.top_fock_population(TOP_FOCK_LEVELS),
    }
}

/// Same quantities through full operator traces, for cross-checking
/// [`observe`].
pub fn observe_by_trace(rho: &DensityMatrix) -> Result<Observables> {
    let space = rho.space();
    let sz = lift_qubit(&qubit_operator(QubitOperator::SigmaZ), space);
    let sx = lift_qubit(&qubit_operator(QubitOperator::SigmaX), space);
    let a = lift_resonator(&annihilation(space));
    let n_op = lift_resonator(&number(space));
    let q = rho.partial_trace(crate::state::Subsystem::Qubit);
    Ok(Observables {
        sigma_z: rho.expectation(&sz)?.re,
        sigma_x: rho.expectation(&sx)?.re,
        field: rho.expectation(&a)?,
        photons: rho.expectation(&n_op)?.re,
        coherence: q[(0, 1)].norm(),
        top_fock: rho.top_fock_population(TOP_FOCK_LEVELS),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// RK4 step cap; `None` picks [`Liouvillian::default_step`].
    pub max_step: Option<f64>,
    pub truncation_threshold: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            max_step: None,
            truncation_threshold: FockSpace::DEFAULT_TRUNCATION_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionRecord {
    pub t_grid: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: Vec<Observables>,
    pub truncation_threshold: f64,
    /// False when the top Fock population exceeded the threshold somewhere.
    pub valid: bool,
}

impl EvolutionRecord {
    /// Largest deviation between the stored observables and a recomputation
    /// through operator traces.
    pub fn consistency_error(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (s, o) in self.states.iter().zip(&self.observables) {
            let r = observe_by_trace(s)?;
            worst = worst
                .max((r.sigma_z - o.sigma_z).abs())
                .max((r.sigma_x - o.sigma_x).abs())
                .max((r.field - o.field).norm())
                .max((r.photons - o.photons).abs())
                .max((r.coherence - o.coherence).abs())
                .max((r.top_fock - o.top_fock).abs());
        }
        Ok(worst)
    }

    /// `Tr[(P_s ⊗ a) ρ] / Tr[(P_s ⊗ 1) ρ]` at grid index `idx`.
    pub fn conditional_field(&self, idx: usize, s: SigmaZ) -> Option<Complex64> {
        let rho = &self.states[idx];
        let n = rho.space().dim();
        let m = rho.matrix();
        let off = s.index() * n;
        let mut p = 0.0;
        let mut field = Complex64::new(0.0, 0.0);
        for k in 0..n {
            p += m[(off + k, off + k)].re;
            if k > 0 {
                field += m[(off + k, off + k - 1)] * libm::sqrt(k as f64);
            }
        }
        if p > 0.0 {
            Some(field / p)
        } else {
            None
        }
    }

    /// `⟨0|ρ_q|1⟩` at grid index `idx`.
    pub fn qubit_coherence(&self, idx: usize) -> Complex64 {
        let rho = &self.states[idx];
        let n = rho.space().dim();
        (0..n).map(|k| rho.matrix()[(k, n + k)]).sum()
    }
}

pub fn evolve(liou: &Liouvillian, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<EvolutionRecord> {
    evolve_with(liou, rho0, t_grid, EvolveOptions::default())
}

pub fn evolve_with(
    liou: &Liouvillian,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: EvolveOptions,
) -> Result<EvolutionRecord> {
    if rho0.space() != liou.space() {
        let d = liou.space().joint_dim();
        return Err(Error::DimensionMismatch {
            op: "evolve",
            left: (d, d),
            right: rho0.matrix().shape(),
        });
    }
    let raw = liou.propagate(rho0.matrix(), t_grid, opts.max_step)?;
    let states: Vec<_> = raw
        .into_iter()
        .map(|m| DensityMatrix::from_evolved(liou.space(), m))
        .collect();
    let observables: Vec<_> = states.iter().map(observe).collect();
    let valid = observables
        .iter()
        .all(|o| o.top_fock < opts.truncation_threshold);
    Ok(EvolutionRecord {
        t_grid: t_grid.to_vec(),
        states,
        observables,
        truncation_threshold: opts.truncation_threshold,
        valid,
    })
}

/// Quadrature tolerance for the phase integral in [`coherence_solution`].
pub const COHERENCE_QUAD_TOL: f64 = 1e-10;

/// `a₁₀(t) = a₁₀(0) exp[-i(ε - iγ₂)t - 2ig ∫₀ᵗ α_+(t')α_-*(t') dt']`, with
/// the pointer amplitudes started from the vacuum.
pub fn coherence_solution(params: &SystemParams, t: f64, a10_0: Complex64) -> Complex64 {
    if t <= 0.0 {
        return a10_0;
    }
    let plus = pointer_state(params, SigmaZ::Plus);
    let minus = pointer_state(params, SigmaZ::Minus);
    let kappa = params.kappa;
    let integrand = |s: f64| plus.alpha(kappa, s) * minus.alpha(kappa, s).conj();
    // enough panels to resolve the slowest oscillation and the decay
    let rate = plus
        .detuning
        .abs()
        .max(minus.detuning.abs())
        .max(0.5 * kappa);
    let panels = (libm::ceil(rate * t) as usize).clamp(1, 1 << 16);
    let phase_integral: Complex64 = adaptive_simpson(integrand, 0.0, t, COHERENCE_QUAD_TOL, panels);
    let exponent = Complex64::new(-params.gamma2 * t, -params.epsilon * t)
        - I * 2.0 * params.g * phase_integral;
    a10_0 * exponent.exp()
}

/// Largest supported number of consecutive measurements.
pub const MAX_MEASUREMENTS: usize = 6;
/// Branches less likely than this are dropped from the tree.
pub const BRANCH_PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeHistory {
    pub outcomes: Vec<SigmaZ>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityStats {
    pub t_meas: f64,
    /// `P(o_{k+1} = o_k)` for each consecutive pair.
    pub agreement: Vec<f64>,
    /// `P(o_k = +1)` for each measurement.
    pub p_plus: Vec<f64>,
    /// Leaves of the branch tree.
    pub histories: Vec<OutcomeHistory>,
}

struct Branch {
    outcomes: Vec<SigmaZ>,
    probability: f64,
    rho: ComplexMatrix,
}

fn project(rho: &ComplexMatrix, n: usize, s: SigmaZ) -> (f64, ComplexMatrix) {
    let d = rho.rows();
    let off = s.index() * n;
    let mut out = ComplexMatrix::zeros(d, d);
    let mut p = 0.0;
    for i in off..off + n {
        p += rho[(i, i)].re;
        for j in off..off + n {
            out[(i, j)] = rho[(i, j)];
        }
    }
    (p, out)
}

/// Repeated projective measurements of the qubit in the σ_z basis of the
/// Liouvillian's representation, at times `t_meas, 2 t_meas, ...`.
///
/// The tree of outcome histories is tracked exactly; each branch carries its
/// normalized post-measurement state.
pub fn repeatability_experiment(
    liou: &Liouvillian,
    rho0: &DensityMatrix,
    t_meas: f64,
    n_meas: usize,
) -> Result<RepeatabilityStats> {
    if !(t_meas > 0.0) || !t_meas.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_meas",
            requirement: "finite and > 0",
        });
    }
    if n_meas < 2 {
        return Err(Error::InvalidParameter {
            name: "n_meas",
            requirement: ">= 2",
        });
    }
    if n_meas > MAX_MEASUREMENTS {
        return Err(Error::BranchLimit {
            requested: n_meas,
            max: MAX_MEASUREMENTS,
        });
    }
    if rho0.space() != liou.space() {
        let d = liou.space().joint_dim();
        return Err(Error::DimensionMismatch {
            op: "repeatability_experiment",
            left: (d, d),
            right: rho0.matrix().shape(),
        });
    }

    let n = liou.space().dim();
    let grid = [0.0, t_meas];
    let mut branches = vec![Branch {
        outcomes: Vec::new(),
        probability: 1.0,
        rho: rho0.matrix().clone(),
    }];
    let mut agree = vec![0.0; n_meas - 1];
    let mut p_plus = vec![0.0; n_meas];

    for k in 0..n_meas {
        let mut next = Vec::with_capacity(2 * branches.len());
        for b in &branches {
            let evolved = liou
                .propagate(&b.rho, &grid, None)?
                .pop()
                .expect("grid has two points");
            for s in SigmaZ::BOTH {
                let (p, block) = project(&evolved, n, s);
                let p = p.max(0.0);
                let joint = b.probability * p;
                if s == SigmaZ::Plus {
                    p_plus[k] += joint;
                }
                if let Some(&last) = b.outcomes.last() {
                    if last == s {
                        agree[k - 1] += joint;
                    }
                }
                if joint < BRANCH_PRUNE {
                    continue;
                }
                let mut outcomes = b.outcomes.clone();
                outcomes.push(s);
                next.push(Branch {
                    outcomes,
                    probability: joint,
                    rho: block.scale_real(1.0 / p),
                });
            }
        }
        branches = next;
    }

    Ok(RepeatabilityStats {
        t_meas,
        agreement: agree,
        p_plus,
        histories: branches
            .into_iter()
            .map(|b| OutcomeHistory {
                outcomes: b.outcomes,
                probability: b.probability,
            })
            .collect(),
    })
}
