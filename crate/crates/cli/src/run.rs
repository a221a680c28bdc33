//! Runners for each mode. All of them return a [`SweepResult`].

use qnd_core::Complex64;
use qnd_core::analytic::{
    gamma_m, outcome_probability, overlap_decay, probability_from_amplitude, signal_amplitude,
    steady_amplitudes, NoiseModel,
};
use qnd_core::backaction::{eigenbasis, rates, NoiseSpectrum};
use qnd_core::fock::FockSpace;
use qnd_core::lindblad::{
    build_liouvillian, evolve_with, repeatability_experiment, EvolveOptions,
};
use qnd_core::state::DensityMatrix;
use qnd_core::{SigmaZ, SystemParams};

use crate::config::{linspace, InitialState, Mode, RunConfig};
use crate::error::CliError;
use crate::output::SweepResult;

/// Detuning range of the figure sweeps.
pub const DETUNING_RANGE: (f64, f64) = (-1.0, 1.0);
/// Cavity linewidths of the four `fig3` panels.
pub const FIG3_KAPPAS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

/// Maps `f` over `0..n` on up to `threads` workers; results come back in
/// index order and the first failing index wins.
pub fn par_map<T, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize) -> Result<T, CliError> + Sync,
{
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        return (0..n).map(&f).collect();
    }
    let f = &f;
    let parts: Vec<Vec<(usize, Result<T, CliError>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| s.spawn(move || (w..n).step_by(threads).map(|i| (i, f(i))).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut slots: Vec<Option<Result<T, CliError>>> = (0..n).map(|_| None).collect();
    for (i, r) in parts.into_iter().flatten() {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|s| s.expect("every index visited")).collect()
}

pub fn run(config: &RunConfig) -> Result<SweepResult, CliError> {
    let mode = config
        .mode
        .ok_or(crate::config::ConfigError::ModeRequired)?;
    match mode {
        Mode::Fig2 => run_fig2(config),
        Mode::Fig3 => run_fig3(config),
        Mode::Analytic | Mode::Backaction if config.sweep.is_some() => run_sweep(config),
        Mode::Analytic | Mode::Backaction => run_point(config, mode),
        Mode::Lindblad => run_lindblad(config),
        Mode::Repeatability => run_repeatability(config),
    }
}

/// `P(+1 | σ_z = +1)` versus detuning and time under both noise models.
pub fn run_fig2(config: &RunConfig) -> Result<SweepResult, CliError> {
    let base = config.system_params();
    let detunings = linspace(DETUNING_RANGE.0, DETUNING_RANGE.1, config.grid_points);
    let steps = (config.t_max / config.t_step).round() as usize;
    let times: Vec<f64> = (1..=steps).map(|k| k as f64 * config.t_step).collect();
    let blocks = par_map(detunings.len(), config.threads, |i| {
        let p = SystemParams {
            delta_omega: detunings[i],
            ..base
        };
        let abs_a = signal_amplitude(&p).norm();
        times
            .iter()
            .map(|&t| {
                let zp = probability_from_amplitude(abs_a, p.s_ii, 1.0, t, SigmaZ::Plus, NoiseModel::ZeroPoint)?;
                let ba = probability_from_amplitude(abs_a, p.s_ii, 1.0, t, SigmaZ::Plus, NoiseModel::Backaction)?;
                Ok(vec![p.delta_omega, t, zp, ba])
            })
            .collect::<Result<Vec<_>, qnd_core::Error>>()
            .map_err(CliError::from)
    })?;
    let mut out = SweepResult::new(["delta_omega", "t", "p_zero_point", "p_backaction"]);
    out.rows = blocks.into_iter().flatten().collect();
    Ok(out)
}

/// Outcome probability and measurement-induced dephasing versus detuning for
/// the four cavity linewidths, with `S_II = 2/κ` in each panel.
pub fn run_fig3(config: &RunConfig) -> Result<SweepResult, CliError> {
    let base = config.system_params();
    let detunings = linspace(DETUNING_RANGE.0, DETUNING_RANGE.1, config.grid_points);
    let n = detunings.len();
    let rows = par_map(FIG3_KAPPAS.len() * n, config.threads, |idx| {
        let kappa = FIG3_KAPPAS[idx / n];
        let p = SystemParams {
            kappa,
            s_ii: 2.0 / kappa,
            delta_omega: detunings[idx % n],
            ..base
        };
        let prob = outcome_probability(&p, 1.0, config.t, SigmaZ::Plus)?;
        Ok(vec![kappa, p.delta_omega, prob, gamma_m(&p)])
    })?;
    let mut out = SweepResult::new(["kappa", "delta_omega", "p_measure_0", "gamma_m"]);
    out.rows = rows;
    Ok(out)
}

const ANALYTIC_COLUMNS: [&str; 7] = [
    "p_measure_0",
    "gamma_m",
    "n_plus",
    "n_minus",
    "signal_amplitude",
    "overlap",
    "dephasing_factor",
];

fn analytic_row(p: &SystemParams, t: f64) -> Result<Vec<f64>, CliError> {
    let s = steady_amplitudes(p);
    let o = overlap_decay(p, t);
    Ok(vec![
        outcome_probability(p, 1.0, t, SigmaZ::Plus)?,
        gamma_m(p),
        s.n_plus,
        s.n_minus,
        signal_amplitude(p).norm(),
        o.exact,
        o.formula,
    ])
}

const BACKACTION_COLUMNS: [&str; 8] = [
    "gamma_up",
    "gamma_down",
    "gamma_phi",
    "gamma_phi_pure",
    "t_eff",
    "n_bar",
    "eta",
    "splitting",
];

fn backaction_row(p: &SystemParams) -> Result<Vec<f64>, CliError> {
    let b = eigenbasis(p.epsilon, p.delta)?;
    let r = rates(p, &b)?;
    Ok(vec![
        r.gamma_up,
        r.gamma_down,
        r.gamma_phi,
        r.gamma_phi_pure,
        r.t_eff,
        NoiseSpectrum::from_params(p).n_bar,
        b.eta,
        b.splitting,
    ])
}

fn mode_row(config: &RunConfig, mode: Mode) -> Result<Vec<f64>, CliError> {
    let p = config.system_params();
    match mode {
        Mode::Analytic => analytic_row(&p, config.t),
        _ => backaction_row(&p),
    }
}

fn mode_columns(mode: Mode) -> &'static [&'static str] {
    match mode {
        Mode::Analytic => &ANALYTIC_COLUMNS,
        _ => &BACKACTION_COLUMNS,
    }
}

/// One row of the mode's observables at the configured point.
pub fn run_point(config: &RunConfig, mode: Mode) -> Result<SweepResult, CliError> {
    let mut out = SweepResult::new(mode_columns(mode).iter().copied());
    out.push(mode_row(config, mode)?);
    Ok(out)
}

/// The mode's observables over the configured sweep, one row per point.
pub fn run_sweep(config: &RunConfig) -> Result<SweepResult, CliError> {
    let mode = match config.mode {
        Some(m @ (Mode::Analytic | Mode::Backaction)) => m,
        _ => {
            return Err(crate::config::ConfigError::Invalid {
                at: crate::config::Location::Default,
                key: "sweep".into(),
                requirement: "used with the analytic or backaction mode".into(),
            }
            .into())
        }
    };
    let sweep = config.sweep.as_ref().ok_or(crate::config::ConfigError::Invalid {
        at: crate::config::Location::Default,
        key: "sweep".into(),
        requirement: "present".into(),
    })?;
    let values = sweep.values();
    let rows = par_map(values.len(), config.threads, |i| {
        let mut c = config.clone();
        c.set_param(&sweep.param, values[i]);
        let mut row = vec![values[i]];
        row.extend(mode_row(&c, mode)?);
        Ok(row)
    })?;
    let mut columns = vec![sweep.param.clone()];
    columns.extend(mode_columns(mode).iter().map(|s| s.to_string()));
    Ok(SweepResult { columns, rows })
}

fn initial_state(config: &RunConfig, space: FockSpace) -> Result<DensityMatrix, CliError> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let amps = match config.initial_state {
        InitialState::Plus => [one, one],
        InitialState::Up => [one, zero],
        InitialState::Down => [zero, one],
    };
    Ok(DensityMatrix::qubit_with_vacuum(space, amps)?)
}

/// Master-equation time series on `0, t_step, ..., t_max`.
pub fn run_lindblad(config: &RunConfig) -> Result<SweepResult, CliError> {
    let p = config.system_params();
    let space = FockSpace::new(config.fock_dim)?;
    let l = build_liouvillian(&p, space, config.coupling)?;
    let steps = (config.t_max / config.t_step).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 * config.t_step).collect();
    let opts = EvolveOptions {
        max_step: None,
        truncation_threshold: config.truncation_threshold,
    };
    let rec = evolve_with(&l, &initial_state(config, space)?, &grid, opts)?;
    if !rec.valid {
        let population = rec
            .observables
            .iter()
            .map(|o| o.top_fock)
            .fold(0.0, f64::max);
        return Err(CliError::Truncation {
            population,
            threshold: config.truncation_threshold,
        });
    }
    let mut out = SweepResult::new([
        "t", "sigma_z", "sigma_x", "re_a", "im_a", "photons", "coherence", "top_fock",
    ]);
    for (t, o) in grid.iter().zip(&rec.observables) {
        out.push(vec![
            *t,
            o.sigma_z,
            o.sigma_x,
            o.field.re,
            o.field.im,
            o.photons,
            o.coherence,
            o.top_fock,
        ]);
    }
    Ok(out)
}

/// Agreement of consecutive projective measurements spaced by `t_meas`.
pub fn run_repeatability(config: &RunConfig) -> Result<SweepResult, CliError> {
    let p = config.system_params();
    let space = FockSpace::new(config.fock_dim)?;
    let l = build_liouvillian(&p, space, config.coupling)?;
    let stats = repeatability_experiment(&l, &initial_state(config, space)?, config.t_meas, config.n_meas)?;
    let mut out = SweepResult::new(["pair", "t_meas", "agreement", "p_plus_first", "p_plus_second"]);
    for (k, a) in stats.agreement.iter().enumerate() {
        out.push(vec![
            (k + 1) as f64,
            config.t_meas,
            *a,
            stats.p_plus[k],
            stats.p_plus[k + 1],
        ]);
    }
    Ok(out)
}
