//! `key = value` run configuration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use qnd_core::lindblad::CouplingMode;
use qnd_core::SystemParams;
use thiserror::Error;

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Override(String),
    Default,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Override(s) => write!(f, "--set {s}"),
            Location::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{at}: expected `key = value`")]
    Syntax { at: Location },
    #[error("{at}: unknown key `{key}`")]
    UnknownKey { at: Location, key: String },
    #[error("{at}: duplicate key `{key}`")]
    Duplicate { at: Location, key: String },
    #[error("{at}: malformed value for {key}: `{value}`")]
    Malformed {
        at: Location,
        key: String,
        value: String,
    },
    #[error("{at}: {key} must be {requirement}")]
    Invalid {
        at: Location,
        key: String,
        requirement: String,
    },
    #[error("mode required")]
    ModeRequired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Analytic,
    Lindblad,
    Backaction,
    Fig2,
    Fig3,
    Repeatability,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Lindblad => "lindblad",
            Mode::Backaction => "backaction",
            Mode::Fig2 => "fig2",
            Mode::Fig3 => "fig3",
            Mode::Repeatability => "repeatability",
        }
    }
}

impl FromStr for Mode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "analytic" => Mode::Analytic,
            "lindblad" => Mode::Lindblad,
            "backaction" => Mode::Backaction,
            "fig2" => Mode::Fig2,
            "fig3" => Mode::Fig3,
            "repeatability" | "repeat" => Mode::Repeatability,
            _ => return Err(()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// `(|0⟩ + |1⟩)/√2`
    #[default]
    Plus,
    Up,
    Down,
}

impl InitialState {
    pub fn name(self) -> &'static str {
        match self {
            InitialState::Plus => "plus",
            InitialState::Up => "up",
            InitialState::Down => "down",
        }
    }
}

fn coupling_name(c: CouplingMode) -> &'static str {
    match c {
        CouplingMode::SigmaZ => "sigma_z",
        CouplingMode::SigmaN => "sigma_n",
    }
}

/// Parameters a sweep may vary.
pub const SWEEPABLE: &[&str] = &[
    "epsilon",
    "delta",
    "g",
    "kappa",
    "gamma1",
    "gamma2",
    "f",
    "delta_omega",
    "s_ii",
    "t",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    /// Evenly spaced values, endpoints included. Symmetric ranges give
    /// exactly mirrored points.
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let n = (count - 1) as f64;
    (0..count)
        .map(|i| (start * (n - i as f64) + stop * i as f64) / n)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub f: f64,
    pub delta_omega: f64,
    /// `None` means `2/κ`.
    pub s_ii: Option<f64>,
    pub fock_dim: usize,
    /// Measurement time for the closed-form probabilities.
    pub t: f64,
    pub t_max: f64,
    pub t_step: f64,
    /// Points on the detuning axis of the figure sweeps.
    pub grid_points: usize,
    pub sweep: Option<Sweep>,
    pub mode: Option<Mode>,
    pub output_path: Option<String>,
    pub threads: usize,
    pub coupling: CouplingMode,
    pub initial_state: InitialState,
    pub n_meas: usize,
    pub t_meas: f64,
    pub truncation_threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        RunConfig {
            epsilon: p.epsilon,
            delta: p.delta,
            g: p.g,
            kappa: p.kappa,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            f: p.f,
            delta_omega: p.delta_omega,
            s_ii: None,
            fock_dim: 12,
            t: 0.1,
            t_max: 2.0,
            t_step: 0.01,
            grid_points: 201,
            sweep: None,
            mode: None,
            output_path: None,
            threads: 1,
            coupling: CouplingMode::SigmaZ,
            initial_state: InitialState::Plus,
            n_meas: 2,
            t_meas: 50.0,
            truncation_threshold: qnd_core::fock::FockSpace::DEFAULT_TRUNCATION_THRESHOLD,
        }
    }
}

const KEYS: &[&str] = &[
    "epsilon",
    "delta",
    "g",
    "kappa",
    "gamma1",
    "gamma2",
    "f",
    "delta_omega",
    "s_ii",
    "fock_dim",
    "t",
    "t_max",
    "t_step",
    "grid_points",
    "sweep",
    "mode",
    "output_path",
    "threads",
    "coupling",
    "initial_state",
    "n_meas",
    "t_meas",
    "truncation_threshold",
];

fn parse_f64(key: &str, value: &str, at: &Location) -> Result<f64, ConfigError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ConfigError::Malformed {
            at: at.clone(),
            key: key.to_string(),
            value: value.to_string(),
        }),
    }
}

fn parse_usize(key: &str, value: &str, at: &Location) -> Result<usize, ConfigError> {
    value.parse::<usize>().map_err(|_| ConfigError::Malformed {
        at: at.clone(),
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn unquote(value: &str) -> &str {
    let v = value.trim();
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

impl RunConfig {
    /// Resolved physical parameters.
    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            epsilon: self.epsilon,
            delta: self.delta,
            g: self.g,
            kappa: self.kappa,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            f: self.f,
            delta_omega: self.delta_omega,
            s_ii: self.s_ii.unwrap_or(2.0 / self.kappa),
        }
    }

    /// Sets a numeric, sweepable parameter.
    pub fn set_param(&mut self, name: &str, value: f64) -> bool {
        match name {
            "epsilon" => self.epsilon = value,
            "delta" => self.delta = value,
            "g" => self.g = value,
            "kappa" => self.kappa = value,
            "gamma1" => self.gamma1 = value,
            "gamma2" => self.gamma2 = value,
            "f" => self.f = value,
            "delta_omega" => self.delta_omega = value,
            "s_ii" => self.s_ii = Some(value),
            "t" => self.t = value,
            _ => return false,
        }
        true
    }

    fn set(&mut self, key: &str, raw: &str, at: &Location) -> Result<(), ConfigError> {
        let value = unquote(raw);
        let malformed = || ConfigError::Malformed {
            at: at.clone(),
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "fock_dim" => self.fock_dim = parse_usize(key, value, at)?,
            "grid_points" => self.grid_points = parse_usize(key, value, at)?,
            "threads" => self.threads = parse_usize(key, value, at)?,
            "n_meas" => self.n_meas = parse_usize(key, value, at)?,
            "t_max" => self.t_max = parse_f64(key, value, at)?,
            "t_step" => self.t_step = parse_f64(key, value, at)?,
            "t_meas" => self.t_meas = parse_f64(key, value, at)?,
            "truncation_threshold" => self.truncation_threshold = parse_f64(key, value, at)?,
            "mode" => self.mode = Some(value.parse().map_err(|_| malformed())?),
            "output_path" => {
                if value.is_empty() {
                    return Err(malformed());
                }
                self.output_path = Some(value.to_string());
            }
            "coupling" => {
                self.coupling = match value {
                    "sigma_z" => CouplingMode::SigmaZ,
                    "sigma_n" => CouplingMode::SigmaN,
                    _ => return Err(malformed()),
                }
            }
            "initial_state" => {
                self.initial_state = match value {
                    "plus" => InitialState::Plus,
                    "up" => InitialState::Up,
                    "down" => InitialState::Down,
                    _ => return Err(malformed()),
                }
            }
            "sweep" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(malformed());
                }
                self.sweep = Some(Sweep {
                    param: parts[0].to_string(),
                    start: parse_f64(key, parts[1], at)?,
                    stop: parse_f64(key, parts[2], at)?,
                    count: parse_usize(key, parts[3], at)?,
                });
            }
            _ => {
                let v = parse_f64(key, value, at)?;
                if !self.set_param(key, v) {
                    return Err(ConfigError::UnknownKey {
                        at: at.clone(),
                        key: key.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("epsilon", format!("{:?}", self.epsilon));
        line("delta", format!("{:?}", self.delta));
        line("g", format!("{:?}", self.g));
        line("kappa", format!("{:?}", self.kappa));
        line("gamma1", format!("{:?}", self.gamma1));
        line("gamma2", format!("{:?}", self.gamma2));
        line("f", format!("{:?}", self.f));
        line("delta_omega", format!("{:?}", self.delta_omega));
        if let Some(s) = self.s_ii {
            line("s_ii", format!("{s:?}"));
        }
        line("fock_dim", self.fock_dim.to_string());
        line("t", format!("{:?}", self.t));
        line("t_max", format!("{:?}", self.t_max));
        line("t_step", format!("{:?}", self.t_step));
        line("grid_points", self.grid_points.to_string());
        if let Some(s) = &self.sweep {
            line(
                "sweep",
                format!("\"{} {:?} {:?} {}\"", s.param, s.start, s.stop, s.count),
            );
        }
        if let Some(m) = self.mode {
            line("mode", m.name().to_string());
        }
        if let Some(p) = &self.output_path {
            line("output_path", format!("\"{p}\""));
        }
        line("threads", self.threads.to_string());
        line("coupling", coupling_name(self.coupling).to_string());
        line("initial_state", self.initial_state.name().to_string());
        line("n_meas", self.n_meas.to_string());
        line("t_meas", format!("{:?}", self.t_meas));
        line("truncation_threshold", format!("{:?}", self.truncation_threshold));
        out
    }
}

/// Accumulates settings from a file and overrides, then validates.
#[derive(Debug, Default)]
pub struct ConfigBuilder {
    config: RunConfig,
    origin: HashMap<String, Location>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(mut self, text: &str) -> Result<Self, ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let at = Location::Line(i + 1);
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { at: at.clone() })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    at,
                    key: key.to_string(),
                });
            }
            if self.origin.contains_key(key) {
                return Err(ConfigError::Duplicate {
                    at,
                    key: key.to_string(),
                });
            }
            self.config.set(key, value, &at)?;
            self.origin.insert(key.to_string(), at);
        }
        Ok(self)
    }

    /// `key=value` applied after the file; may repeat keys.
    pub fn set(mut self, assignment: &str) -> Result<Self, ConfigError> {
        let at = Location::Override(assignment.to_string());
        let (key, value) = assignment
            .split_once('=')
            .ok_or(ConfigError::Syntax { at: at.clone() })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                at,
                key: key.to_string(),
            });
        }
        self.config.set(key, value, &at)?;
        self.origin.insert(key.to_string(), at);
        Ok(self)
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.config.mode = Some(mode);
        self
    }

    fn at(&self, key: &str) -> Location {
        self.origin.get(key).cloned().unwrap_or(Location::Default)
    }

    fn invalid(&self, key: &str, requirement: &str) -> ConfigError {
        ConfigError::Invalid {
            at: self.at(key),
            key: key.to_string(),
            requirement: requirement.to_string(),
        }
    }

    pub fn finish(self) -> Result<RunConfig, ConfigError> {
        let c = &self.config;
        check_params(c, |name, req| self.invalid(name, req))?;
        if c.fock_dim < 2 {
            return Err(self.invalid("fock_dim", ">= 2"));
        }
        if c.threads < 1 {
            return Err(self.invalid("threads", ">= 1"));
        }
        if c.grid_points < 2 {
            return Err(self.invalid("grid_points", ">= 2"));
        }
        if !(2..=qnd_core::lindblad::MAX_MEASUREMENTS).contains(&c.n_meas) {
            return Err(self.invalid("n_meas", "between 2 and 6"));
        }
        if c.t <= 0.0 {
            return Err(self.invalid("t", "> 0"));
        }
        if c.t_step <= 0.0 {
            return Err(self.invalid("t_step", "> 0"));
        }
        if c.t_max < c.t_step {
            return Err(self.invalid("t_max", ">= t_step"));
        }
        if c.t_meas <= 0.0 {
            return Err(self.invalid("t_meas", "> 0"));
        }
        if !(c.truncation_threshold > 0.0 && c.truncation_threshold < 1.0) {
            return Err(self.invalid("truncation_threshold", "in (0, 1)"));
        }
        if let Some(s) = &c.sweep {
            if !SWEEPABLE.contains(&s.param.as_str()) {
                return Err(self.invalid("sweep", "over a physical parameter or t"));
            }
            if s.count < 2 {
                return Err(self.invalid("sweep", "at least 2 points"));
            }
            for v in s.values() {
                let mut probe = c.clone();
                probe.set_param(&s.param, v);
                check_params(&probe, |name, req| ConfigError::Invalid {
                    at: self.at("sweep"),
                    key: name.to_string(),
                    requirement: format!("{req} (sweep point {v})"),
                })?;
            }
        }
        let mode = c.mode.ok_or(ConfigError::ModeRequired)?;
        if c.sweep.is_some() && !matches!(mode, Mode::Analytic | Mode::Backaction) {
            return Err(self.invalid("sweep", "used with the analytic or backaction mode"));
        }
        Ok(self.config)
    }
}

fn check_params(
    c: &RunConfig,
    err: impl Fn(&str, &str) -> ConfigError,
) -> Result<(), ConfigError> {
    // the default s_ii = 2/κ is only meaningful once κ is known to be positive
    if !(c.kappa > 0.0) {
        return Err(err("kappa", "> 0"));
    }
    if let Some(s) = c.s_ii {
        if s <= 0.0 {
            return Err(err("s_ii", "> 0"));
        }
    }
    if c.t <= 0.0 {
        return Err(err("t", "> 0"));
    }
    match c.system_params().validate() {
        Ok(()) => Ok(()),
        Err(qnd_core::Error::InvalidParameter { name, requirement }) => Err(err(name, requirement)),
        Err(e) => Err(err("parameters", &e.to_string())),
    }
}

/// Parses a complete config; the mode must be set in the text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    ConfigBuilder::new().text(text)?.finish()
}
