use crate::error::{Error, Result};

/// Eigenvalue of the measured qubit variable. `Plus` is the state |0⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SigmaZ {
    Plus,
    Minus,
}

impl SigmaZ {
    pub const BOTH: [SigmaZ; 2] = [SigmaZ::Plus, SigmaZ::Minus];

    pub fn value(self) -> f64 {
        match self {
            SigmaZ::Plus => 1.0,
            SigmaZ::Minus => -1.0,
        }
    }

    /// Row of the qubit basis vector, |0⟩ first.
    pub fn index(self) -> usize {
        match self {
            SigmaZ::Plus => 0,
            SigmaZ::Minus => 1,
        }
    }

    pub fn flip(self) -> SigmaZ {
        match self {
            SigmaZ::Plus => SigmaZ::Minus,
            SigmaZ::Minus => SigmaZ::Plus,
        }
    }
}

/// Physical parameters of the qubit, resonator, drive and output noise.
///
/// All frequencies and rates are angular, in ns⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Qubit energy bias.
    pub epsilon: f64,
    /// Qubit tunnel splitting.
    pub delta: f64,
    /// Qubit-resonator coupling strength.
    pub g: f64,
    /// Resonator decay rate.
    pub kappa: f64,
    /// Qubit relaxation rate.
    pub gamma1: f64,
    /// Intrinsic qubit dephasing rate.
    pub gamma2: f64,
    /// Drive amplitude.
    pub f: f64,
    /// Resonator minus drive frequency.
    pub delta_omega: f64,
    /// Output-signal noise spectral density.
    pub s_ii: f64,
}

impl Default for SystemParams {
    /// Operating point of the detuning sweeps: kappa = 0.1, g = 0.3, f = 1,
    /// S_II = 2/kappa, epsilon = 10, everything else zero.
    fn default() -> Self {
        let kappa = 0.1;
        SystemParams {
            epsilon: 10.0,
            delta: 0.0,
            g: 0.3,
            kappa,
            gamma1: 0.0,
            gamma2: 0.0,
            f: 1.0,
            delta_omega: 0.0,
            s_ii: 2.0 / kappa,
        }
    }
}

impl SystemParams {
    pub const DISPERSIVE_RATIO: f64 = 0.1;

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("f", self.f),
            ("delta_omega", self.delta_omega),
            ("s_ii", self.s_ii),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: "finite",
                });
            }
        }
        let positive = [("kappa", self.kappa), ("s_ii", self.s_ii)];
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: "> 0",
                });
            }
        }
        let non_negative = [
            ("delta", self.delta),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("f", self.f),
        ];
        for (name, value) in non_negative {
            if value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: ">= 0",
                });
            }
        }
        Ok(())
    }

    /// Whether `delta < ratio * |epsilon|`, i.e. the tunnel splitting is small
    /// enough for sigma_z to be treated as conserved.
    pub fn is_dispersive_with(&self, ratio: f64) -> bool {
        self.delta < ratio * self.epsilon.abs()
    }

    pub fn is_dispersive(&self) -> bool {
        self.is_dispersive_with(Self::DISPERSIVE_RATIO)
    }

    /// Fastest rate in the problem, used to pick integrator steps.
    pub fn max_rate(&self) -> f64 {
        self.epsilon
            .abs()
            .max(self.delta_omega.abs() + self.g.abs())
            .max(self.kappa)
            .max(self.f)
    }

    /// Qubit energy splitting sqrt(epsilon² + delta²).
    pub fn splitting(&self) -> f64 {
        libm::hypot(self.epsilon, self.delta)
    }
}
