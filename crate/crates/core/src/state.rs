//! Joint qubit ⊗ resonator density matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::ComplexMatrix;

/// Accepted deviation of the trace from 1 at construction.
pub const TRACE_TOL: f64 = 1e-9;
/// Accepted entrywise deviation from Hermiticity at construction.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Qubit,
    Resonator,
}

/// Trace, Hermiticity and positivity of a state, for invariant checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Density matrix on qubit ⊗ Fock space, qubit index slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(space: FockSpace, matrix: ComplexMatrix) -> Result<Self> {
        let n = space.joint_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                op: "density_matrix",
                left: (n, n),
                right: matrix.shape(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entries"));
        }
        if (matrix.trace() - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState("trace differs from 1"));
        }
        if !matrix.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidState("not Hermitian"));
        }
        Ok(DensityMatrix { space, matrix })
    }

    /// Wraps an evolved matrix without re-checking the construction tolerances.
    pub(crate) fn from_evolved(space: FockSpace, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), space.joint_dim());
        DensityMatrix { space, matrix }
    }

    /// `rho_qubit ⊗ rho_resonator`.
    pub fn product(rho_qubit: &ComplexMatrix, rho_resonator: &ComplexMatrix) -> Result<Self> {
        let space = FockSpace::new(rho_resonator.rows())?;
        let m = crate::fock::tensor(rho_qubit, rho_resonator)?;
        Self::new(space, m)
    }

    /// Pure qubit state `amplitudes[0]|0⟩ + amplitudes[1]|1⟩` times the resonator vacuum.
    pub fn qubit_with_vacuum(space: FockSpace, amplitudes: [Complex64; 2]) -> Result<Self> {
        let norm = libm::sqrt(amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr());
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero qubit amplitudes"));
        }
        let q = ComplexMatrix::outer(&[amplitudes[0] / norm, amplitudes[1] / norm]);
        let vac = crate::fock::fock_projector(space, 0);
        Self::new(space, q.kron(&vac))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn partial_trace(&self, keep: Subsystem) -> ComplexMatrix {
        let n = self.space.dim();
        match keep {
            Subsystem::Qubit => ComplexMatrix::from_fn(2, 2, |i, j| {
                (0..n).map(|k| self.matrix[(i * n + k, j * n + k)]).sum()
            }),
            Subsystem::Resonator => ComplexMatrix::from_fn(n, n, |k, l| {
                (0..2).map(|i| self.matrix[(i * n + k, i * n + l)]).sum()
            }),
        }
    }

    /// `Tr(op · rho)`. The imaginary part is kept for diagnostics.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<Complex64> {
        if op.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch {
                op: "expectation",
                left: op.shape(),
                right: self.matrix.shape(),
            });
        }
        let d = self.matrix.rows();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += op[(i, k)] * self.matrix[(k, i)];
            }
        }
        Ok(acc)
    }

    /// Total population of the top `levels` Fock states.
    pub fn top_fock_population(&self, levels: usize) -> f64 {
        let n = self.space.dim();
        let levels = levels.min(n);
        let mut p = 0.0;
        for q in 0..2 {
            for k in (n - levels)..n {
                p += self.matrix[(q * n + k, q * n + k)].re;
            }
        }
        p
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho²) = Σ |rho_ij|² for Hermitian rho
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        Ok(StateDiagnostics {
            trace_error: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_error: self.matrix.hermiticity_error(),
            min_eigenvalue: self.matrix.min_hermitian_eigenvalue()?,
        })
    }
}
