//! Truncated resonator space and the qubit/resonator operators built on it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Resonator truncated to photon numbers `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    /// Population threshold on the top two Fock levels above which an
    /// evolution is reported as truncation-limited.
    pub const DEFAULT_TRUNCATION_THRESHOLD: f64 = 1e-6;

    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter {
                name: "fock_dim",
                requirement: ">= 2",
            });
        }
        Ok(FockSpace { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of qubit ⊗ resonator.
    pub fn joint_dim(&self) -> usize {
        2 * self.dim
    }

    /// Smallest truncation recommended for a coherent field of mean photon
    /// number `n_bar`: `n_bar + 5 sqrt(n_bar) + 10`.
    pub fn recommended_dim(n_bar: f64) -> usize {
        libm::ceil(n_bar + 5.0 * libm::sqrt(n_bar.max(0.0)) + 10.0) as usize
    }
}

/// Ladder operator with `⟨m|a|n⟩ = sqrt(n) δ_{m,n-1}`.
pub fn annihilation(space: FockSpace) -> ComplexMatrix {
    let n = space.dim();
    let mut a = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new(libm::sqrt(k as f64), 0.0);
    }
    a
}

/// `a†a`, built directly as `diag(0, 1, ..., N-1)`.
pub fn number(space: FockSpace) -> ComplexMatrix {
    let diag: alloc::vec::Vec<_> = (0..space.dim())
        .map(|k| Complex64::new(k as f64, 0.0))
        .collect();
    ComplexMatrix::diagonal(&diag)
}

/// Fock state projector `|n⟩⟨n|`.
pub fn fock_projector(space: FockSpace, n: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(space.dim(), space.dim());
    p[(n, n)] = Complex64::new(1.0, 0.0);
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitOperator {
    SigmaZ,
    SigmaX,
    /// `|1⟩⟨0|`: lowers sigma_z from +1 to -1.
    SigmaMinus,
    Identity,
}

/// 2×2 operator in the basis {|0⟩, |1⟩} with sigma_z = diag(1, -1).
pub fn qubit_operator(which: QubitOperator) -> ComplexMatrix {
    let data: [f64; 4] = match which {
        QubitOperator::SigmaZ => [1.0, 0.0, 0.0, -1.0],
        QubitOperator::SigmaX => [0.0, 1.0, 1.0, 0.0],
        QubitOperator::SigmaMinus => [0.0, 0.0, 1.0, 0.0],
        QubitOperator::Identity => [1.0, 0.0, 0.0, 1.0],
    };
    ComplexMatrix::from_real(2, 2, &data).expect("2x2")
}

/// `qubit_part ⊗ fock_part`, qubit index slowest.
pub fn tensor(qubit_part: &ComplexMatrix, fock_part: &ComplexMatrix) -> Result<ComplexMatrix> {
    if qubit_part.shape() != (2, 2) || !fock_part.is_square() {
        return Err(Error::DimensionMismatch {
            op: "tensor",
            left: qubit_part.shape(),
            right: fock_part.shape(),
        });
    }
    Ok(qubit_part.kron(fock_part))
}

/// `qubit_part ⊗ 1`.
pub fn lift_qubit(qubit_part: &ComplexMatrix, space: FockSpace) -> ComplexMatrix {
    qubit_part.kron(&ComplexMatrix::identity(space.dim()))
}

/// `1 ⊗ fock_part`.
pub fn lift_resonator(fock_part: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(2).kron(fock_part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn space(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn rejects_tiny_space() {
        assert!(FockSpace::new(1).is_err());
        assert!(FockSpace::new(0).is_err());
    }

    #[test]
    fn annihilation_dim2() {
        let a = annihilation(space(2));
        let expect = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(a, expect);
    }

    #[test]
    fn annihilation_dim3_entry() {
        let a = annihilation(space(3));
        assert_eq!(a[(1, 2)], Complex64::new(libm::sqrt(2.0), 0.0));
        assert_eq!(a[(0, 2)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn number_operator_eigenvalues() {
        let s = space(6);
        let a = annihilation(s);
        let n = &a.adjoint() * &a;
        for k in 0..s.dim() - 1 {
            let ket: Vec<_> = (0..s.dim())
                .map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
                .collect();
            let col = ComplexMatrix::from_vec(s.dim(), 1, ket.clone()).unwrap();
            let out = &n * &col;
            let scaled = col.scale_real(k as f64);
            assert!(out.max_abs_diff(&scaled) < 1e-14);
        }
        assert!(n.max_abs_diff(&number(s)) < 1e-14);
    }

    #[test]
    fn pauli_algebra() {
        let sz = qubit_operator(QubitOperator::SigmaZ);
        assert_eq!(sz, ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap());
        let sx = qubit_operator(QubitOperator::SigmaX);
        assert_eq!(&sx * &sx, qubit_operator(QubitOperator::Identity));
        let sm = qubit_operator(QubitOperator::SigmaMinus);
        assert_eq!(&sm * &sm, ComplexMatrix::zeros(2, 2));
        // sigma_minus maps |0⟩ to |1⟩
        assert_eq!(sm[(1, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn tensor_mixed_product() {
        let s = space(4);
        let sz = qubit_operator(QubitOperator::SigmaZ);
        let a = annihilation(s);
        let lhs = &lift_qubit(&sz, s) * &lift_resonator(&a);
        assert_eq!(lhs, tensor(&sz, &a).unwrap());
    }

    #[test]
    fn tensor_rejects_bad_shapes() {
        let a = annihilation(space(3));
        assert!(tensor(&a, &a).is_err());
        assert!(tensor(&qubit_operator(QubitOperator::SigmaX), &ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn operators_are_deterministic() {
        let s = space(9);
        assert_eq!(annihilation(s), annihilation(s));
        assert_eq!(
            tensor(&qubit_operator(QubitOperator::SigmaX), &annihilation(s)).unwrap(),
            tensor(&qubit_operator(QubitOperator::SigmaX), &annihilation(s)).unwrap()
        );
    }
}
