//! Truncated Fock space: ladder operators, vacuum and coherent states,
//! uncertainty products and the coherent-state resolution of unity.
//!
//! Two normalizations live side by side. The internal ladder `a` has
//! `[a, a†] = 1`; the phase-space annihilator is `A = Q + iP = √2·a`, so that
//! coherent states labelled by `z = q + ip` satisfy `A|z⟩ = z|z⟩` and have
//! ladder eigenvalue `α = z/√2`.

mod operators;
mod quadrature;
mod states;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use operators::{build_operators, ModeOperators};
pub use quadrature::{disk_integral, resolution_of_unity, QuadratureParams, ResolutionReport};
pub use states::{coherent, coherent_amplitudes, fock_state, truncation_bound, uncertainty_product, vacuum};

/// Largest total dimension `D^modes` accepted by default.
pub const DEFAULT_MAX_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FockError {
    #[error("invalid Fock space: {0}")]
    Space(String),
    #[error("total dimension {dim} exceeds the cap {cap}")]
    MemoryCap { dim: usize, cap: usize },
    #[error("|z| = {modulus} exceeds the truncation bound {bound} for mode {mode}")]
    TruncationBound { mode: usize, modulus: f64, bound: f64 },
    #[error("invalid quadrature: {0}")]
    Quadrature(String),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
}

/// `modes` copies of a `dim`-level truncated oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
    modes: usize,
}

impl FockSpace {
    pub fn new(dim: usize, modes: usize) -> Result<FockSpace, FockError> {
        FockSpace::with_cap(dim, modes, DEFAULT_MAX_DIM)
    }

    pub fn single(dim: usize) -> Result<FockSpace, FockError> {
        FockSpace::new(dim, 1)
    }

    pub fn with_cap(dim: usize, modes: usize, cap: usize) -> Result<FockSpace, FockError> {
        if dim < 2 {
            return Err(FockError::Space(format!(
                "truncation dimension must be at least 2, got {dim}"
            )));
        }
        if modes == 0 {
            return Err(FockError::Space("at least one mode required".into()));
        }
        let total = u32::try_from(modes)
            .ok()
            .and_then(|m| dim.checked_pow(m))
            .unwrap_or(usize::MAX);
        if total > cap {
            return Err(FockError::MemoryCap { dim: total, cap });
        }
        Ok(FockSpace { dim, modes })
    }

    /// Levels per mode.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn total_dim(&self) -> usize {
        self.dim.pow(self.modes as u32)
    }
}

/// A dense operator on a (possibly multi-mode) truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    label: String,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(label: impl Into<String>, matrix: DMatrix<Complex64>) -> Operator {
        Operator {
            label: label.into(),
            matrix,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Operator {
        Operator::new(format!("{}†", self.label), self.matrix.adjoint())
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        Operator::new(
            format!("[{}, {}]", self.label, other.label),
            &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        )
    }

    pub fn apply(&self, state: &StateVector) -> DVector<Complex64> {
        &self.matrix * state.amplitudes()
    }

    /// `⟨ψ|X|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Complex64 {
        state.amplitudes().dotc(&self.apply(state))
    }

    /// `X ⊗ I` when `self_first`, else `I ⊗ X`, with `I` of size `other_dim`.
    pub fn kron_identity(&self, other_dim: usize, self_first: bool) -> Operator {
        let id = DMatrix::<Complex64>::identity(other_dim, other_dim);
        let m = if self_first {
            self.matrix.kronecker(&id)
        } else {
            id.kronecker(&self.matrix)
        };
        Operator::new(self.label.clone(), m)
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Normalizes `amplitudes`.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<StateVector, FockError> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(FockError::ZeroNorm);
        }
        Ok(StateVector {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Tensor product `|self⟩ ⊗ |other⟩`.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_validation() {
        assert!(FockSpace::new(1, 1).is_err());
        assert!(FockSpace::new(4, 0).is_err());
        assert!(matches!(
            FockSpace::new(64, 3),
            Err(FockError::MemoryCap { dim: 262144, .. })
        ));
        assert_eq!(FockSpace::new(8, 2).unwrap().total_dim(), 64);
    }

    #[test]
    fn adjoint_is_an_involution() {
        let space = FockSpace::single(6).unwrap();
        let ops = &build_operators(&space).unwrap()[0];
        let twice = ops.big_a.adjoint().adjoint();
        assert_eq!(twice.matrix(), ops.big_a.matrix());
    }

    #[test]
    fn zero_state_rejected() {
        assert_eq!(StateVector::new(DVector::zeros(3)), Err(FockError::ZeroNorm));
    }
}
