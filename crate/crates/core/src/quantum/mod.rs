//! Truncated Fock-space quantum oracle.
//!
//! Integrates the untransformed master equation directly (the unambiguous
//! ground truth for the mean-field modules), builds the mirror displacement
//! operator, and checks the thermal displacement expectations. The
//! displacement-transformed master equation is deliberately not integrated a
//! second time; the transform only enters through the expectation checks.

pub mod compare;
pub mod displace;
pub mod lindblad;
pub mod ops;

pub use compare::{meanfield_discrepancy, DiscrepancyReport};
pub use displace::{displacement_expectation, displacement_operator, DisplacementExpectation};
pub use lindblad::{
    build_hamiltonian, evolve_rho, initial_state, lindblad_rhs, thermal_state, DensityMatrix,
    MasterEq, RhoTrajectory,
};
pub use ops::{CMat, OperatorSet};

use thiserror::Error;

/// Largest joint dimension accepted by default; keeps runs desk-scale.
pub const DEFAULT_MAX_DIM: usize = 400;

/// Fock-space truncation for the joint cavity ⊗ mirror space.
///
/// `n_mirror = 1` freezes the mirror (only meaningful with `G = 0`); the
/// linear-cavity oracle runs use exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertConfig {
    pub n_cavity: usize,
    pub n_mirror: usize,
    max_dim: usize,
}

impl HilbertConfig {
    pub fn new(n_cavity: usize, n_mirror: usize) -> Result<Self, QuantumError> {
        let cfg = Self { n_cavity, n_mirror, max_dim: DEFAULT_MAX_DIM };
        cfg.check()?;
        Ok(cfg)
    }

    /// Same config with a custom dimension cap.
    pub fn with_max_dim(n_cavity: usize, n_mirror: usize, max_dim: usize) -> Result<Self, QuantumError> {
        let cfg = Self { n_cavity, n_mirror, max_dim };
        cfg.check()?;
        Ok(cfg)
    }

    pub(crate) fn check(&self) -> Result<(), QuantumError> {
        if self.n_cavity < 2 || self.n_mirror < 1 {
            return Err(QuantumError::InvalidInput("need n_cavity >= 2 and n_mirror >= 1"));
        }
        if self.dim() > self.max_dim {
            return Err(QuantumError::DimensionOverflow { dim: self.dim(), max: self.max_dim });
        }
        Ok(())
    }

    /// Joint dimension `n_cavity · n_mirror`.
    pub fn dim(&self) -> usize {
        self.n_cavity * self.n_mirror
    }
}

/// Errors from the quantum oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("joint dimension {dim} exceeds the cap {max}")]
    DimensionOverflow { dim: usize, max: usize },
    #[error("operator/state shapes do not match")]
    ShapeMismatch,
    #[error("cutoff-level population {population:.3e} exceeds the trust limit")]
    TruncationBreach { population: f64 },
    #[error("thermal tail mass {tail:.3e} beyond the cutoff is too large")]
    CutoffTooSmall { tail: f64 },
    #[error("density-matrix invariant violated: {0}")]
    InvariantViolated(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}
