//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by decomposition routines and matrix primitives.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix is not symmetric: max asymmetry {asymmetry:.3e} exceeds {tol:.3e}")]
    NotSymmetric { asymmetry: f64, tol: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    #[error("zero eigenvalue encountered in antisymmetric kernel")]
    SingularKernel,

    #[error("degenerate symplectic spectrum: groups {groups:?}")]
    DegenerateSpectrum { groups: Vec<Vec<usize>> },

    #[error("mode {mode}: no admissible pivot row (best diagonal minor {best:.3e})")]
    PivotFailure { mode: usize, best: f64 },

    #[error("mode {mode}: pivot ratio beth/aleph = {value:.3e} is not positive")]
    NegativeNorm { mode: usize, value: f64 },

    #[error("result is not symplectic: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },

    #[error(
        "certification against the unperturbed matrix failed \
         (symplectic {residual_symp:.3e}, reconstruction {residual_rec:.3e})"
    )]
    CertificationFailed { residual_symp: f64, residual_rec: f64 },

    #[error("perturbation did not break the spectral degeneracy")]
    DegeneracyNotBroken,

    #[error("zero symplectic eigenvalue; perturb the input to proceed")]
    ZeroSymplecticEigenvalue,

    #[error("lambda lists are not compatible: {reason}")]
    LambdaMismatch { reason: String },

    #[error("invalid lambda value {0}: symplectic eigenvalues must be nonzero")]
    InvalidLambda(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
