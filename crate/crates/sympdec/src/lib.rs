//! Williamson decomposition of covariance matrices from submatrix
//! determinants.
//!
//! For a real symmetric `2d x 2d` matrix `V` this crate computes a real
//! symplectic `S` and a diagonal `D = (+)_m lambda_m I_2` with
//! `V = S^T D S`. The primary method recovers the rows of `S` from
//! determinants of one-row/one-column minors of `V - i lambda_m omega`
//! ([`detdiag`]); an eigenvector-based construction ([`baseline`]) serves as
//! an independent cross-check. Degenerate symplectic spectra are handled by
//! perturbation and extrapolation ([`degenerate`]), and indefinite symmetric
//! matrices by resolving the signs of their symplectic eigenvalues
//! ([`indefinite`]), including a verdict when no real symplectic
//! diagonalisation exists.

pub mod baseline;
pub mod degenerate;
pub mod detdiag;
pub mod error;
pub mod identities;
pub mod indefinite;
pub mod mat;
pub mod symp;
pub mod sympeig;

pub use error::{Error, Result};

pub use detdiag::{decompose_det, DetDiagOptions, KbarPolicy, SVector};
pub use symp::{
    convert_ordering, gauge_apply, gauge_distance, is_symplectic, omega, random_covariance,
    random_symplectic, CovMatrix, GaugeRotation, Ordering, SympForm, SymplecticMatrix,
    WilliamsonDecomp,
};
pub use sympeig::{aleph, symplectic_eigenvalues, SympSpectrum};

pub use baseline::decompose_baseline;
pub use degenerate::{decompose_perturbed, make_plan, PerturbPlan, PerturbStrategy, PerturbedOutcome};
pub use indefinite::{decompose_indefinite, signed_spectrum, IndefiniteOutcome, SignedSpectrum};
