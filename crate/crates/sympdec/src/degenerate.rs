//! Decomposition of matrices with (near-)degenerate symplectic spectra.
//!
//! The spectral prefactor vanishes at an exact degeneracy, so the
//! determinant method cannot recover the degenerate modes directly. The
//! workaround decomposes `V + eps Delta` at two magnitudes `eps` and
//! `eps/2`, gauge-aligns the two results, extrapolates linearly to
//! `eps -> 0`, and re-certifies against the unperturbed matrix. The
//! perturbation is scaffolding only: certification is always against the
//! exact input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::detdiag::{decompose_nondegenerate, DetDiagOptions};
use crate::error::{Error, Result};
use crate::mat::{norm_max, RealMatrix};
use crate::sympeig::{symplectic_eigenvalues_with, SympSpectrum};
use crate::symp::{
    convert_ordering, d_matrix, gauge_align, is_symplectic, CovMatrix, Ordering, SympForm,
    SymplecticMatrix, WilliamsonDecomp,
};

/// How the perturbation direction was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbStrategy {
    /// `Delta = (+)_m m I_2`: positive semidefinite, splits equal lambdas for
    /// generic S, keeps positive-definite inputs positive-definite.
    GradedDiagonal,
    /// Per-mode blocks `(1 + u) I_2` with seeded uniform `u in [0, 1)`; covers
    /// directions where the graded choice accidentally preserves a degeneracy.
    SeededRandomDiagonal,
    /// Caller-provided direction.
    UserSupplied,
}

impl PerturbStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbStrategy::GradedDiagonal => "graded-diagonal",
            PerturbStrategy::SeededRandomDiagonal => "seeded-random-diagonal",
            PerturbStrategy::UserSupplied => "user-supplied",
        }
    }
}

/// A perturbation direction with trial magnitudes.
#[derive(Debug, Clone)]
pub struct PerturbPlan {
    pub delta: RealMatrix,
    pub epsilons: Vec<f64>,
    pub strategy: PerturbStrategy,
    /// Seed for the random-diagonal fallback direction.
    pub fallback_seed: u64,
}

impl PerturbPlan {
    /// A user-supplied plan; `delta` is interpreted in the ordering of the
    /// matrix it is applied to and must be symmetric.
    pub fn new(delta: RealMatrix, epsilons: Vec<f64>) -> Result<Self> {
        if delta.nrows() != delta.ncols() {
            return Err(Error::NonSquare { rows: delta.nrows(), cols: delta.ncols() });
        }
        let asym = norm_max(&(delta.transpose() - &delta));
        if asym > 1e-12 * norm_max(&delta).max(1e-300) {
            return Err(Error::NotSymmetric { asymmetry: asym, tol: 1e-12 });
        }
        Ok(PerturbPlan {
            delta,
            epsilons,
            strategy: PerturbStrategy::UserSupplied,
            fallback_seed: 0,
        })
    }
}

fn graded_diagonal(d: usize, ordering: Ordering) -> RealMatrix {
    d_matrix(&(1..=d).map(|m| m as f64).collect::<Vec<_>>(), ordering)
}

fn random_diagonal(d: usize, ordering: Ordering, seed: u64) -> RealMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let diag: Vec<f64> = (0..d).map(|_| 1.0 + rng.random_range(0.0..1.0)).collect();
    d_matrix(&diag, ordering)
}

/// Default perturbation plan for a degenerate spectrum: graded-diagonal
/// direction, `eps_0 = 1e-6 max |V|`, with a seeded random-diagonal fallback.
pub fn make_plan(v: &CovMatrix, _spec: &SympSpectrum, seed: u64) -> PerturbPlan {
    let eps0 = 1e-6 * v.norm_max().max(1e-300);
    PerturbPlan {
        delta: graded_diagonal(v.modes(), v.ordering()),
        epsilons: vec![eps0, 10.0 * eps0],
        strategy: PerturbStrategy::GradedDiagonal,
        fallback_seed: seed,
    }
}

/// A certified decomposition obtained through the perturbation workflow,
/// with the magnitude and direction strategy that produced it.
#[derive(Debug, Clone)]
pub struct PerturbedOutcome {
    pub decomp: WilliamsonDecomp,
    pub epsilon: f64,
    pub strategy: PerturbStrategy,
}

/// Pair each entry of `from` with the nearest unused entry of `to`
/// (lambda-value continuity, not index identity).
fn nearest_pairing(from: &[f64], to: &[f64]) -> Vec<usize> {
    let mut used = vec![false; to.len()];
    let mut pairing = Vec::with_capacity(from.len());
    for &x in from {
        let (best, _) = to
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, (x - y).abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("pairing over non-empty list");
        used[best] = true;
        pairing.push(best);
    }
    pairing
}

fn perturbed_cov(vi: &CovMatrix, delta: &RealMatrix, eps: f64) -> Result<CovMatrix> {
    CovMatrix::new(vi.matrix() + delta * eps, Ordering::Interleaved)
}

fn attempt(
    vi: &CovMatrix,
    spec0: &SympSpectrum,
    delta: &RealMatrix,
    eps: f64,
    opts: &DetDiagOptions,
) -> Result<WilliamsonDecomp> {
    let v1 = perturbed_cov(vi, delta, eps)?;
    let v2 = perturbed_cov(vi, delta, eps / 2.0)?;
    let spec1 = symplectic_eigenvalues_with(&v1, opts.tau_deg)?;
    let spec2 = symplectic_eigenvalues_with(&v2, opts.tau_deg)?;
    if spec1.is_degenerate() || spec2.is_degenerate() {
        return Err(Error::DegeneracyNotBroken);
    }
    let inner = DetDiagOptions { auto_perturb: false, ..*opts };
    let w1 = decompose_nondegenerate(&v1, &spec1, &inner)?;
    let w2 = decompose_nondegenerate(&v2, &spec2, &inner)?;

    // Gauge-align the eps/2 result onto the eps result before extrapolating:
    // the per-mode phases of the two runs are independently arbitrary.
    let pairing = nearest_pairing(&w1.lambdas, &w2.lambdas);
    let (aligned2, _) = gauge_align(w2.s.matrix(), w1.s.matrix(), &pairing);
    let s0 = aligned2 * 2.0 - w1.s.matrix();

    // D comes from the unperturbed spectrum; modes matched by lambda order
    // (both lists are sorted descending).
    let lambdas0 = spec0.lambdas.clone();

    let form = SympForm::new(vi.modes(), Ordering::Interleaved);
    let (residual_symp, symp_ok) = is_symplectic(&s0, &form, opts.tol_deg)?;
    let rec_abs = norm_max(&(s0.transpose() * d_matrix(&lambdas0, Ordering::Interleaved) * &s0 - vi.matrix()));
    if !symp_ok || rec_abs > opts.tol_deg * vi.norm_max() {
        return Err(Error::CertificationFailed {
            residual_symp,
            residual_rec: rec_abs / vi.norm_max().max(1.0),
        });
    }
    Ok(WilliamsonDecomp {
        s: SymplecticMatrix::new(s0, Ordering::Interleaved, opts.tol_deg)?,
        lambdas: lambdas0,
        residual_symp,
        residual_rec: rec_abs / vi.norm_max().max(1.0),
    })
}

/// Decompose a matrix with a degenerate symplectic spectrum through the
/// perturbation workflow. Non-degenerate inputs pass straight through the
/// determinant method (`eps` forced to 0).
pub fn decompose_perturbed(
    v: &CovMatrix,
    plan: &PerturbPlan,
    opts: &DetDiagOptions,
) -> Result<PerturbedOutcome> {
    let orig = v.ordering();
    let vi = convert_ordering(v, Ordering::Interleaved);
    let spec0 = symplectic_eigenvalues_with(&vi, opts.tau_deg)?;
    if !spec0.is_degenerate() {
        let w = decompose_nondegenerate(&vi, &spec0, &DetDiagOptions { auto_perturb: false, ..*opts })?;
        return Ok(PerturbedOutcome {
            decomp: w.convert_ordering(orig),
            epsilon: 0.0,
            strategy: plan.strategy,
        });
    }

    let delta_interleaved = crate::symp::permute_ordering(&plan.delta, orig, Ordering::Interleaved);
    let fallback = random_diagonal(vi.modes(), Ordering::Interleaved, plan.fallback_seed);
    let directions = [
        (delta_interleaved, plan.strategy),
        (fallback, PerturbStrategy::SeededRandomDiagonal),
    ];

    let mut broke_degeneracy = false;
    let mut last_err = Error::DegeneracyNotBroken;
    for (delta, strategy) in directions {
        for &eps in &plan.epsilons {
            match attempt(&vi, &spec0, &delta, eps, opts) {
                Ok(w) => {
                    return Ok(PerturbedOutcome {
                        decomp: w.convert_ordering(orig),
                        epsilon: eps,
                        strategy,
                    })
                }
                Err(Error::DegeneracyNotBroken) => {
                    last_err = Error::DegeneracyNotBroken;
                }
                Err(e) => {
                    broke_degeneracy = true;
                    last_err = e;
                }
            }
        }
    }
    if !broke_degeneracy {
        return Err(Error::DegeneracyNotBroken);
    }
    Err(last_err)
}
