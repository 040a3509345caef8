//! Symplectic eigenvalues and spectral-gap / degeneracy analysis.

use crate::baseline::sqrt_sym_pd;
use crate::error::Result;
use crate::mat::RealMatrix;
use crate::symp::{omega, CovMatrix};

/// Default relative tolerance under which two symplectic eigenvalues are
/// treated as degenerate. Below it the spectral prefactor aleph is
/// numerically meaningless and the perturbation path must take over.
pub const DEFAULT_DEG_TOL: f64 = 1e-8;

/// The symplectic spectrum of a covariance matrix, with pairwise gaps and
/// the partition of the modes into degenerate groups.
#[derive(Debug, Clone)]
pub struct SympSpectrum {
    /// Symplectic eigenvalues, sorted descending (canonical mode labels).
    pub lambdas: Vec<f64>,
    /// Pairwise `|lambda_n^2 - lambda_m^2|`.
    pub gaps: RealMatrix,
    /// Partition of mode labels; modes share a group iff their lambdas agree
    /// within `tau_deg * max |lambda|`.
    pub degenerate_groups: Vec<Vec<usize>>,
    pub tau_deg: f64,
}

impl SympSpectrum {
    /// Build the spectrum bookkeeping from an explicit lambda list (assumed
    /// sorted in the caller's canonical order).
    pub fn from_lambdas(lambdas: Vec<f64>, tau_deg: f64) -> Self {
        let d = lambdas.len();
        let gaps = RealMatrix::from_fn(d, d, |m, n| (lambdas[n].powi(2) - lambdas[m].powi(2)).abs());
        let scale = lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs())).max(1e-300);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| lambdas[b].partial_cmp(&lambdas[a]).unwrap());
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &idx in &order {
            match groups.last_mut() {
                Some(g) if (lambdas[*g.last().unwrap()] - lambdas[idx]).abs() <= tau_deg * scale => {
                    g.push(idx)
                }
                _ => groups.push(vec![idx]),
            }
        }
        SympSpectrum { lambdas, gaps, degenerate_groups: groups, tau_deg }
    }

    pub fn modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate_groups.iter().any(|g| g.len() > 1)
    }

    /// Physicality check against a shot-noise floor. The floor's numerical
    /// value depends on the convention in use, so this is offered for
    /// callers but never enforced by the library.
    pub fn is_physical(&self, shot_noise: f64) -> bool {
        self.lambdas.iter().all(|l| *l >= shot_noise)
    }
}

/// Symplectic eigenvalues of a positive-definite covariance matrix.
///
/// Computed as the positive eigenvalues of `i omega V`, obtained in practice
/// from the Hermitian similarity `V^{1/2} (i omega) V^{1/2}` for real
/// spectrum and better conditioning. Sorted descending.
pub fn symplectic_eigenvalues(v: &CovMatrix) -> Result<SympSpectrum> {
    symplectic_eigenvalues_with(v, DEFAULT_DEG_TOL)
}

/// As [`symplectic_eigenvalues`] with an explicit degeneracy tolerance.
pub fn symplectic_eigenvalues_with(v: &CovMatrix, tau_deg: f64) -> Result<SympSpectrum> {
    let vhalf = sqrt_sym_pd(v.matrix())?;
    let om = omega(&v.form());
    let x = &vhalf * om * &vhalf;
    let x = (&x - x.transpose()) * 0.5;
    // i X is Hermitian with eigenvalues {+-lambda_m}
    let herm = x.map(|e| nalgebra::Complex::new(0.0, e));
    let eig = herm.symmetric_eigen();
    let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().filter(|x| *x > 0.0).collect();
    if lambdas.len() != v.modes() {
        return Err(crate::error::Error::ZeroSymplecticEigenvalue);
    }
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(SympSpectrum::from_lambdas(lambdas, tau_deg))
}

/// The spectral prefactor `aleph_m = lambda_m prod_{n != m} (lambda_n^2 - lambda_m^2)`.
///
/// Zero exactly when `lambda_m` is degenerate; callers branch on that.
pub fn aleph(spec: &SympSpectrum, m: usize) -> f64 {
    aleph_of(&spec.lambdas, m)
}

/// `aleph` evaluated on a bare lambda list.
pub fn aleph_of(lambdas: &[f64], m: usize) -> f64 {
    let lm = lambdas[m];
    lambdas
        .iter()
        .enumerate()
        .filter(|(n, _)| *n != m)
        .fold(lm, |acc, (_, ln)| acc * (ln * ln - lm * lm))
}
