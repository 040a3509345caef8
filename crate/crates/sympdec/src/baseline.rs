//! Eigenvector-based Williamson decomposition, used as the independent
//! cross-validation oracle for the determinant method.
//!
//! Builds `S = D^{-1/2} K V^{1/2}` where `K` is the real orthogonal matrix
//! assembled from the eigenvectors of the antisymmetric kernel
//! `X = V^{1/2} omega V^{1/2}`. Requires positive-definite input.

use nalgebra::Complex;

use crate::detdiag::SVector;
use crate::error::{Error, Result};
use crate::mat::{norm_max, ComplexVector, RealMatrix};
use crate::symp::{
    convert_ordering, d_matrix, is_symplectic, omega, reconstruction_residual, CovMatrix,
    Ordering, SympForm, SymplecticMatrix, WilliamsonDecomp,
};

/// Intermediates of the eigenvector method, exposed for diagnostics and the
/// identity checks in the test suite.
#[derive(Debug, Clone)]
pub struct BaselineWork {
    /// Symmetric positive square root of V.
    pub vhalf: RealMatrix,
    /// Antisymmetric kernel `V^{1/2} omega V^{1/2}`.
    pub x: RealMatrix,
    /// Real orthogonal matrix built from the eigenvectors of `x`.
    pub k: RealMatrix,
    /// Eigenpairs `(mu_m, x_m)` of `x` with `x x_m = i mu_m x_m`, mu descending.
    pub pairs: Vec<(f64, ComplexVector)>,
}

/// Unique symmetric positive-definite square root of a symmetric PD matrix.
pub fn sqrt_sym_pd(m: &RealMatrix) -> Result<RealMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let asym = norm_max(&(m.transpose() - m));
    if asym > 1e-10 * norm_max(m).max(1e-300) {
        return Err(Error::NotSymmetric { asymmetry: asym, tol: 1e-10 });
    }
    let eig = m.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.min();
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let sq = RealMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * sq * eig.eigenvectors.transpose();
    Ok((&root + root.transpose()) * 0.5)
}

/// Rotate an eigenvector so its largest-magnitude entry is real positive.
/// The choice changes S only by gauge; it pins a deterministic result.
fn fix_phase(v: &ComplexVector) -> ComplexVector {
    let mut best = 0usize;
    let mut best_mag = 0.0;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    let phase = v[best] / Complex::new(v[best].norm(), 0.0);
    v.map(|z| z * phase.conj())
}

/// Compute the method's intermediates for a positive-definite covariance
/// matrix (interleaved frame).
pub fn baseline_work(v: &CovMatrix) -> Result<BaselineWork> {
    let vi = convert_ordering(v, Ordering::Interleaved);
    let d = vi.modes();
    let vhalf = sqrt_sym_pd(vi.matrix())?;
    let om = omega(&SympForm::new(d, Ordering::Interleaved));
    let x = &vhalf * om * &vhalf;
    let x = (&x - x.transpose()) * 0.5;
    let pairs: Vec<(f64, ComplexVector)> = crate::mat::eigvecs_paired(&x)?
        .into_iter()
        .map(|(mu, vec)| (mu, fix_phase(&vec)))
        .collect();
    // K^T = sqrt(2) (-Im x_1  Re x_1  ...  -Im x_d  Re x_d)
    let mut kt = RealMatrix::zeros(2 * d, 2 * d);
    let s2 = 2.0f64.sqrt();
    for (m, (_, xm)) in pairs.iter().enumerate() {
        for r in 0..2 * d {
            kt[(r, 2 * m)] = -s2 * xm[r].im;
            kt[(r, 2 * m + 1)] = s2 * xm[r].re;
        }
    }
    Ok(BaselineWork { vhalf, x, k: kt.transpose(), pairs })
}

/// Williamson decomposition by the eigenvector method. Positive-definite
/// inputs only; the result is certified to 1e-8 residuals.
pub fn decompose_baseline(v: &CovMatrix) -> Result<WilliamsonDecomp> {
    let orig = v.ordering();
    let vi = convert_ordering(v, Ordering::Interleaved);
    let d = vi.modes();
    let work = baseline_work(&vi)?;
    let lambdas: Vec<f64> = work.pairs.iter().map(|(mu, _)| *mu).collect();
    let dinv_half = d_matrix(
        &lambdas.iter().map(|l| 1.0 / l.sqrt()).collect::<Vec<_>>(),
        Ordering::Interleaved,
    );
    let s = dinv_half * &work.k * &work.vhalf;

    let tol = 1e-8;
    let (residual_symp, ok) = is_symplectic(&s, &SympForm::new(d, Ordering::Interleaved), tol)?;
    if !ok {
        return Err(Error::NotSymplectic { residual: residual_symp, tol });
    }
    let residual_rec = reconstruction_residual(&s, &lambdas, vi.matrix(), Ordering::Interleaved);
    if residual_rec > tol {
        return Err(Error::NotSymplectic { residual: residual_rec, tol });
    }
    let decomp = WilliamsonDecomp {
        s: SymplecticMatrix::new(s, Ordering::Interleaved, tol)?,
        lambdas,
        residual_symp,
        residual_rec,
    };
    Ok(decomp.convert_ordering(orig))
}

/// Pack the rows of a symplectic matrix into complex s-vectors (the inverse
/// of the extraction map used by the determinant method).
///
/// Interleaved frame, 0-based column c of mode m:
/// even c: `s[c] = -S[2m, c+1] + i S[2m+1, c+1]`,
/// odd  c: `s[c] =  S[2m, c-1] - i S[2m+1, c-1]`.
/// The block-ordered variant shifts by d instead.
pub fn s_vectors_from_s(s: &SymplecticMatrix) -> Vec<SVector> {
    let d = s.modes();
    let m = s.matrix();
    let mut out = Vec::with_capacity(d);
    for mode in 0..d {
        let mut entries = vec![Complex::new(0.0, 0.0); 2 * d];
        match s.ordering() {
            Ordering::Interleaved => {
                let (r0, r1) = (2 * mode, 2 * mode + 1);
                for c in 0..2 * d {
                    entries[c] = if c % 2 == 0 {
                        Complex::new(-m[(r0, c + 1)], m[(r1, c + 1)])
                    } else {
                        Complex::new(m[(r0, c - 1)], -m[(r1, c - 1)])
                    };
                }
            }
            Ordering::Block => {
                let (r0, r1) = (mode, mode + d);
                for c in 0..2 * d {
                    entries[c] = if c < d {
                        Complex::new(-m[(r0, c + d)], m[(r1, c + d)])
                    } else {
                        Complex::new(m[(r0, c - d)], -m[(r1, c - d)])
                    };
                }
            }
        }
        // kbar: the largest-magnitude entry, for reference only
        let kbar = entries
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        out.push(SVector { mode, entries, kbar });
    }
    out
}
