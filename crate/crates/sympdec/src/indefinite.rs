//! Symplectic diagonalisation of symmetric matrices that are not positive
//! definite.
//!
//! The eigenvalues of `i omega V` still come in `+-lambda` pairs, but the
//! sign that appears in the diagonal form is no longer determined by
//! positivity. The normalised diagonal minor
//!
//! ```text
//! gimel_m = det[R_{k,k}(V - i lambda_m^+ omega)] / aleph_m^+
//! ```
//!
//! equals `|s_{m,k}|^2` under the correct sign and minus that value under
//! the wrong one, so its sign resolves the spectrum; a nonzero imaginary
//! part flags a matrix with no real symplectic diagonalisation at all.

use nalgebra::Complex;

use crate::detdiag::{decompose_with_lambdas, DetDiagOptions, KbarPolicy};
use crate::error::{Error, Result};
use crate::mat::{delete_row_col, det, eigvals_real, to_complex, ComplexMatrix};
use crate::symp::{convert_ordering, omega, CovMatrix, Ordering, SymplecticMatrix, WilliamsonDecomp};

/// Relative tolerance on `|Im gimel_m|` for the necessary-condition test.
pub const GIMEL_IM_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Symplectic eigenvalues with resolved signs.
#[derive(Debug, Clone)]
pub struct SignedSpectrum {
    /// Positive representatives (positive real part; positive imaginary part
    /// when the real part vanishes), sorted by real part descending.
    pub lambdas_plus: Vec<Complex<f64>>,
    /// Which representative appears in the diagonal form.
    pub signs: Vec<Sign>,
    /// The sign-detection diagnostics.
    pub gimel: Vec<Complex<f64>>,
    /// Per mode, whether `|Im gimel_m|` is within tolerance.
    pub im_ok: Vec<bool>,
}

impl SignedSpectrum {
    pub fn signed_lambdas(&self) -> Vec<Complex<f64>> {
        self.lambdas_plus
            .iter()
            .zip(self.signs.iter())
            .map(|(l, s)| match s {
                Sign::Plus => *l,
                Sign::Minus => -*l,
            })
            .collect()
    }

    pub fn all_im_ok(&self) -> bool {
        self.im_ok.iter().all(|&ok| ok)
    }
}

/// `A = V - i lambda omega` for a complex lambda.
fn a_matrix_complex(v: &CovMatrix, lambda: Complex<f64>) -> ComplexMatrix {
    let om = omega(&v.form());
    let mut a = to_complex(v.matrix());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if om[(i, j)] != 0.0 {
                a[(i, j)] -= Complex::new(0.0, 1.0) * lambda * om[(i, j)];
            }
        }
    }
    a
}

fn aleph_complex(lambdas: &[Complex<f64>], m: usize) -> Complex<f64> {
    let lm = lambdas[m];
    lambdas
        .iter()
        .enumerate()
        .filter(|(n, _)| *n != m)
        .fold(lm, |acc, (_, ln)| acc * (ln * ln - lm * lm))
}

/// The sign diagnostic for mode `m` evaluated at pivot row `k`; any
/// `k in 0..2d` gives the same verdict.
pub fn gimel(v: &CovMatrix, lambdas_plus: &[Complex<f64>], m: usize, k: usize) -> Result<Complex<f64>> {
    let n = 2 * v.modes();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, dim: n });
    }
    let a = a_matrix_complex(v, lambdas_plus[m]);
    let beth = det(&delete_row_col(&a, Some(k), Some(k))?)?;
    Ok(beth / aleph_complex(lambdas_plus, m))
}

/// Positive representatives of the `+-lambda` eigenvalue pairs of
/// `i omega V`, with degeneracy and zero checks.
fn positive_representatives(v: &CovMatrix, tau_deg: f64) -> Result<Vec<Complex<f64>>> {
    let om = omega(&v.form());
    let ov = om * v.matrix();
    let mut pool: Vec<Complex<f64>> = eigvals_real(&ov)?
        .into_iter()
        .map(|e| Complex::new(0.0, 1.0) * e)
        .collect();
    let scale = pool.iter().fold(0.0f64, |a, e| a.max(e.norm()));
    if scale <= 0.0 {
        return Err(Error::ZeroSymplecticEigenvalue);
    }
    let mut plus = Vec::with_capacity(v.modes());
    while !pool.is_empty() {
        let (i, _) = pool
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap();
        let e = pool.remove(i);
        if e.norm() <= 1e-10 * scale {
            return Err(Error::ZeroSymplecticEigenvalue);
        }
        let (j, _) = pool
            .iter()
            .enumerate()
            .min_by(|a, b| (e + a.1).norm().partial_cmp(&(e + b.1).norm()).unwrap())
            .ok_or(Error::EigenFailure)?;
        pool.remove(j);
        let rep = if e.re > 1e-12 * e.norm() {
            e
        } else if e.re.abs() <= 1e-12 * e.norm() {
            if e.im > 0.0 {
                e
            } else {
                -e
            }
        } else {
            -e
        };
        plus.push(rep);
    }
    plus.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap()));
    // degeneracy on the positive representatives also catches +-|lambda|
    // collisions across signs, which zero the spectral prefactor
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for m in 0..plus.len() {
        match groups.last_mut() {
            Some(g) if (plus[*g.last().unwrap()] - plus[m]).norm() <= tau_deg * scale => g.push(m),
            _ => groups.push(vec![m]),
        }
    }
    if groups.iter().any(|g| g.len() > 1) {
        return Err(Error::DegenerateSpectrum { groups });
    }
    Ok(plus)
}

/// Resolve the signed symplectic spectrum of a symmetric matrix.
///
/// Fails on zero or degenerate symplectic eigenvalues, which the method
/// cannot handle directly; the caller may opt into the perturbation
/// machinery to lift either condition.
pub fn signed_spectrum(v: &CovMatrix, kbar: &KbarPolicy) -> Result<SignedSpectrum> {
    signed_spectrum_with(v, kbar, DetDiagOptions::default().tau_deg)
}

fn signed_spectrum_with(v: &CovMatrix, kbar: &KbarPolicy, tau_deg: f64) -> Result<SignedSpectrum> {
    let plus = positive_representatives(v, tau_deg)?;
    let n = 2 * v.modes();
    let mut signs = Vec::with_capacity(plus.len());
    let mut gimels = Vec::with_capacity(plus.len());
    let mut im_ok = Vec::with_capacity(plus.len());
    for m in 0..plus.len() {
        let k = match kbar {
            KbarPolicy::Fixed(k0) => k0 % n,
            KbarPolicy::PerModeMax => {
                // pivot-select k by the largest diagonal minor magnitude
                let a = a_matrix_complex(v, plus[m]);
                let mut best = 0usize;
                let mut best_mag = -1.0;
                for k in 0..n {
                    let mag = det(&delete_row_col(&a, Some(k), Some(k))?)?.norm();
                    if mag > best_mag {
                        best_mag = mag;
                        best = k;
                    }
                }
                best
            }
        };
        let g = gimel(v, &plus, m, k)?;
        signs.push(if g.re > 0.0 { Sign::Plus } else { Sign::Minus });
        im_ok.push(g.im.abs() <= GIMEL_IM_TOL * g.norm().max(1e-300));
        gimels.push(g);
    }
    Ok(SignedSpectrum { lambdas_plus: plus, signs, gimel: gimels, im_ok })
}

/// Why no real symplectic diagonalisation exists, with the evidence.
#[derive(Debug, Clone)]
pub struct NotDiagonalizable {
    pub reason: String,
    pub lambdas_plus: Vec<Complex<f64>>,
    pub gimel: Vec<Complex<f64>>,
    /// Residual of the failed certification, when the pipeline got that far.
    pub residual: Option<f64>,
}

/// Outcome of the indefinite decomposition: either a certified result or a
/// verdict that no diagonalising symplectic exists.
#[derive(Debug, Clone)]
pub enum IndefiniteOutcome {
    Diagonalized(WilliamsonDecomp),
    NotDiagonalizable(NotDiagonalizable),
}

/// Symplectic diagonalisation of a (possibly indefinite) symmetric matrix.
///
/// Runs the determinant pipeline with sign-resolved eigenvalues; mandatory
/// certification turns any failure into a `NotDiagonalizable` verdict, since
/// the identity holds whenever a diagonalising symplectic exists.
pub fn decompose_indefinite(v: &CovMatrix, opts: &DetDiagOptions) -> Result<IndefiniteOutcome> {
    let orig = v.ordering();
    let vi = convert_ordering(v, Ordering::Interleaved);
    let ss = signed_spectrum_with(&vi, &opts.kbar, opts.tau_deg)?;
    if !ss.all_im_ok() {
        return Ok(IndefiniteOutcome::NotDiagonalizable(NotDiagonalizable {
            reason: "imaginary sign diagnostic: no real symplectic diagonalisation exists".into(),
            lambdas_plus: ss.lambdas_plus,
            gimel: ss.gimel,
            residual: None,
        }));
    }
    let signed = ss.signed_lambdas();
    let scale = ss.lambdas_plus.iter().fold(0.0f64, |a, l| a.max(l.norm()));
    if signed.iter().any(|l| l.im.abs() > 1e-8 * scale) {
        return Ok(IndefiniteOutcome::NotDiagonalizable(NotDiagonalizable {
            reason: "complex symplectic eigenvalues: no real diagonal form".into(),
            lambdas_plus: ss.lambdas_plus,
            gimel: ss.gimel,
            residual: None,
        }));
    }
    // canonical mode order: signed value descending (for all-positive input
    // this coincides with the positive-definite convention)
    let mut lambdas: Vec<f64> = signed.iter().map(|l| l.re).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    match decompose_with_lambdas(&vi, &lambdas, opts) {
        Ok((s, residual_symp, residual_rec)) => {
            let decomp = WilliamsonDecomp {
                s: SymplecticMatrix::new(s, Ordering::Interleaved, opts.tol)?,
                lambdas,
                residual_symp,
                residual_rec,
            };
            Ok(IndefiniteOutcome::Diagonalized(decomp.convert_ordering(orig)))
        }
        Err(Error::NegativeNorm { value, .. }) => {
            Ok(IndefiniteOutcome::NotDiagonalizable(NotDiagonalizable {
                reason: "sign-resolved pivot ratio still not positive".into(),
                lambdas_plus: ss.lambdas_plus,
                gimel: ss.gimel,
                residual: Some(value),
            }))
        }
        Err(Error::NotSymplectic { residual, .. }) => {
            Ok(IndefiniteOutcome::NotDiagonalizable(NotDiagonalizable {
                reason: "certification failed: no real symplectic diagonalisation exists".into(),
                lambdas_plus: ss.lambdas_plus,
                gimel: ss.gimel,
                residual: Some(residual),
            }))
        }
        Err(e) => Err(e),
    }
}
