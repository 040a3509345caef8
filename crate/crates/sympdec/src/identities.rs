//! Executable determinant identities used as property-test oracles and
//! diagnostics.
//!
//! These evaluate both sides of the concatenation identity (for arbitrary
//! rectangular factors) and its degenerate-group generalisation with both
//! sides computed independently. They are test/diagnostic surface; the
//! decomposition pipeline does not depend on them.

use nalgebra::Complex;

use crate::detdiag::{a_matrix, SVector};
use crate::error::{Error, Result};
use crate::mat::{delete_rows_cols, det, ComplexMatrix, ComplexVector};
use crate::symp::CovMatrix;

/// A rectangular base with appended column vectors, realised as one square
/// matrix. Concatenation, not multiplication.
#[derive(Debug, Clone)]
pub struct ConcatMatrix {
    pub base: ComplexMatrix,
    pub appended: Vec<ComplexVector>,
}

impl ConcatMatrix {
    pub fn new(base: ComplexMatrix, appended: Vec<ComplexVector>) -> Result<Self> {
        let n = base.nrows();
        if base.ncols() + appended.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: base.ncols() + appended.len() });
        }
        if appended.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: 0 });
        }
        Ok(ConcatMatrix { base, appended })
    }

    pub fn realize(&self) -> ComplexMatrix {
        let n = self.base.nrows();
        let mut out = ComplexMatrix::zeros(n, n);
        out.columns_mut(0, self.base.ncols()).copy_from(&self.base);
        for (j, v) in self.appended.iter().enumerate() {
            out.column_mut(self.base.ncols() + j).copy_from(v);
        }
        out
    }
}

/// The selector `M_l`: the (n-1)-dimensional identity with a zero row
/// inserted at index l, so that `M_l^dagger A M_k` removes row l and
/// column k of A.
pub fn selector(l: usize, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n - 1);
    for j in 0..n - 1 {
        let row = if j < l { j } else { j + 1 };
        m[(row, j)] = Complex::new(1.0, 0.0);
    }
    m
}

fn concat_with_svecs(
    base: &ComplexMatrix,
    svecs: &[&SVector],
) -> Result<ComplexMatrix> {
    let inv_sqrt2 = Complex::new(1.0 / 2.0f64.sqrt(), 0.0);
    let cols: Vec<ComplexVector> = svecs
        .iter()
        .map(|sv| ComplexVector::from_iterator(sv.entries.len(), sv.entries.iter().map(|e| e * inv_sqrt2)))
        .collect();
    Ok(ConcatMatrix::new(base.clone(), cols)?.realize())
}

/// Both sides of the concatenation identity for a degenerate group
/// `{m_j}` (size p) and rectangular factors `B_x`, `B_y` of shape
/// `2d x (2d - p)`:
///
/// ```text
/// det[Bx^† A_m By] = det[(Bx s_{m_1}/sqrt2 ... )]^* det[(By s_{m_1}/sqrt2 ... )]
///                    * (2 lambda_m)^p prod_{n not in group} (lambda_n^2 - lambda_m^2)
/// ```
pub fn corollary1_sides(
    v: &CovMatrix,
    lambdas: &[f64],
    group: &[usize],
    bx: &ComplexMatrix,
    by: &ComplexMatrix,
    svecs: &[SVector],
) -> Result<(Complex<f64>, Complex<f64>)> {
    let n = 2 * v.modes();
    let p = group.len();
    if bx.nrows() != n || by.nrows() != n || bx.ncols() != n - p || by.ncols() != n - p {
        return Err(Error::DimensionMismatch { expected: n - p, got: bx.ncols() });
    }
    let lam = lambdas[group[0]];
    let a = a_matrix(v, lam);
    let lhs = det(&(bx.adjoint() * &a * by))?;

    let group_svecs: Vec<&SVector> = group.iter().map(|&m| &svecs[m]).collect();
    let cx = det(&concat_with_svecs(bx, &group_svecs)?)?;
    let cy = det(&concat_with_svecs(by, &group_svecs)?)?;
    let mut prefactor = (2.0 * lam).powi(p as i32);
    for (nn, &ln) in lambdas.iter().enumerate() {
        if !group.contains(&nn) {
            prefactor *= ln * ln - lam * lam;
        }
    }
    let rhs = cx.conj() * cy * Complex::new(prefactor, 0.0);
    Ok((lhs, rhs))
}

/// Both sides of the non-degenerate identity (`p = 1`):
/// `det[Bx^† A_m By]` against
/// `det[(Bx s_m/sqrt2)]^* det[(By s_m/sqrt2)] 2 lambda_m prod (lambda_n^2 - lambda_m^2)`.
pub fn theorem2_sides(
    v: &CovMatrix,
    lambdas: &[f64],
    m: usize,
    bx: &ComplexMatrix,
    by: &ComplexMatrix,
    s_m: &SVector,
) -> Result<(Complex<f64>, Complex<f64>)> {
    let mut svecs: Vec<SVector> = Vec::new();
    for mm in 0..lambdas.len() {
        if mm == m {
            svecs.push(s_m.clone());
        } else {
            // placeholder; corollary1_sides only reads the group's vectors
            svecs.push(SVector { mode: mm, entries: vec![Complex::new(0.0, 0.0); 2 * v.modes()], kbar: 0 });
        }
    }
    corollary1_sides(v, lambdas, &[m], bx, by, &svecs)
}

/// Both sides of the degenerate-group minor identity: for a p-fold
/// degenerate `lambda_m` with labels `group`, row set `ks` and column set
/// `ls` (0-based, ascending),
///
/// ```text
/// det[R_{ks,ls}(A_m)] = (-1)^{sum ks + sum ls} lambda_m^p
///   * det[s_{group,ks}]^* det[s_{group,ls}]
///   * prod_{n not in group} (lambda_n^2 - lambda_m^2)
/// ```
pub fn corollary2_sides(
    v: &CovMatrix,
    lambdas: &[f64],
    group: &[usize],
    ks: &[usize],
    ls: &[usize],
    svecs: &[SVector],
) -> Result<(Complex<f64>, Complex<f64>)> {
    let n = 2 * v.modes();
    let p = group.len();
    if ks.len() != p || ls.len() != p {
        return Err(Error::DimensionMismatch { expected: p, got: ks.len().max(ls.len()) });
    }
    for &k in ks.iter().chain(ls.iter()) {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dim: n });
        }
    }
    let lam = lambdas[group[0]];
    let a = a_matrix(v, lam);
    let lhs = det(&delete_rows_cols(&a, ks, ls)?)?;

    let smat = |cols: &[usize]| -> ComplexMatrix {
        ComplexMatrix::from_fn(p, p, |i, j| svecs[group[i]].entries[cols[j]])
    };
    let det_k = det(&smat(ks))?;
    let det_l = det(&smat(ls))?;
    let parity: usize = ks.iter().sum::<usize>() + ls.iter().sum::<usize>();
    let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut prefactor = sign * lam.powi(p as i32);
    for (nn, &ln) in lambdas.iter().enumerate() {
        if !group.contains(&nn) {
            prefactor *= ln * ln - lam * lam;
        }
    }
    let rhs = det_k.conj() * det_l * Complex::new(prefactor, 0.0);
    Ok((lhs, rhs))
}
