//! Dense matrix primitives: row/column deletion, determinants by pivoted
//! elimination, and eigenvalue extraction.
//!
//! Storage is delegated to `nalgebra`; the determinant is deliberately a
//! plain partially-pivoted elimination since submatrix determinants dominate
//! the decomposition's runtime and stability matters more than constant
//! factors.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex<f64>>;
pub type ComplexVector = DVector<Complex<f64>>;

/// Promote a real matrix to complex entries.
pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex::new(x, 0.0))
}

/// Max-norm (largest absolute entry) of a real matrix.
pub fn norm_max(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Max-norm of a complex matrix.
pub fn norm_max_c(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Remove one row and/or one column (0-based indices, `None` = keep all).
pub fn delete_row_col(
    m: &ComplexMatrix,
    row: Option<usize>,
    col: Option<usize>,
) -> Result<ComplexMatrix> {
    if let Some(r) = row {
        if r >= m.nrows() {
            return Err(Error::IndexOutOfRange { index: r, dim: m.nrows() });
        }
    }
    if let Some(c) = col {
        if c >= m.ncols() {
            return Err(Error::IndexOutOfRange { index: c, dim: m.ncols() });
        }
    }
    let mut out = m.clone();
    if let Some(r) = row {
        out = out.remove_row(r);
    }
    if let Some(c) = col {
        out = out.remove_column(c);
    }
    Ok(out)
}

/// Remove a set of rows and a set of columns, preserving the relative order
/// of what remains.
pub fn delete_rows_cols(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> Result<ComplexMatrix> {
    for &r in rows {
        if r >= m.nrows() {
            return Err(Error::IndexOutOfRange { index: r, dim: m.nrows() });
        }
    }
    for &c in cols {
        if c >= m.ncols() {
            return Err(Error::IndexOutOfRange { index: c, dim: m.ncols() });
        }
    }
    let keep_r: Vec<usize> = (0..m.nrows()).filter(|i| !rows.contains(i)).collect();
    let keep_c: Vec<usize> = (0..m.ncols()).filter(|j| !cols.contains(j)).collect();
    Ok(ComplexMatrix::from_fn(keep_r.len(), keep_c.len(), |i, j| {
        m[(keep_r[i], keep_c[j])]
    }))
}

fn det_eliminate<T: ComplexField>(mut m: DMatrix<T>) -> T {
    let n = m.nrows();
    if n == 0 {
        return T::one();
    }
    let mut det = T::one();
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = m[(k, k)].clone().modulus();
        for r in (k + 1)..n {
            let mag = m[(r, k)].clone().modulus();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == nalgebra::convert(0.0) {
            return T::zero();
        }
        if pivot_row != k {
            m.swap_rows(pivot_row, k);
            det = -det;
        }
        let pivot = m[(k, k)].clone();
        det *= pivot.clone();
        for r in (k + 1)..n {
            let factor = m[(r, k)].clone() / pivot.clone();
            for c in (k + 1)..n {
                let sub = factor.clone() * m[(k, c)].clone();
                m[(r, c)] -= sub;
            }
        }
    }
    det
}

/// Determinant by elimination with partial pivoting. The 0x0 determinant is 1.
pub fn det(m: &ComplexMatrix) -> Result<Complex<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(det_eliminate(m.clone()))
}

/// Real-matrix determinant, same elimination scheme.
pub fn det_real(m: &RealMatrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(det_eliminate(m.clone()))
}

/// How an eigenvalue extraction should treat its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Input is Hermitian (e.g. a Hermitian similarity of a real symmetric
    /// problem); eigenvalues are returned with exactly zero imaginary part.
    RealSymmetricInput,
    /// No structure assumed; a general (Schur-based) solve is used.
    General,
}

/// Eigenvalues with multiplicity, ordering unspecified.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<Complex<f64>>,
    pub kind: SpectrumKind,
}

/// Eigenvalues of a square complex matrix.
///
/// With `RealSymmetricInput` the matrix must be Hermitian; the returned
/// values are real. With `General` a complex Schur decomposition is used.
pub fn eigvals(m: &ComplexMatrix, kind: SpectrumKind) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let values = match kind {
        SpectrumKind::RealSymmetricInput => {
            let herm_residual = norm_max_c(&(m.adjoint() - m));
            if herm_residual > 1e-10 * norm_max_c(m).max(1.0) {
                return Err(Error::NotSymmetric { asymmetry: herm_residual, tol: 1e-10 });
            }
            let eig = m.clone().symmetric_eigen();
            eig.eigenvalues.iter().map(|&x| Complex::new(x, 0.0)).collect()
        }
        SpectrumKind::General => {
            let schur = m.clone().try_schur(1e-14, 100_000).ok_or(Error::EigenFailure)?;
            let vals = schur.eigenvalues().ok_or(Error::EigenFailure)?;
            vals.iter().copied().collect()
        }
    };
    Ok(Spectrum { values, kind })
}

/// Eigenvalues of a general real matrix (real Schur based).
pub fn eigvals_real(m: &RealMatrix) -> Result<Vec<Complex<f64>>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.complex_eigenvalues().iter().copied().collect())
}

/// Eigenpairs of a real antisymmetric matrix.
///
/// The spectrum of such a matrix is `{±i mu_m}` with `mu_m > 0` and the
/// eigenvectors of the `-i mu` half are the conjugates of the `+i mu` half.
/// Returns the d pairs `(mu_m, x_m)` with `X x_m = i mu_m x_m` and unit-norm
/// `x_m`; the conjugate partners are implied. Fails on a zero eigenvalue.
pub fn eigvecs_paired(x: &RealMatrix) -> Result<Vec<(f64, ComplexVector)>> {
    let n = x.nrows();
    if n != x.ncols() {
        return Err(Error::NonSquare { rows: n, cols: x.ncols() });
    }
    let asym = norm_max(&(x.transpose() + x));
    if asym > 1e-10 * norm_max(x).max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym, tol: 1e-10 });
    }
    // H = -iX is Hermitian and H x = mu x exactly when X x = i mu x.
    let h = x.map(|v| Complex::new(0.0, -v));
    let eig = h.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut pairs = Vec::new();
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu.abs() <= 1e-12 * scale.max(1e-300) {
            return Err(Error::SingularKernel);
        }
        if mu > 0.0 {
            let v: ComplexVector = eig.eigenvectors.column(i).into_owned();
            let v = &v / Complex::new(v.norm(), 0.0);
            pairs.push((mu, v));
        }
    }
    if 2 * pairs.len() != n {
        return Err(Error::EigenFailure);
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(pairs)
}
