//! Symplectic forms, covariance and symplectic matrix types, quadrature
//! ordering conversion, gauge (one-mode phase rotation) equivalence, and
//! seeded random instance generation.
//!
//! Two quadrature orderings are supported: interleaved `(x1,p1,...,xd,pd)`
//! and block `(x1,...,xd,p1,...,pd)`. The interleaved form is the internal
//! canonical one; block-ordered inputs are converted on ingestion and
//! results converted back.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::mat::{norm_max, RealMatrix};

/// Quadrature ordering convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// `(x1, p1, x2, p2, ...)` — omega is a direct sum of 2x2 blocks.
    Interleaved,
    /// `(x1, ..., xd, p1, ..., pd)` — omega is the 2x2 block form.
    Block,
}

impl Ordering {
    pub fn as_str(self) -> &'static str {
        match self {
            Ordering::Interleaved => "xpxp",
            Ordering::Block => "xxpp",
        }
    }
}

impl std::str::FromStr for Ordering {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "xpxp" | "interleaved" => Ok(Ordering::Interleaved),
            "xxpp" | "block" => Ok(Ordering::Block),
            other => Err(format!("unknown ordering '{other}' (expected xpxp or xxpp)")),
        }
    }
}

impl std::fmt::Display for Ordering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The symplectic form for `d` modes in a given ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SympForm {
    pub modes: usize,
    pub ordering: Ordering,
}

impl SympForm {
    pub fn new(modes: usize, ordering: Ordering) -> Self {
        SympForm { modes, ordering }
    }

    /// Realise omega as a dense matrix.
    pub fn matrix(&self) -> RealMatrix {
        omega(self)
    }
}

/// Realise the symplectic form: antisymmetric, omega^2 = -I, det = 1.
pub fn omega(form: &SympForm) -> RealMatrix {
    let d = form.modes;
    let mut m = RealMatrix::zeros(2 * d, 2 * d);
    match form.ordering {
        Ordering::Interleaved => {
            for k in 0..d {
                m[(2 * k, 2 * k + 1)] = 1.0;
                m[(2 * k + 1, 2 * k)] = -1.0;
            }
        }
        Ordering::Block => {
            for k in 0..d {
                m[(k, d + k)] = 1.0;
                m[(d + k, k)] = -1.0;
            }
        }
    }
    m
}

/// Index map sending block coordinate `j` to its interleaved coordinate.
fn block_to_interleaved_index(j: usize, d: usize) -> usize {
    if j < d {
        2 * j
    } else {
        2 * (j - d) + 1
    }
}

/// Conjugate a matrix from one quadrature ordering to another.
pub fn permute_ordering(m: &RealMatrix, from: Ordering, to: Ordering) -> RealMatrix {
    if from == to {
        return m.clone();
    }
    let d = m.nrows() / 2;
    match (from, to) {
        (Ordering::Interleaved, Ordering::Block) => RealMatrix::from_fn(2 * d, 2 * d, |i, j| {
            m[(block_to_interleaved_index(i, d), block_to_interleaved_index(j, d))]
        }),
        (Ordering::Block, Ordering::Interleaved) => {
            let mut out = RealMatrix::zeros(2 * d, 2 * d);
            for i in 0..2 * d {
                for j in 0..2 * d {
                    out[(block_to_interleaved_index(i, d), block_to_interleaved_index(j, d))] =
                        m[(i, j)];
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

/// A real symmetric 2d x 2d matrix with a declared quadrature ordering.
///
/// Positivity is not an invariant here; it is checked only by the
/// operations that require it.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    modes: usize,
    ordering: Ordering,
    mat: RealMatrix,
}

impl CovMatrix {
    /// Validate (finite entries, symmetry within `1e-12` relative) and
    /// symmetrise exactly.
    pub fn new(mat: RealMatrix, ordering: Ordering) -> Result<Self> {
        let n = mat.nrows();
        if n != mat.ncols() {
            return Err(Error::NonSquare { rows: n, cols: mat.ncols() });
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: 2, got: n });
        }
        if mat.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = norm_max(&mat);
        let asym = norm_max(&(&mat - mat.transpose()));
        if asym > 1e-12 * scale.max(1e-300) {
            return Err(Error::NotSymmetric { asymmetry: asym, tol: 1e-12 * scale });
        }
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(CovMatrix { modes: n / 2, ordering, mat: sym })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.mat
    }

    pub fn norm_max(&self) -> f64 {
        norm_max(&self.mat)
    }

    pub fn form(&self) -> SympForm {
        SympForm::new(self.modes, self.ordering)
    }
}

/// Re-express a covariance matrix in another ordering. Round trips are
/// bit-exact (pure permutation).
pub fn convert_ordering(v: &CovMatrix, to: Ordering) -> CovMatrix {
    CovMatrix {
        modes: v.modes,
        ordering: to,
        mat: permute_ordering(&v.mat, v.ordering, to),
    }
}

/// Residual of the symplectic condition, `max |M^T omega M - omega|`, and
/// its comparison against `tol`.
pub fn is_symplectic(m: &RealMatrix, form: &SympForm, tol: f64) -> Result<(f64, bool)> {
    if m.nrows() != 2 * form.modes || m.ncols() != 2 * form.modes {
        return Err(Error::DimensionMismatch { expected: 2 * form.modes, got: m.nrows() });
    }
    let om = omega(form);
    let residual = norm_max(&(m.transpose() * &om * m - &om));
    Ok((residual, residual <= tol))
}

/// A real matrix satisfying the symplectic condition within a stated
/// tolerance (default 1e-9).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    modes: usize,
    ordering: Ordering,
    mat: RealMatrix,
    residual: f64,
}

pub const DEFAULT_SYMP_TOL: f64 = 1e-9;

impl SymplecticMatrix {
    pub fn new(mat: RealMatrix, ordering: Ordering, tol: f64) -> Result<Self> {
        let n = mat.nrows();
        if n != mat.ncols() || n == 0 || !n.is_multiple_of(2) {
            return Err(Error::NonSquare { rows: n, cols: mat.ncols() });
        }
        let modes = n / 2;
        let (residual, ok) = is_symplectic(&mat, &SympForm::new(modes, ordering), tol)?;
        if !ok {
            return Err(Error::NotSymplectic { residual, tol });
        }
        Ok(SymplecticMatrix { modes, ordering, mat, residual })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.mat
    }

    /// `max |S^T omega S - omega|` recorded at construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Re-express in another ordering (a permutation conjugation).
    pub fn convert_ordering(&self, to: Ordering) -> SymplecticMatrix {
        SymplecticMatrix {
            modes: self.modes,
            ordering: to,
            mat: permute_ordering(&self.mat, self.ordering, to),
            residual: self.residual,
        }
    }
}

/// The output of a Williamson decomposition `V = S^T D S`.
///
/// `D` is kept as the list of symplectic eigenvalues (one per mode) and
/// realised on demand, so its block structure is exact by construction.
#[derive(Debug, Clone)]
pub struct WilliamsonDecomp {
    pub s: SymplecticMatrix,
    pub lambdas: Vec<f64>,
    /// `max |S^T omega S - omega|`
    pub residual_symp: f64,
    /// `max |S^T D S - V| / max(1, max |V|)`
    pub residual_rec: f64,
}

/// Realise `D = (+) lambda_m I_2` for a lambda list in a given ordering.
pub fn d_matrix(lambdas: &[f64], ordering: Ordering) -> RealMatrix {
    let d = lambdas.len();
    let mut m = RealMatrix::zeros(2 * d, 2 * d);
    for (k, &l) in lambdas.iter().enumerate() {
        match ordering {
            Ordering::Interleaved => {
                m[(2 * k, 2 * k)] = l;
                m[(2 * k + 1, 2 * k + 1)] = l;
            }
            Ordering::Block => {
                m[(k, k)] = l;
                m[(d + k, d + k)] = l;
            }
        }
    }
    m
}

impl WilliamsonDecomp {
    pub fn d_matrix(&self) -> RealMatrix {
        d_matrix(&self.lambdas, self.s.ordering())
    }

    pub fn convert_ordering(&self, to: Ordering) -> WilliamsonDecomp {
        WilliamsonDecomp {
            s: self.s.convert_ordering(to),
            lambdas: self.lambdas.clone(),
            residual_symp: self.residual_symp,
            residual_rec: self.residual_rec,
        }
    }
}

/// `max |S^T D S - V| / max(1, max |V|)`.
pub fn reconstruction_residual(
    s: &RealMatrix,
    lambdas: &[f64],
    v: &RealMatrix,
    ordering: Ordering,
) -> f64 {
    let d = d_matrix(lambdas, ordering);
    norm_max(&(s.transpose() * d * s - v)) / norm_max(v).max(1.0)
}

/// A series of one-mode phase rotations; the exact gauge freedom of the
/// diagonalising symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeRotation {
    pub phases: Vec<f64>,
}

impl GaugeRotation {
    pub fn new(phases: Vec<f64>) -> Self {
        GaugeRotation { phases }
    }

    pub fn matrix(&self, ordering: Ordering) -> RealMatrix {
        let d = self.phases.len();
        let mut m = RealMatrix::zeros(2 * d, 2 * d);
        for (k, &phi) in self.phases.iter().enumerate() {
            let (c, s) = (phi.cos(), phi.sin());
            m[(2 * k, 2 * k)] = c;
            m[(2 * k, 2 * k + 1)] = s;
            m[(2 * k + 1, 2 * k)] = -s;
            m[(2 * k + 1, 2 * k + 1)] = c;
        }
        permute_ordering(&m, Ordering::Interleaved, ordering)
    }
}

/// Apply a gauge rotation: `S' = P S`. Preserves symplecticity and the
/// Williamson property.
pub fn gauge_apply(s: &SymplecticMatrix, p: &GaugeRotation) -> Result<SymplecticMatrix> {
    if p.phases.len() != s.modes() {
        return Err(Error::DimensionMismatch { expected: s.modes(), got: p.phases.len() });
    }
    let rotated = p.matrix(s.ordering()) * s.matrix();
    SymplecticMatrix::new(rotated, s.ordering(), (s.residual() * 4.0).max(DEFAULT_SYMP_TOL))
}

/// Mode row pair (rows `2m`, `2m+1`) of an interleaved matrix as a 2 x 2d
/// owned block.
fn mode_pair(m: &RealMatrix, mode: usize) -> RealMatrix {
    m.rows(2 * mode, 2).into_owned()
}

/// Closed-form one-mode Procrustes alignment: the rotation angle phi
/// minimising `|R(phi) A - B|_F` for 2 x n blocks A, B.
pub(crate) fn procrustes_phase(a: &RealMatrix, b: &RealMatrix) -> f64 {
    // maximise tr(R M) with M = A B^T: amplitude form in (cos, sin)
    let m = a * b.transpose();
    let alpha = m[(0, 0)] + m[(1, 1)];
    let beta = m[(1, 0)] - m[(0, 1)];
    beta.atan2(alpha)
}

fn rotate_pair(pair: &RealMatrix, phi: f64) -> RealMatrix {
    let (c, s) = (phi.cos(), phi.sin());
    let r = RealMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    r * pair
}

/// Align `source` onto `target` mode by mode: `pairing[t]` names the source
/// mode written (optimally rotated) into target slot `t`. Both matrices are
/// interleaved. Returns the aligned matrix and the phases used.
pub(crate) fn gauge_align(
    source: &RealMatrix,
    target: &RealMatrix,
    pairing: &[usize],
) -> (RealMatrix, Vec<f64>) {
    let d = pairing.len();
    let mut aligned = RealMatrix::zeros(2 * d, source.ncols());
    let mut phases = Vec::with_capacity(d);
    for (t, &src) in pairing.iter().enumerate() {
        let a = mode_pair(source, src);
        let b = mode_pair(target, t);
        let phi = procrustes_phase(&a, &b);
        let rot = rotate_pair(&a, phi);
        aligned.rows_mut(2 * t, 2).copy_from(&rot);
        phases.push(phi);
    }
    (aligned, phases)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &head) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Group mode indices whose lambdas agree within `1e-6 * max |lambda|`.
fn equal_lambda_groups(lambdas: &[f64]) -> Vec<Vec<usize>> {
    let d = lambdas.len();
    let scale = lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs())).max(1e-300);
    let tol = 1e-6 * scale;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| lambdas[b].partial_cmp(&lambdas[a]).unwrap());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match groups.last_mut() {
            Some(g) if (lambdas[*g.last().unwrap()] - lambdas[idx]).abs() <= tol => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    groups
}

/// Distance between two diagonalising symplectics modulo gauge: the minimum
/// over one-mode phase rotations and permutations of equal-lambda modes of
/// `max |P Pi S1 - S2|`.
pub fn gauge_distance(
    s1: &SymplecticMatrix,
    s2: &SymplecticMatrix,
    lambdas: &[f64],
) -> Result<f64> {
    if s1.modes() != s2.modes() {
        return Err(Error::DimensionMismatch { expected: s1.modes(), got: s2.modes() });
    }
    if lambdas.len() != s1.modes() {
        return Err(Error::LambdaMismatch {
            reason: format!("expected {} lambdas, got {}", s1.modes(), lambdas.len()),
        });
    }
    let m1 = permute_ordering(s1.matrix(), s1.ordering(), Ordering::Interleaved);
    let m2 = permute_ordering(s2.matrix(), s2.ordering(), Ordering::Interleaved);

    // Per equal-lambda group, pick the assignment of s1 modes to s2 slots
    // minimising that group's max-norm misfit; groups are independent under
    // the max norm.
    let mut worst = 0.0f64;
    for group in equal_lambda_groups(lambdas) {
        let best = if group.len() <= 7 {
            permutations(&group)
                .into_iter()
                .map(|perm| {
                    let dist = group_distance(&m1, &m2, &group, &perm);
                    (dist, perm)
                })
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                .unwrap()
        } else {
            // greedy fallback for very large degenerate groups
            let mut remaining = group.clone();
            let mut perm = Vec::with_capacity(group.len());
            for &t in &group {
                let (pos, _) = remaining
                    .iter()
                    .enumerate()
                    .map(|(pos, &src)| (pos, pair_distance(&m1, &m2, src, t)))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                perm.push(remaining.remove(pos));
            }
            let dist = group_distance(&m1, &m2, &group, &perm);
            (dist, perm)
        };
        worst = worst.max(best.0);
    }
    Ok(worst)
}

fn pair_distance(m1: &RealMatrix, m2: &RealMatrix, src: usize, tgt: usize) -> f64 {
    let a = mode_pair(m1, src);
    let b = mode_pair(m2, tgt);
    let phi = procrustes_phase(&a, &b);
    norm_max(&(rotate_pair(&a, phi) - b))
}

fn group_distance(m1: &RealMatrix, m2: &RealMatrix, slots: &[usize], perm: &[usize]) -> f64 {
    slots
        .iter()
        .zip(perm.iter())
        .map(|(&t, &src)| pair_distance(m1, m2, src, t))
        .fold(0.0, f64::max)
}

/// Deterministic random symplectic built as `exp(omega H)` for a seeded
/// random symmetric H with `|omega H|_2 <= 2`.
pub fn random_symplectic(d: usize, seed: u64) -> SymplecticMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut h = RealMatrix::zeros(2 * d, 2 * d);
    for i in 0..2 * d {
        for j in 0..=i {
            let x: f64 = rng.random_range(-0.5..0.5);
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    let om = omega(&SympForm::new(d, Ordering::Interleaved));
    let mut a = om * h;
    let spectral = a.singular_values()[0];
    if spectral > 2.0 {
        a *= 2.0 / spectral;
    }
    let s = a.exp();
    SymplecticMatrix::new(s, Ordering::Interleaved, 1e-10)
        .expect("exp(omega H) must satisfy the symplectic condition")
}

/// Build `V = S^T D S` from a lambda list and a seeded random symplectic,
/// returning the ground-truth S alongside.
pub fn random_covariance(
    d: usize,
    lambdas: &[f64],
    seed: u64,
) -> Result<(CovMatrix, SymplecticMatrix)> {
    if lambdas.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: lambdas.len() });
    }
    if let Some(&bad) = lambdas.iter().find(|l| **l == 0.0) {
        return Err(Error::InvalidLambda(bad));
    }
    let s = random_symplectic(d, seed);
    let dm = d_matrix(lambdas, Ordering::Interleaved);
    let v = s.matrix().transpose() * dm * s.matrix();
    let v = (&v + v.transpose()) * 0.5;
    Ok((CovMatrix::new(v, Ordering::Interleaved)?, s))
}
