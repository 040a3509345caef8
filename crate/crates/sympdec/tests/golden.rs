//! Golden fixtures with known closed-form decompositions: the two-mode
//! squeezed family, a symmetric three-mode family, and a degenerate
//! three-mode family resolved through the perturbation workflow.

use sympdec::baseline::decompose_baseline;
use sympdec::degenerate::{decompose_perturbed, PerturbPlan};
use sympdec::detdiag::{decompose_det, DetDiagOptions};
use sympdec::mat::RealMatrix;
use sympdec::symp::{gauge_distance, CovMatrix, Ordering, SymplecticMatrix};

/// V = (a I, c Z; c Z, b I) in the interleaved frame.
fn two_mode_squeezed(a: f64, b: f64, c: f64) -> CovMatrix {
    let m = RealMatrix::from_row_slice(
        4,
        4,
        &[
            a, 0.0, c, 0.0, //
            0.0, a, 0.0, -c, //
            c, 0.0, b, 0.0, //
            0.0, -c, 0.0, b,
        ],
    );
    CovMatrix::new(m, Ordering::Interleaved).unwrap()
}

/// Closed-form diagonaliser of the two-mode squeezed family, with block
/// rows ordered descending in lambda: (w+ I, w- Z; w- Z, w+ I).
fn two_mode_reference(a: f64, b: f64, c: f64) -> (Vec<f64>, SymplecticMatrix) {
    let y = (a + b) * (a + b) - 4.0 * c * c;
    let sy = y.sqrt();
    let l1 = (sy - (a - b)) / 2.0;
    let l2 = (sy + (a - b)) / 2.0;
    let wm = ((a + b - sy) / (2.0 * sy)).sqrt();
    let wp = ((a + b + sy) / (2.0 * sy)).sqrt();
    // closed form pairs (w- Z, w+ I) with l1 and (w+ I, w- Z) with l2;
    // descending order puts the l2 block row first
    let s = RealMatrix::from_row_slice(
        4,
        4,
        &[
            wp, 0.0, wm, 0.0, //
            0.0, wp, 0.0, -wm, //
            wm, 0.0, wp, 0.0, //
            0.0, -wm, 0.0, wp,
        ],
    );
    (
        vec![l2, l1],
        SymplecticMatrix::new(s, Ordering::Interleaved, 1e-12).unwrap(),
    )
}

/// V = (a I, c Z, c Z; c Z, a I, c I; c Z, c I, a I) in the interleaved frame.
fn three_mode(a: f64, c: f64) -> CovMatrix {
    let z = [1.0, -1.0];
    let mut m = RealMatrix::zeros(6, 6);
    for q in 0..2 {
        m[(q, q)] = a;
        m[(2 + q, 2 + q)] = a;
        m[(4 + q, 4 + q)] = a;
        // mode 1-2 and 1-3 couple through c Z
        m[(q, 2 + q)] = c * z[q];
        m[(2 + q, q)] = c * z[q];
        m[(q, 4 + q)] = c * z[q];
        m[(4 + q, q)] = c * z[q];
        // mode 2-3 couples through c I
        m[(2 + q, 4 + q)] = c;
        m[(4 + q, 2 + q)] = c;
    }
    CovMatrix::new(m, Ordering::Interleaved).unwrap()
}

/// Closed form for the three-mode family, block rows ordered descending in
/// lambda. The lambda expressions follow from the characteristic equation
/// (the pair lambda_{2,3}^2 = (2a^2 + 2ac - 3c^2 +- sqrt(x)/2) / 2); entry
/// denominators carry the quartic root of x.
fn three_mode_reference(a: f64, c: f64) -> (Vec<f64>, SymplecticMatrix) {
    let x = 4.0 * a * a + 4.0 * a * c - 7.0 * c * c;
    let sx = x.sqrt();
    let l1 = a - c;
    let l2 = ((2.0 * a * a + 2.0 * a * c - 3.0 * c * c + sx / 2.0) / 2.0).sqrt();
    let l3 = ((2.0 * a * a + 2.0 * a * c - 3.0 * c * c - sx / 2.0) / 2.0).sqrt();
    let (yp, ym) = (c + sx, c - sx);
    let e21 = 2.0 * c * l2.sqrt() / (sx * (a * yp + 2.0 * l2 * l2)).sqrt();
    let e22 = (a * yp + 2.0 * l2 * l2).sqrt() / (2.0 * (l2 * sx).sqrt());
    let e31 = (2.0 * a + yp).sqrt() / (2.0 * sx).sqrt();
    let e32 = (2.0 * a + ym).sqrt() / (2.0 * x.powf(0.25));
    assert!(l2 > l3 && l3 > l1, "reference assumes lambda order (l2, l3, l1)");
    let z = [1.0f64, -1.0];
    let mut s = RealMatrix::zeros(6, 6);
    for q in 0..2 {
        // lambda_2 block row: (e21 Z, e22 I, e22 I)
        s[(q, q)] = e21 * z[q];
        s[(q, 2 + q)] = e22;
        s[(q, 4 + q)] = e22;
        // lambda_3 block row: (e31 I, e32 Z, e32 Z)
        s[(2 + q, q)] = e31;
        s[(2 + q, 2 + q)] = e32 * z[q];
        s[(2 + q, 4 + q)] = e32 * z[q];
        // lambda_1 block row: (0, I/sqrt2, -I/sqrt2)
        s[(4 + q, 2 + q)] = 1.0 / 2.0f64.sqrt();
        s[(4 + q, 4 + q)] = -1.0 / 2.0f64.sqrt();
    }
    (
        vec![l2, l3, l1],
        SymplecticMatrix::new(s, Ordering::Interleaved, 1e-12).unwrap(),
    )
}

/// V with a I on the diagonal and a/2 I between all mode pairs.
fn degenerate_three_mode(a: f64) -> CovMatrix {
    let mut m = RealMatrix::zeros(6, 6);
    for bi in 0..3 {
        for bj in 0..3 {
            let val = if bi == bj { a } else { a / 2.0 };
            m[(2 * bi, 2 * bj)] = val;
            m[(2 * bi + 1, 2 * bj + 1)] = val;
        }
    }
    CovMatrix::new(m, Ordering::Interleaved).unwrap()
}

/// The exact limit of the perturbed diagonaliser for the degenerate family,
/// block rows reordered to the descending lambda labels (2a, a/2, a/2).
fn degenerate_reference() -> (Vec<f64>, SymplecticMatrix) {
    let r2 = 2.0f64.sqrt();
    let r3 = 3.0f64.sqrt();
    let r6 = 6.0f64.sqrt();
    let mut s = RealMatrix::zeros(6, 6);
    for q in 0..2 {
        // lambda = 2a row block: (I/sqrt3, I/sqrt3, I/sqrt3)
        s[(q, q)] = 1.0 / r3;
        s[(q, 2 + q)] = 1.0 / r3;
        s[(q, 4 + q)] = 1.0 / r3;
        // lambda = a/2 row blocks: (0, I/sqrt2, -I/sqrt2) and
        // (-sqrt(2/3) I, I/sqrt6, I/sqrt6)
        s[(2 + q, 2 + q)] = 1.0 / r2;
        s[(2 + q, 4 + q)] = -1.0 / r2;
        s[(4 + q, q)] = -(2.0f64 / 3.0).sqrt();
        s[(4 + q, 2 + q)] = 1.0 / r6;
        s[(4 + q, 4 + q)] = 1.0 / r6;
    }
    (
        vec![2.0, 0.5, 0.5],
        SymplecticMatrix::new(s, Ordering::Interleaved, 1e-12).unwrap(),
    )
}

#[test]
fn two_mode_squeezed_closed_form() {
    let (a, b, c) = (3.0, 2.0, 2.0);
    let v = two_mode_squeezed(a, b, c);
    let (lams, reference) = two_mode_reference(a, b, c);
    assert!((lams[0] - 2.0).abs() < 1e-15 && (lams[1] - 1.0).abs() < 1e-15);

    let w = decompose_det(&v, &DetDiagOptions::default()).unwrap();
    assert!((w.lambdas[0] - 2.0).abs() <= 1e-12);
    assert!((w.lambdas[1] - 1.0).abs() <= 1e-12);
    let dist = gauge_distance(&w.s, &reference, &w.lambdas).unwrap();
    assert!(dist <= 1e-9, "distance {dist}");

    let wb = decompose_baseline(&v).unwrap();
    let dist_b = gauge_distance(&wb.s, &reference, &wb.lambdas).unwrap();
    assert!(dist_b <= 1e-9, "baseline distance {dist_b}");
}

#[test]
fn two_mode_kernel_eigenvalue_magnitudes() {
    // |eigenvalues of V^{1/2} omega V^{1/2}| are the symplectic eigenvalues
    let v = two_mode_squeezed(3.0, 2.0, 2.0);
    let work = sympdec::baseline::baseline_work(&v).unwrap();
    assert!((work.pairs[0].0 - 2.0).abs() < 1e-12);
    assert!((work.pairs[1].0 - 1.0).abs() < 1e-12);
}

#[test]
fn two_mode_squeezed_degenerate_limit_still_correct() {
    // at a = b the two lambdas coincide, yet the closed form remains a valid
    // diagonaliser; the pipeline must still certify through perturbation
    let (a, b, c) = (2.5, 2.5, 1.0);
    let v = two_mode_squeezed(a, b, c);
    let (lams, reference) = two_mode_reference(a, b, c);
    assert!((lams[0] - lams[1]).abs() < 1e-12);
    let res = sympdec::symp::reconstruction_residual(
        reference.matrix(),
        &lams,
        v.matrix(),
        Ordering::Interleaved,
    );
    assert!(res <= 1e-12, "closed form stays exact at the degenerate point");

    let w = decompose_det(&v, &DetDiagOptions::default()).unwrap();
    assert!(w.residual_symp <= 1e-6 && w.residual_rec <= 1e-6);
}

#[test]
fn three_mode_closed_form() {
    let (a, c) = (2.0, 0.5);
    let v = three_mode(a, c);
    let (lams, reference) = three_mode_reference(a, c);
    let res = sympdec::symp::reconstruction_residual(
        reference.matrix(),
        &lams,
        v.matrix(),
        Ordering::Interleaved,
    );
    assert!(res <= 1e-12, "closed-form reference must diagonalise V, got {res}");

    let w = decompose_det(&v, &DetDiagOptions::default()).unwrap();
    for (x, y) in w.lambdas.iter().zip(lams.iter()) {
        assert!((x - y).abs() <= 1e-10 * y);
    }
    let dist = gauge_distance(&w.s, &reference, &w.lambdas).unwrap();
    assert!(dist <= 1e-8, "distance {dist}");
}

#[test]
fn three_mode_fixed_kbar_must_advance_past_structural_zeros() {
    // the lambda_1 mode's s-vector vanishes on its first two entries, so the
    // shared-pivot policy starting at k = 0 has to walk past two structural
    // zeros before it finds an admissible pivot row
    let v = three_mode(2.0, 0.5);
    let fixed = decompose_det(
        &v,
        &DetDiagOptions { kbar: sympdec::KbarPolicy::Fixed(0), ..Default::default() },
    )
    .unwrap();
    let per_mode = decompose_det(&v, &DetDiagOptions::default()).unwrap();
    assert!(fixed.residual_symp <= 1e-8 && fixed.residual_rec <= 1e-8);
    let dist = gauge_distance(&fixed.s, &per_mode.s, &per_mode.lambdas).unwrap();
    assert!(dist <= 1e-8, "distance {dist}");
}

#[test]
fn degenerate_three_mode_perturbed_limit() {
    let v = degenerate_three_mode(1.0);
    let (lams, reference) = degenerate_reference();

    // a top-mode block direction that splits the degenerate pair
    let mut delta = RealMatrix::zeros(6, 6);
    delta[(0, 0)] = 1.0;
    delta[(1, 1)] = 1.0;
    let plan = PerturbPlan::new(delta, vec![1e-6]).unwrap();
    let out = decompose_perturbed(&v, &plan, &DetDiagOptions::default()).unwrap();
    assert!((out.epsilon - 1e-6).abs() < 1e-18);

    let w = out.decomp;
    assert!((w.lambdas[0] - 2.0).abs() <= 1e-9);
    assert!((w.lambdas[1] - 0.5).abs() <= 1e-9);
    assert!((w.lambdas[2] - 0.5).abs() <= 1e-9);
    let dist = gauge_distance(&w.s, &reference, &lams).unwrap();
    assert!(dist <= 1e-5, "distance {dist}");

    // certification is against the unperturbed matrix
    let rec = sympdec::symp::reconstruction_residual(
        w.s.matrix(),
        &w.lambdas,
        v.matrix(),
        Ordering::Interleaved,
    );
    assert!(rec <= 1e-6);
}
