//! Shared helpers for the integration tests. The nalgebra decomposition is
//! the independent oracle for the crate's Jacobi SVD.

#![allow(dead_code)]

use nalgebra::DMatrix;
use svdmark::Matrix;

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Singular values from nalgebra, sorted descending.
pub fn oracle_singular_values(a: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Thin SVD of a square matrix from nalgebra, columns ordered by descending
/// singular value, each U column's largest-magnitude entry made
/// non-negative and the matching V column flipped with it.
pub fn oracle_canonical_svd(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    assert_eq!(a.rows(), a.cols(), "oracle helper is for square inputs");
    let svd = to_na(a).svd(true, true);
    let u = svd.u.unwrap();
    let v = svd.v_t.unwrap().transpose();
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let n = a.rows();
    let mut uc = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    let mut vc = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    for c in 0..n {
        let mut best = 0;
        for r in 0..n {
            if uc[(r, c)].abs() > uc[(best, c)].abs() {
                best = r;
            }
        }
        if uc[(best, c)] < 0.0 {
            uc.column_mut(c).neg_mut();
            vc.column_mut(c).neg_mut();
        }
    }
    (from_na(&uc), order.iter().map(|&i| s[i]).collect(), from_na(&vc))
}

pub fn relative_reconstruction_error(a: &Matrix, f: &svdmark::SvdFactors) -> f64 {
    let back = f.reconstruct().unwrap();
    a.sub(&back).unwrap().frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE)
}

pub fn max_abs_vec_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
