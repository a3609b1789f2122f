//! Brute-force oracle for the reference-image negative test.
//!
//! Decomposes the synthetic portrait/texture pair and 20 seeded silhouette
//! references with nalgebra's SVD (not the crate's solver), applies the
//! canonical sign convention, and reports NC(P*, P) for every reference
//! next to NC(W*, W). The smallest gap is the margin frozen in the
//! acceptance suite.
//!
//! Run with `cargo run --release --example oracle_reference_margin`.

use nalgebra::DMatrix;
use svdmark::analysis::normalized_correlation;
use svdmark::analysis::synthetic::{portrait, silhouette, texture};
use svdmark::Matrix;

const SIZE: usize = 256;
const ALPHA: f64 = 0.1;

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn from_na(m: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Square SVD with singular values descending and each U column's
/// largest-magnitude entry made non-negative (V flipped to match).
fn canonical_svd(a: &Matrix) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = to_na(a).svd(true, true);
    let mut u = svd.u.unwrap();
    let mut v = svd.v_t.unwrap().transpose();
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v_sorted = DMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
    u = u_sorted;
    v = v_sorted;
    let sigma: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    for c in 0..u.ncols() {
        let mut best = 0;
        for r in 0..u.nrows() {
            if u[(r, c)].abs() > u[(best, c)].abs() {
                best = r;
            }
        }
        if u[(best, c)] < 0.0 {
            u.column_mut(c).neg_mut();
            v.column_mut(c).neg_mut();
        }
    }
    (u, sigma, v)
}

fn main() {
    let cover = portrait(SIZE, SIZE, 1);
    let watermark = texture(SIZE, SIZE, 2);

    let (u, s, v) = canonical_svd(&cover);
    let (uw, sw, vw) = canonical_svd(&watermark);
    let a_wa = &uw * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sw));
    let s1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.clone())) + &a_wa * ALPHA;
    let marked = &u * &s1 * v.transpose();

    // detector side
    let cover_hat = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s)) * v.transpose();
    let a_wa_star = u.transpose() * (marked - cover_hat) * &v / ALPHA;
    let w_star = &a_wa_star * vw.transpose();
    let nc_w = normalized_correlation(&from_na(&w_star), &watermark).unwrap();
    println!("nc(W*, W) = {nc_w:.12}");

    let mut worst_gap = f64::INFINITY;
    let mut sum = 0.0;
    for seed in 0..20u64 {
        let p = silhouette(SIZE, SIZE, 100 + seed);
        let (_, _, vp) = canonical_svd(&p);
        let p_star = &a_wa_star * vp.transpose();
        let nc_p = normalized_correlation(&from_na(&p_star), &p).unwrap();
        sum += nc_p;
        worst_gap = worst_gap.min(nc_w - nc_p);
        println!("seed {:>3}: nc(P*, P) = {nc_p:.6}  gap = {:.6}", 100 + seed, nc_w - nc_p);
    }
    println!("mean nc(P*, P) = {:.6}", sum / 20.0);
    println!("min gap        = {worst_gap:.6}");
}
