//! Monte-Carlo oracle for wrong-identity extraction.
//!
//! A wrong identity leaves the payload XORed with `h_id ^ h_id'`, which is
//! indistinguishable from uniform bytes. This run replaces the hash with
//! plain uniform bytes from an unrelated generator, dequantizes with the
//! watermark's own range, projects with nalgebra, and reports the spread of
//! NC(W', W) over 100 trials. The band asserted by the acceptance suite is
//! taken from this output.
//!
//! Run with `cargo run --release --example oracle_wrong_id_band`.

use nalgebra::DMatrix;
use svdmark::analysis::normalized_correlation;
use svdmark::analysis::synthetic::texture;
use svdmark::Matrix;

const SIZE: usize = 256;
const TRIALS: usize = 100;

// splitmix64, deliberately not the crate's generator
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn main() {
    let w = texture(SIZE, SIZE, 2);
    let na = DMatrix::from_row_slice(SIZE, SIZE, w.as_slice());
    let svd = na.svd(true, true);
    let mut u = svd.u.unwrap();
    let mut v = svd.v_t.unwrap().transpose();
    // The constant part of the payload projects onto the sum of V_w's
    // columns, so the score depends on the sign convention: match the
    // crate's (largest |entry| of each U column non-negative). nalgebra
    // already returns singular values in descending order.
    for c in 0..SIZE {
        let best = (0..SIZE).fold(0, |b, r| if u[(r, c)].abs() > u[(b, c)].abs() { r } else { b });
        if u[(best, c)] < 0.0 {
            u.column_mut(c).neg_mut();
            v.column_mut(c).neg_mut();
        }
    }
    let vt = v.transpose();
    let a_wa = &u * DMatrix::from_diagonal(&svd.singular_values);
    let (lo, hi) = (a_wa.min(), a_wa.max());

    let mut state = 0x5eed_u64;
    let mut scores = Vec::with_capacity(TRIALS);
    for _ in 0..TRIALS {
        let bytes = DMatrix::from_fn(SIZE, SIZE, |_, _| (splitmix(&mut state) & 0xff) as f64);
        let a = bytes.map(|b| lo + (hi - lo) * b / 255.0);
        let w_prime = &a * &vt;
        let m = Matrix::from_fn(SIZE, SIZE, |r, c| w_prime[(r, c)]);
        scores.push(normalized_correlation(&m, &w).unwrap());
    }
    let mean = scores.iter().sum::<f64>() / TRIALS as f64;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (TRIALS - 1) as f64;
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("mean = {mean:.6}  std = {:.6}", var.sqrt());
    println!("min  = {min:.6}  max = {max:.6}");
}
