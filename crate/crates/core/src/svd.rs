//! Full singular value decomposition with a canonical sign convention.
//!
//! The factorization uses one-sided (Hestenes) Jacobi rotations on the
//! columns of the taller orientation of the input. Rotations are applied in
//! a fixed cyclic order on a single thread, so identical input bits always
//! produce identical output bits. Missing left singular vectors (rank
//! deficiency, or `M > N`) are completed by Gram-Schmidt against the
//! standard basis in index order.
//!
//! Canonical form:
//! * singular values on the diagonal of `S`, non-negative and non-increasing
//!   (equal values keep their column order from the rotation phase);
//! * in every column of `U` the entry of largest magnitude is non-negative,
//!   ties going to the lowest row index; the matching column of `V` is
//!   flipped with it.

use crate::error::{dim_err, Result, WatermarkError};
use crate::matrix::{dot, Matrix};

const MAX_SWEEPS: usize = 80;

/// `A = U * S * V^T` with `U` (M x M) and `V` (N x N) orthogonal and `S`
/// (M x N) diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    pub u: Matrix,
    pub s: Matrix,
    pub v: Matrix,
}

impl SvdFactors {
    pub fn singular_values(&self) -> Vec<f64> {
        self.s.diagonal()
    }

    pub fn reconstruct(&self) -> Result<Matrix> {
        reconstruct(self)
    }
}

/// Computes the full SVD of `a` in canonical form.
pub fn svd(a: &Matrix) -> Result<SvdFactors> {
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(WatermarkError::InvalidInput(
            "svd input contains non-finite entries".into(),
        ));
    }
    let (m, n) = a.shape();
    let (mut u, sigma, mut v) = if m >= n {
        jacobi_tall(a)
    } else {
        // A^T = U' S' V'^T  =>  A = V' S'^T U'^T
        let (u_t, sigma, v_t) = jacobi_tall(&a.transpose());
        (v_t, sigma, u_t)
    };
    canonicalize_signs(&mut u, &mut v);
    Ok(SvdFactors {
        u,
        s: Matrix::from_diagonal(m, n, &sigma),
        v,
    })
}

/// `U * S * V^T`.
pub fn reconstruct(f: &SvdFactors) -> Result<Matrix> {
    let (ur, uc) = f.u.shape();
    let (sr, sc) = f.s.shape();
    let (vr, vc) = f.v.shape();
    if uc != sr || sc != vc {
        return Err(WatermarkError::Dimension(format!(
            "factors not conformable: U {ur}x{uc}, S {sr}x{sc}, V {vr}x{vc}"
        )));
    }
    f.u.matmul(&f.s)?.matmul_transpose(&f.v)
}

/// `||M^T M - I||_F` for a square `M`.
pub fn orthogonality_residual(m: &Matrix) -> Result<f64> {
    if m.rows() != m.cols() {
        return Err(dim_err("orthogonality residual needs a square matrix", m.shape(), m.shape()));
    }
    let gram = m.transpose_matmul(m)?;
    let n = m.cols();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = gram[(i, j)] - if i == j { 1.0 } else { 0.0 };
            acc += d * d;
        }
    }
    Ok(acc.sqrt())
}

/// One-sided Jacobi for `m >= n`. Returns `(U m x m, sigma[n], V n x n)`.
fn jacobi_tall(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let (m, n) = a.shape();
    debug_assert!(m >= n);

    // Column-major working copies so each rotation touches contiguous memory.
    let mut g: Vec<f64> = (0..n).flat_map(|c| a.column(c)).collect();
    let mut vw: Vec<f64> = vec![0.0; n * n];
    for j in 0..n {
        vw[j * n + j] = 1.0;
    }

    let tol = f64::EPSILON * m as f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (gp, gq) = column_pair(&mut g, m, p, q);
                let (alpha, beta, gamma) = fused_dots(gp, gq);
                if gamma == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1.0f64.hypot(zeta));
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                if s == 0.0 {
                    continue;
                }
                rotated = true;
                rotate(gp, gq, c, s);
                let (vp, vq) = column_pair(&mut vw, n, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| {
            let col = &g[j * m..(j + 1) * m];
            dot(col, col).sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep rotation-phase order
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let rank_tol = sigma_max * m.max(n) as f64 * f64::EPSILON;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut slots: Vec<Option<Vec<f64>>> = Vec::with_capacity(m);
    for (k, &j) in order.iter().enumerate() {
        if sigma[k] > rank_tol {
            let col: Vec<f64> = g[j * m..(j + 1) * m].iter().map(|x| x / sigma[k]).collect();
            basis.push(col.clone());
            slots.push(Some(col));
        } else {
            slots.push(None);
        }
    }
    slots.resize(m, None);
    complete_basis(&mut basis, &mut slots, m);

    let mut u = Matrix::zeros(m, m);
    for (c, col) in slots.into_iter().enumerate() {
        let col = col.expect("basis completion fills every slot");
        for (r, x) in col.into_iter().enumerate() {
            u[(r, c)] = x;
        }
    }
    let mut v = Matrix::zeros(n, n);
    for (c, &j) in order.iter().enumerate() {
        for r in 0..n {
            v[(r, c)] = vw[j * n + r];
        }
    }
    (u, sigma, v)
}

/// Fills empty slots with unit vectors orthogonal to `basis`, drawn from the
/// standard basis in index order.
fn complete_basis(basis: &mut Vec<Vec<f64>>, slots: &mut [Option<Vec<f64>>], m: usize) {
    let mut empty = slots.iter().filter(|s| s.is_none()).count();
    if empty == 0 {
        return;
    }
    // Any e_k whose residual stays below this after the scan would force the
    // residual energy sum below 1, so the scan always finds enough vectors.
    let accept = 0.5 / (m as f64).sqrt();
    for k in 0..m {
        if empty == 0 {
            break;
        }
        let mut cand = vec![0.0; m];
        cand[k] = 1.0;
        for _ in 0..2 {
            for b in basis.iter() {
                let d = dot(&cand, b);
                for (x, y) in cand.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let norm = dot(&cand, &cand).sqrt();
        if norm <= accept {
            continue;
        }
        for x in cand.iter_mut() {
            *x /= norm;
        }
        let slot = slots
            .iter_mut()
            .find(|s| s.is_none())
            .expect("empty slot count tracked");
        *slot = Some(cand.clone());
        basis.push(cand);
        empty -= 1;
    }
}

fn canonicalize_signs(u: &mut Matrix, v: &mut Matrix) {
    let (m, n) = (u.rows(), v.rows());
    for c in 0..m {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for r in 0..m {
            let a = u[(r, c)].abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if u[(best, c)] < 0.0 {
            for r in 0..m {
                u[(r, c)] = -u[(r, c)];
            }
            if c < n {
                for r in 0..n {
                    v[(r, c)] = -v[(r, c)];
                }
            }
        }
    }
}

fn column_pair(buf: &mut [f64], len: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = buf.split_at_mut(q * len);
    (&mut head[p * len..(p + 1) * len], &mut tail[..len])
}

#[inline]
fn fused_dots(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        xx += a * a;
        yy += b * b;
        xy += a * b;
    }
    (xx, yy, xy)
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: &Matrix, b: &Matrix) -> f64 {
        a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn diagonal_input_is_its_own_decomposition() {
        let a = Matrix::from_rows(&[&[3.0, 0.0], &[0.0, 2.0]]).unwrap();
        let f = svd(&a).unwrap();
        assert_eq!(f.singular_values(), vec![3.0, 2.0]);
        assert_eq!(f.u, Matrix::identity(2));
        assert_eq!(f.v, Matrix::identity(2));
    }

    #[test]
    fn permuted_diagonal() {
        let a = Matrix::from_rows(&[&[0.0, 2.0], &[1.0, 0.0]]).unwrap();
        let f = svd(&a).unwrap();
        assert_eq!(f.singular_values(), vec![2.0, 1.0]);
        assert!(rel_err(&f.reconstruct().unwrap(), &a) <= 1e-15);
    }

    #[test]
    fn reconstruct_known_factors() {
        let f = SvdFactors {
            u: Matrix::identity(2),
            s: Matrix::from_diagonal(2, 2, &[3.0, 2.0]),
            v: Matrix::identity(2),
        };
        assert_eq!(
            reconstruct(&f).unwrap(),
            Matrix::from_rows(&[&[3.0, 0.0], &[0.0, 2.0]]).unwrap()
        );
        let bad = SvdFactors {
            s: Matrix::zeros(3, 2),
            ..f
        };
        assert!(matches!(reconstruct(&bad), Err(WatermarkError::Dimension(_))));
    }

    #[test]
    fn orthogonality_residual_examples() {
        assert_eq!(orthogonality_residual(&Matrix::identity(3)).unwrap(), 0.0);
        let p = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(orthogonality_residual(&p).unwrap(), 0.0);
        let shear = Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!((orthogonality_residual(&shear).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            orthogonality_residual(&Matrix::zeros(2, 3)),
            Err(WatermarkError::Dimension(_))
        ));
    }

    #[test]
    fn rectangular_and_rank_deficient_shapes() {
        let shapes = [(5, 3), (3, 5), (1, 4), (4, 1), (6, 6)];
        for (k, &(m, n)) in shapes.iter().enumerate() {
            let a = Matrix::from_fn(m, n, |r, c| ((r * 7 + c * 3 + k) % 5) as f64 - 2.0);
            let f = svd(&a).unwrap();
            assert_eq!(f.u.shape(), (m, m));
            assert_eq!(f.s.shape(), (m, n));
            assert_eq!(f.v.shape(), (n, n));
            assert!(rel_err(&f.reconstruct().unwrap(), &a) <= 1e-12, "{m}x{n}");
            assert!(orthogonality_residual(&f.u).unwrap() <= 1e-12);
            assert!(orthogonality_residual(&f.v).unwrap() <= 1e-12);
            let sv = f.singular_values();
            assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        }

        let constant = Matrix::from_fn(8, 8, |_, _| 3.0);
        let f = svd(&constant).unwrap();
        assert!((f.singular_values()[0] - 24.0).abs() < 1e-12);
        assert!(orthogonality_residual(&f.u).unwrap() <= 1e-12);
        assert!(rel_err(&f.reconstruct().unwrap(), &constant) <= 1e-14);

        let zero = Matrix::zeros(3, 2);
        let f = svd(&zero).unwrap();
        assert_eq!(f.singular_values(), vec![0.0, 0.0]);
        assert_eq!(f.u, Matrix::identity(3));
    }

    #[test]
    fn sign_convention_holds() {
        let a = Matrix::from_fn(7, 5, |r, c| ((r * 13 + c * 29) % 11) as f64 - 5.0);
        let f = svd(&a).unwrap();
        for c in 0..7 {
            let col = f.u.column(c);
            let mut best = 0;
            for (r, x) in col.iter().enumerate() {
                if x.abs() > col[best].abs() {
                    best = r;
                }
            }
            assert!(col[best] >= 0.0);
        }
    }
}
