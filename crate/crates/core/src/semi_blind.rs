//! Semi-blind SVD watermarking.
//!
//! The cover `A = U S V^T` carries the watermark's principal components
//! `A_wa = U_w S_w` added onto its singular value matrix:
//! `A_w = U (S + alpha * A_wa) V^T`. The detector holds [`SideInfo`] (the
//! embed-time `U`, `S`, `V`, the watermark's `V_w` and `alpha`) and recovers
//! `A*_wa = U^T (A*_w - U S V^T) V / alpha`, then `W* = A*_wa V_w^T`.

use crate::error::{dim_err, Result, WatermarkError};
use crate::hash_stream::QuantParams;
use crate::matrix::Matrix;
use crate::svd::{orthogonality_residual, svd, SvdFactors};

/// Default embedding strength.
pub const DEFAULT_ALPHA: f64 = 0.1;

/// Orthogonality tolerance for stored factors.
pub const FACTOR_ORTHO_TOL: f64 = 1e-8;

/// `U_w * S_w` of a watermark (or its estimate at the detector).
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponents(pub Matrix);

impl PrincipalComponents {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// `A_wa * V^T`.
    pub fn project(&self, v: &Matrix) -> Result<Matrix> {
        self.0.matmul_transpose(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeTag {
    SemiBlind,
    HashCode,
}

impl SchemeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeTag::SemiBlind => "SemiBlind",
            SchemeTag::HashCode => "HashCode",
        }
    }
}

/// Detector key material.
#[derive(Debug, Clone, PartialEq)]
pub struct SideInfo {
    pub scheme: SchemeTag,
    pub alpha: f64,
    pub rows: usize,
    pub cols: usize,
    /// Cover left singular vectors, `rows x rows`.
    pub u: Matrix,
    /// Cover singular value matrix, `rows x cols`.
    pub s: Matrix,
    /// Cover right singular vectors, `cols x cols`.
    pub v: Matrix,
    /// Watermark right singular vectors, `cols x cols`.
    pub v_w: Matrix,
    /// Quantization of `A_wa`; present only for [`SchemeTag::HashCode`].
    pub quant: Option<QuantParams>,
}

impl SideInfo {
    /// Shape, parameter and scheme consistency. Does not check orthogonality;
    /// see [`SideInfo::check_orthogonality`].
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(WatermarkError::InvalidParameter(format!(
                "alpha must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        let (m, n) = (self.rows, self.cols);
        let expect = [
            ("u", &self.u, (m, m)),
            ("s", &self.s, (m, n)),
            ("v", &self.v, (n, n)),
            ("v_w", &self.v_w, (n, n)),
        ];
        for (name, mat, shape) in expect {
            if mat.shape() != shape {
                return Err(WatermarkError::MalformedSideInfo(format!(
                    "{name} is {}x{}, expected {}x{}",
                    mat.rows(),
                    mat.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        match (self.scheme, &self.quant) {
            (SchemeTag::HashCode, None) => Err(WatermarkError::MalformedSideInfo(
                "HashCode side info is missing quantization parameters".into(),
            )),
            (SchemeTag::SemiBlind, Some(_)) => Err(WatermarkError::MalformedSideInfo(
                "SemiBlind side info must not carry quantization parameters".into(),
            )),
            (_, Some(q)) => q.validate(),
            _ => Ok(()),
        }
    }

    pub fn check_orthogonality(&self) -> Result<()> {
        for (name, mat) in [("u", &self.u), ("v", &self.v), ("v_w", &self.v_w)] {
            let res = orthogonality_residual(mat)?;
            if res.is_nan() || res > FACTOR_ORTHO_TOL {
                return Err(WatermarkError::MalformedSideInfo(format!(
                    "{name} is not orthogonal (residual {res:e})"
                )));
            }
        }
        Ok(())
    }

    /// The cover as seen by the detector, `U S V^T`.
    pub fn cover(&self) -> Result<Matrix> {
        self.u.matmul(&self.s)?.matmul_transpose(&self.v)
    }
}

/// Splits `W` into principal components `U_w S_w` and `V_w`.
pub fn split_watermark(w: &Matrix) -> Result<(PrincipalComponents, Matrix)> {
    let SvdFactors { u, s, v } = svd(w)?;
    Ok((PrincipalComponents(u.matmul(&s)?), v))
}

/// Embeds `watermark` into `cover` with strength `alpha`.
///
/// `alpha = 0` is accepted and yields the cover itself; the resulting side
/// info cannot be used for extraction.
pub fn embed(cover: &Matrix, watermark: &Matrix, alpha: f64) -> Result<(Matrix, SideInfo)> {
    check_alpha(alpha)?;
    if cover.shape() != watermark.shape() {
        return Err(dim_err("cover and watermark", cover.shape(), watermark.shape()));
    }
    let factors = svd(cover)?;
    let (pcs, v_w) = split_watermark(watermark)?;
    let marked = embed_payload(&factors, pcs.matrix(), alpha)?;
    let (rows, cols) = cover.shape();
    let info = SideInfo {
        scheme: SchemeTag::SemiBlind,
        alpha,
        rows,
        cols,
        u: factors.u,
        s: factors.s,
        v: factors.v,
        v_w,
        quant: None,
    };
    Ok((marked, info))
}

/// `U (S + alpha * payload) V^T`.
pub(crate) fn embed_payload(factors: &SvdFactors, payload: &Matrix, alpha: f64) -> Result<Matrix> {
    let s1 = factors.s.add(&payload.scale(alpha))?;
    factors.u.matmul(&s1)?.matmul_transpose(&factors.v)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(WatermarkError::InvalidParameter(format!(
            "alpha must be finite and non-negative, got {alpha}"
        )));
    }
    Ok(())
}

/// Recovers the embedded payload `U^T (marked - U S V^T) V / alpha`.
///
/// Works for both schemes: for the hash-code scheme the result is the masked
/// byte matrix in real form.
pub fn recover_components(marked: &Matrix, info: &SideInfo) -> Result<PrincipalComponents> {
    info.validate()?;
    if info.alpha == 0.0 {
        return Err(WatermarkError::DegenerateKey("side info has alpha = 0".into()));
    }
    if marked.shape() != (info.rows, info.cols) {
        return Err(dim_err("marked image vs side info", marked.shape(), (info.rows, info.cols)));
    }
    let a1 = marked.sub(&info.cover()?)?;
    let core = info.u.transpose_matmul(&a1)?.matmul(&info.v)?;
    Ok(PrincipalComponents(core.scale(1.0 / info.alpha)))
}

/// Extracts `W*` from a (possibly distorted) marked image.
pub fn extract(marked: &Matrix, info: &SideInfo) -> Result<Matrix> {
    if info.scheme != SchemeTag::SemiBlind {
        return Err(WatermarkError::MalformedSideInfo(format!(
            "expected SemiBlind side info, got {}",
            info.scheme.as_str()
        )));
    }
    recover_components(marked, info)?.project(&info.v_w)
}

/// Projects recovered principal components onto a reference image's right
/// singular vectors: `P* = A*_wa V_ref^T`.
pub fn detect_reference(a_wa_star: &PrincipalComponents, v_ref: &Matrix) -> Result<Matrix> {
    let pcs = a_wa_star.matrix();
    if v_ref.rows() != v_ref.cols() || v_ref.cols() != pcs.cols() {
        return Err(dim_err("principal components vs reference basis", pcs.shape(), v_ref.shape()));
    }
    let res = orthogonality_residual(v_ref)?;
    if res.is_nan() || res > 1e-6 {
        return Err(WatermarkError::InvalidParameter(format!(
            "reference basis is not orthogonal (residual {res:e})"
        )));
    }
    a_wa_star.project(v_ref)
}

/// Right singular vectors of a reference image, as used by
/// [`detect_reference`].
pub fn reference_basis(reference: &Matrix) -> Result<Matrix> {
    Ok(svd(reference)?.v)
}
