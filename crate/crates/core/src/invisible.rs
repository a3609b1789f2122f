//! Hash-code invisible watermarking.
//!
//! The watermark's principal components are quantized to bytes, masked with
//! the identity-derived `h_id`, and the masked bytes are embedded like the
//! semi-blind payload: `S1 = S + alpha * (q(A_wa) XOR h_id)`. Side info keeps
//! the quantization range but never the identity or the mask, so the
//! watermark is only recoverable with the identity.

use crate::analysis::metrics::normalized_correlation;
use crate::error::{dim_err, Result, WatermarkError};
use crate::hash_stream::{
    dequantize, derive_mask, quantize, xor_mask, ByteMatrix, Identity, QuantParams,
};
use crate::matrix::Matrix;
use crate::semi_blind::{
    check_alpha, embed_payload, recover_components, split_watermark, PrincipalComponents,
    SchemeTag, SideInfo,
};
use crate::svd::svd;

/// Default acceptance threshold on the normalized correlation.
pub const DEFAULT_VERIFY_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Verified,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub nc_score: f64,
    pub decision: Decision,
    pub threshold: f64,
}

/// The byte payload committed to `id`, before scaling into the cover.
#[derive(Debug, Clone)]
pub struct CommittedPayload {
    pub masked: ByteMatrix,
    pub quant: QuantParams,
    pub v_w: Matrix,
}

/// Quantizes the watermark's principal components and masks them with
/// `h_id`.
pub fn commit_payload(watermark: &Matrix, id: &Identity) -> Result<CommittedPayload> {
    let (pcs, v_w) = split_watermark(watermark)?;
    let (bytes, quant) = quantize(pcs.matrix())?;
    let (rows, cols) = watermark.shape();
    let mask = derive_mask(id, rows, cols)?;
    Ok(CommittedPayload {
        masked: xor_mask(&bytes, &mask)?,
        quant,
        v_w,
    })
}

pub fn embed_invisible(
    cover: &Matrix,
    watermark: &Matrix,
    id: &Identity,
    alpha: f64,
) -> Result<(Matrix, SideInfo)> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Err(WatermarkError::InvalidParameter(
            "alpha must be positive for the hash-code scheme".into(),
        ));
    }
    if cover.shape() != watermark.shape() {
        return Err(dim_err("cover and watermark", cover.shape(), watermark.shape()));
    }
    let factors = svd(cover)?;
    let payload = commit_payload(watermark, id)?;
    let marked = embed_payload(&factors, &payload.masked.to_matrix(), alpha)?;
    let (rows, cols) = cover.shape();
    Ok((
        marked,
        SideInfo {
            scheme: SchemeTag::HashCode,
            alpha,
            rows,
            cols,
            u: factors.u,
            s: factors.s,
            v: factors.v,
            v_w: payload.v_w,
            quant: Some(payload.quant),
        },
    ))
}

/// Masked bytes as recovered from a marked image: the real-valued payload
/// rounded to the nearest integer and clamped into `[0, 255]`.
pub fn recover_masked_bytes(marked: &Matrix, info: &SideInfo) -> Result<ByteMatrix> {
    if info.scheme != SchemeTag::HashCode {
        return Err(WatermarkError::MalformedSideInfo(format!(
            "expected HashCode side info, got {}",
            info.scheme.as_str()
        )));
    }
    if info.quant.is_none() {
        return Err(WatermarkError::MalformedSideInfo(
            "HashCode side info is missing quantization parameters".into(),
        ));
    }
    let payload = recover_components(marked, info)?;
    Ok(ByteMatrix::from_rounded(payload.matrix()))
}

/// Unmasked, dequantized principal components `A*_wa`.
pub fn recover_unmasked_components(
    marked: &Matrix,
    info: &SideInfo,
    id: &Identity,
) -> Result<PrincipalComponents> {
    let masked = recover_masked_bytes(marked, info)?;
    let quant = info.quant.expect("checked by recover_masked_bytes");
    let mask = derive_mask(id, info.rows, info.cols)?;
    Ok(PrincipalComponents(dequantize(&xor_mask(&masked, &mask)?, &quant)?))
}

pub fn extract_invisible(marked: &Matrix, info: &SideInfo, id: &Identity) -> Result<Matrix> {
    recover_unmasked_components(marked, info, id)?.project(&info.v_w)
}

pub fn verify_invisible(
    marked: &Matrix,
    info: &SideInfo,
    id: &Identity,
    claimed: &Matrix,
    threshold: f64,
) -> Result<VerificationReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(WatermarkError::InvalidParameter(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let w_star = extract_invisible(marked, info, id)?;
    let nc_score = normalized_correlation(&w_star, claimed)?;
    let decision = if nc_score >= threshold {
        Decision::Verified
    } else {
        Decision::Rejected
    };
    Ok(VerificationReport {
        nc_score,
        decision,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rng::uniform_matrix;

    fn id(s: &str) -> Identity {
        Identity::new(s.as_bytes()).unwrap()
    }

    #[test]
    fn round_trip_recovers_bytes_exactly() {
        let a = uniform_matrix(24, 24, 0.0, 255.0, 21);
        let w = uniform_matrix(24, 24, 0.0, 255.0, 22);
        let key = id("alice|1");
        let (marked, info) = embed_invisible(&a, &w, &key, 0.05).unwrap();
        let committed = commit_payload(&w, &key).unwrap();
        assert_eq!(recover_masked_bytes(&marked, &info).unwrap(), committed.masked);

        let w_star = extract_invisible(&marked, &info, &key).unwrap();
        // V_w is orthogonal, so per-entry error is bounded by the Frobenius
        // norm of the component error.
        let bound = info.quant.unwrap().half_step() * (24.0f64 * 24.0).sqrt();
        assert!(w_star.max_abs_diff(&w).unwrap() <= bound);
        assert!(normalized_correlation(&w_star, &w).unwrap() >= 0.99);
    }

    #[test]
    fn argument_errors() {
        let a = uniform_matrix(6, 6, 0.0, 255.0, 1);
        let key = id("k|1");
        assert!(matches!(
            embed_invisible(&a, &a, &key, 0.0),
            Err(WatermarkError::InvalidParameter(_))
        ));
        assert!(matches!(
            embed_invisible(&a, &uniform_matrix(6, 5, 0.0, 1.0, 1), &key, 0.1),
            Err(WatermarkError::Dimension(_))
        ));
        let (marked, info) = embed_invisible(&a, &a, &key, 0.1).unwrap();
        let stripped = SideInfo {
            quant: None,
            ..info.clone()
        };
        assert!(matches!(
            extract_invisible(&marked, &stripped, &key),
            Err(WatermarkError::MalformedSideInfo(_))
        ));
        let degenerate = SideInfo {
            alpha: 0.0,
            ..info.clone()
        };
        assert!(matches!(
            extract_invisible(&marked, &degenerate, &key),
            Err(WatermarkError::DegenerateKey(_))
        ));
        assert!(matches!(
            verify_invisible(&marked, &info, &key, &a, 1.0),
            Err(WatermarkError::InvalidParameter(_))
        ));
    }

    #[test]
    fn self_verification_scores_one() {
        let a = uniform_matrix(16, 16, 0.0, 255.0, 5);
        let w = uniform_matrix(16, 16, 0.0, 255.0, 6);
        let key = id("dave|3");
        let (marked, info) = embed_invisible(&a, &w, &key, 0.1).unwrap();
        let extracted = extract_invisible(&marked, &info, &key).unwrap();
        let report = verify_invisible(&marked, &info, &key, &extracted, 0.9).unwrap();
        assert!((report.nc_score - 1.0).abs() < 1e-12);
        assert_eq!(report.decision, Decision::Verified);
        let wrong = verify_invisible(&marked, &info, &id("dave|4"), &w, 0.9).unwrap();
        assert_eq!(wrong.decision, Decision::Rejected);
    }
}
