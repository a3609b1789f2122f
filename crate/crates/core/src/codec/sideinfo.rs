//! JSON key files.
//!
//! A single record looks like
//!
//! ```json
//! {
//!   "version": 1,
//!   "scheme_tag": "SemiBlind",
//!   "alpha": 0.1,
//!   "rows": 256, "cols": 256,
//!   "u": "<base64>", "s_layout": "diag", "s_diag_or_full": "<base64>",
//!   "v": "<base64>", "v_w": "<base64>",
//!   "quant": { "lo": -12.5, "hi": 2040.0, "degenerate": false }
//! }
//! ```
//!
//! Arrays are the raw little-endian bytes of row-major `f64` values, so a
//! save/load cycle is bit-exact. `s_layout` is `"diag"` (the `min(rows,
//! cols)` diagonal) or `"full"` (all `rows * cols` entries). `quant` appears
//! only for the hash-code scheme. A color bundle wraps records as
//! `{"version": 1, "strategy": "luminance", "records": [...]}`.

use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::write_atomic;
use crate::color::{ChannelStrategy, SideInfoBundle};
use crate::error::{Result, WatermarkError};
use crate::hash_stream::QuantParams;
use crate::matrix::Matrix;
use crate::semi_blind::{SchemeTag, SideInfo};

pub const SIDEINFO_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct QuantDoc {
    lo: f64,
    hi: f64,
    degenerate: bool,
}

#[derive(Serialize, Deserialize)]
struct SideInfoDoc {
    version: u64,
    scheme_tag: String,
    alpha: f64,
    rows: usize,
    cols: usize,
    u: String,
    s_layout: String,
    s_diag_or_full: String,
    v: String,
    v_w: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quant: Option<QuantDoc>,
}

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    version: u64,
    strategy: String,
    records: Vec<Value>,
}

/// Contents of a key file: a mono-channel record or a color bundle.
#[derive(Debug, Clone, PartialEq)]
pub enum KeyFile {
    Single(SideInfo),
    Bundle(SideInfoBundle),
}

fn encode_f64s(xs: &[f64]) -> String {
    let bytes: Vec<u8> = xs.iter().flat_map(|x| x.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn decode_f64s(field: &str, s: &str, expected: usize) -> Result<Vec<f64>> {
    let bytes = STANDARD
        .decode(s)
        .map_err(|e| WatermarkError::Codec(format!("field {field}: bad base64: {e}")))?;
    if bytes.len() != expected * 8 {
        return Err(WatermarkError::MalformedSideInfo(format!(
            "field {field}: {} bytes, expected {}",
            bytes.len(),
            expected * 8
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn is_diagonal(m: &Matrix) -> bool {
    (0..m.rows()).all(|r| (0..m.cols()).all(|c| r == c || m[(r, c)].to_bits() == 0))
}

fn to_doc(info: &SideInfo) -> SideInfoDoc {
    let diag = info.scheme == SchemeTag::SemiBlind && is_diagonal(&info.s);
    let (s_layout, s_data) = if diag {
        ("diag", encode_f64s(&info.s.diagonal()))
    } else {
        ("full", encode_f64s(info.s.as_slice()))
    };
    SideInfoDoc {
        version: SIDEINFO_VERSION,
        scheme_tag: info.scheme.as_str().to_string(),
        alpha: info.alpha,
        rows: info.rows,
        cols: info.cols,
        u: encode_f64s(info.u.as_slice()),
        s_layout: s_layout.to_string(),
        s_diag_or_full: s_data,
        v: encode_f64s(info.v.as_slice()),
        v_w: encode_f64s(info.v_w.as_slice()),
        quant: info.quant.map(|q| QuantDoc {
            lo: q.lo,
            hi: q.hi,
            degenerate: q.degenerate,
        }),
    }
}

fn check_version(value: &Value) -> Result<()> {
    match value.get("version").and_then(Value::as_u64) {
        Some(SIDEINFO_VERSION) => Ok(()),
        Some(v) => Err(WatermarkError::UnsupportedVersion(format!("side info version {v}"))),
        None => Err(WatermarkError::MalformedSideInfo("missing version".into())),
    }
}

fn from_value(value: Value) -> Result<SideInfo> {
    check_version(&value)?;
    let doc: SideInfoDoc = serde_json::from_value(value)
        .map_err(|e| WatermarkError::MalformedSideInfo(e.to_string()))?;
    let scheme = match doc.scheme_tag.as_str() {
        "SemiBlind" => SchemeTag::SemiBlind,
        "HashCode" => SchemeTag::HashCode,
        other => {
            return Err(WatermarkError::MalformedSideInfo(format!(
                "unknown scheme_tag '{other}'"
            )))
        }
    };
    let (m, n) = (doc.rows, doc.cols);
    if m == 0 || n == 0 {
        return Err(WatermarkError::MalformedSideInfo("zero dimension".into()));
    }
    let mat = |field: &str, s: &str, r: usize, c: usize| -> Result<Matrix> {
        Matrix::new(r, c, decode_f64s(field, s, r * c)?)
            .map_err(|e| WatermarkError::MalformedSideInfo(format!("field {field}: {e}")))
    };
    let s = match doc.s_layout.as_str() {
        "diag" => {
            let d = decode_f64s("s_diag_or_full", &doc.s_diag_or_full, m.min(n))?;
            if d.iter().any(|x| !x.is_finite()) {
                return Err(WatermarkError::MalformedSideInfo("non-finite singular value".into()));
            }
            Matrix::from_diagonal(m, n, &d)
        }
        "full" => mat("s_diag_or_full", &doc.s_diag_or_full, m, n)?,
        other => {
            return Err(WatermarkError::MalformedSideInfo(format!(
                "unknown s_layout '{other}'"
            )))
        }
    };
    let info = SideInfo {
        scheme,
        alpha: doc.alpha,
        rows: m,
        cols: n,
        u: mat("u", &doc.u, m, m)?,
        s,
        v: mat("v", &doc.v, n, n)?,
        v_w: mat("v_w", &doc.v_w, n, n)?,
        quant: doc.quant.map(|q| QuantParams {
            lo: q.lo,
            hi: q.hi,
            degenerate: q.degenerate,
        }),
    };
    info.validate()?;
    info.check_orthogonality()?;
    Ok(info)
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| WatermarkError::Codec(format!("invalid JSON: {e}")))
}

pub fn sideinfo_to_json(info: &SideInfo) -> Result<String> {
    info.validate()?;
    serde_json::to_string_pretty(&to_doc(info)).map_err(|e| WatermarkError::Codec(e.to_string()))
}

pub fn sideinfo_from_json(text: &str) -> Result<SideInfo> {
    from_value(parse_json(text)?)
}

pub fn bundle_to_json(bundle: &SideInfoBundle) -> Result<String> {
    let records = bundle
        .records
        .iter()
        .map(|r| {
            r.validate()?;
            serde_json::to_value(to_doc(r)).map_err(|e| WatermarkError::Codec(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = BundleDoc {
        version: SIDEINFO_VERSION,
        strategy: bundle.strategy.as_str().to_string(),
        records,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| WatermarkError::Codec(e.to_string()))
}

fn bundle_from_value(value: Value) -> Result<SideInfoBundle> {
    check_version(&value)?;
    let doc: BundleDoc = serde_json::from_value(value)
        .map_err(|e| WatermarkError::MalformedSideInfo(e.to_string()))?;
    let strategy = ChannelStrategy::parse(&doc.strategy)
        .map_err(|e| WatermarkError::MalformedSideInfo(e.to_string()))?;
    let records = doc.records.into_iter().map(from_value).collect::<Result<_>>()?;
    Ok(SideInfoBundle { strategy, records })
}

pub fn key_from_json(text: &str) -> Result<KeyFile> {
    let value = parse_json(text)?;
    if value.get("records").is_some() {
        bundle_from_value(value).map(KeyFile::Bundle)
    } else {
        from_value(value).map(KeyFile::Single)
    }
}

pub fn save_sideinfo(info: &SideInfo, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), sideinfo_to_json(info)?.as_bytes())
}

pub fn load_sideinfo(path: impl AsRef<Path>) -> Result<SideInfo> {
    sideinfo_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_bundle(bundle: &SideInfoBundle, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), bundle_to_json(bundle)?.as_bytes())
}

pub fn load_key(path: impl AsRef<Path>) -> Result<KeyFile> {
    key_from_json(&std::fs::read_to_string(path)?)
}
