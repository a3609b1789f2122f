//! Key-to-mask derivation and the byte layer used by the hash-code scheme.
//!
//! The mask `h_id` is SHA-256 in counter mode:
//! `SHA256(id || be32(0)) || SHA256(id || be32(1)) || ...`, truncated to
//! `rows * cols` bytes and laid out row-major. Digest bytes are used in
//! their natural output order.

use sha2::{Digest, Sha256};

use crate::error::{dim_err, Result, WatermarkError};
use crate::matrix::Matrix;

/// Secret key: customer identity plus a caller-chosen nonce, conventionally
/// `"name|nonce"`.
#[derive(Clone, PartialEq, Eq)]
pub struct Identity(Vec<u8>);

impl Identity {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(WatermarkError::InvalidKey("identity must not be empty".into()));
        }
        Ok(Self(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Identity(<{} bytes>)", self.0.len())
    }
}

/// Row-major `rows x cols` grid of bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl ByteMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(WatermarkError::InvalidInput(format!(
                "byte matrix {rows}x{cols} with {} entries",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Nearest integer, clamped into `[0, 255]`.
    pub fn from_rounded(m: &Matrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.to_u8_clamped(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| {
            f64::from(self.data[r * self.cols + c])
        })
    }
}

/// Hash-derived byte mask `h_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskMatrix(ByteMatrix);

impl MaskMatrix {
    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn as_slice(&self) -> &[u8] {
        self.0.as_slice()
    }

    pub fn as_bytes(&self) -> &ByteMatrix {
        &self.0
    }
}

/// Affine map used to bring a real matrix onto bytes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantParams {
    pub lo: f64,
    pub hi: f64,
    pub degenerate: bool,
}

impl QuantParams {
    pub fn validate(&self) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.hi < self.lo {
            return Err(WatermarkError::MalformedSideInfo(format!(
                "quantization range [{}, {}] is invalid",
                self.lo, self.hi
            )));
        }
        if self.degenerate != (self.hi == self.lo) {
            return Err(WatermarkError::MalformedSideInfo(
                "quantization degenerate flag disagrees with range".into(),
            ));
        }
        Ok(())
    }

    /// Largest absolute error of a quantize/dequantize round trip.
    pub fn half_step(&self) -> f64 {
        (self.hi - self.lo) / 510.0
    }
}

pub fn derive_mask(id: &Identity, rows: usize, cols: usize) -> Result<MaskMatrix> {
    if rows == 0 || cols == 0 {
        return Err(WatermarkError::InvalidParameter(format!(
            "mask shape must be positive, got {rows}x{cols}"
        )));
    }
    let len = rows * cols;
    let mut out = Vec::with_capacity(len + 32);
    let mut counter: u32 = 0;
    while out.len() < len {
        let mut h = Sha256::new();
        h.update(id.as_bytes());
        h.update(counter.to_be_bytes());
        out.extend_from_slice(&h.finalize());
        counter = counter.checked_add(1).ok_or_else(|| {
            WatermarkError::InvalidParameter("mask longer than the counter space".into())
        })?;
    }
    out.truncate(len);
    Ok(MaskMatrix(ByteMatrix {
        rows,
        cols,
        data: out,
    }))
}

pub fn quantize(a: &Matrix) -> Result<(ByteMatrix, QuantParams)> {
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(WatermarkError::InvalidInput("quantize input is not finite".into()));
    }
    let (lo, hi) = (a.min(), a.max());
    let (rows, cols) = a.shape();
    if hi == lo {
        let params = QuantParams {
            lo,
            hi,
            degenerate: true,
        };
        return Ok((ByteMatrix::new(rows, cols, vec![0; rows * cols])?, params));
    }
    let step = 255.0 / (hi - lo);
    let data = a
        .as_slice()
        .iter()
        .map(|&x| ((x - lo) * step).round().clamp(0.0, 255.0) as u8)
        .collect();
    Ok((
        ByteMatrix::new(rows, cols, data)?,
        QuantParams {
            lo,
            hi,
            degenerate: false,
        },
    ))
}

pub fn dequantize(b: &ByteMatrix, p: &QuantParams) -> Result<Matrix> {
    p.validate().map_err(|e| WatermarkError::InvalidParameter(e.to_string()))?;
    let (rows, cols) = b.shape();
    if p.degenerate {
        return Ok(Matrix::from_fn(rows, cols, |_, _| p.lo));
    }
    let step = (p.hi - p.lo) / 255.0;
    Ok(Matrix::from_fn(rows, cols, |r, c| {
        p.lo + f64::from(b.data[r * cols + c]) * step
    }))
}

pub fn xor_mask(b: &ByteMatrix, m: &MaskMatrix) -> Result<ByteMatrix> {
    if b.shape() != m.shape() {
        return Err(dim_err("xor operands", b.shape(), m.shape()));
    }
    Ok(ByteMatrix {
        rows: b.rows,
        cols: b.cols,
        data: b.data.iter().zip(m.as_slice()).map(|(x, k)| x ^ k).collect(),
    })
}
