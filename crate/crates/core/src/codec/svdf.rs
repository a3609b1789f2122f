//! Lossless float image carrier.
//!
//! Layout, all little-endian:
//!
//! | offset | size        | field                      |
//! |--------|-------------|----------------------------|
//! | 0      | 4           | magic `SVDF`               |
//! | 4      | 2           | version (u16, currently 1) |
//! | 6      | 4           | rows (u32)                 |
//! | 10     | 4           | cols (u32)                 |
//! | 14     | rows*cols*8 | f64 payload, row-major     |

use std::path::Path;

use super::write_atomic;
use crate::error::{Result, WatermarkError};
use crate::matrix::Matrix;

pub const MAGIC: &[u8; 4] = b"SVDF";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 14;

pub fn encode_svdf(m: &Matrix) -> Result<Vec<u8>> {
    let dim = |n: usize| {
        u32::try_from(n).map_err(|_| WatermarkError::Codec(format!("dimension {n} exceeds u32")))
    };
    let mut out = Vec::with_capacity(HEADER_LEN + m.as_slice().len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&dim(m.rows())?.to_le_bytes());
    out.extend_from_slice(&dim(m.cols())?.to_le_bytes());
    for x in m.as_slice() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_svdf(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(WatermarkError::Codec("not an SVDF file".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(WatermarkError::UnsupportedVersion(format!("SVDF version {version}")));
    }
    let read_u32 = |at: usize| {
        u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice")) as usize
    };
    let (rows, cols) = (read_u32(6), read_u32(10));
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| WatermarkError::Codec("SVDF dimensions overflow".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != expected {
        return Err(WatermarkError::Codec(format!(
            "SVDF payload is {} bytes, expected {expected}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Matrix::new(rows, cols, data).map_err(|e| WatermarkError::Codec(e.to_string()))
}

pub fn read_svdf(path: impl AsRef<Path>) -> Result<Matrix> {
    decode_svdf(&std::fs::read(path)?)
}

pub fn write_svdf(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_svdf(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_round_trip() {
        let m = Matrix::from_rows(&[&[1.5, -0.0, 1e-300]]).unwrap();
        let bytes = encode_svdf(&m).unwrap();
        assert_eq!(&bytes[..14], b"SVDF\x01\x00\x01\x00\x00\x00\x03\x00\x00\x00");
        assert_eq!(bytes.len(), 14 + 24);
        let back = decode_svdf(&bytes).unwrap();
        let bits = |m: &Matrix| m.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&m));
    }

    #[test]
    fn rejects_bad_files() {
        let m = Matrix::zeros(2, 2);
        let mut bytes = encode_svdf(&m).unwrap();
        assert!(matches!(decode_svdf(&bytes[..20]), Err(WatermarkError::Codec(_))));
        bytes[4] = 9;
        assert!(matches!(decode_svdf(&bytes), Err(WatermarkError::UnsupportedVersion(_))));
        let mut nan = encode_svdf(&m).unwrap();
        nan[14..22].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(decode_svdf(&nan), Err(WatermarkError::Codec(_))));
    }
}
