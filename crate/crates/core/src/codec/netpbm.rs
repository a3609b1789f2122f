//! Binary PGM (`P5`) and PPM (`P6`) with maxval 255.

use std::path::Path;

use super::write_atomic;
use crate::color::RgbImage;
use crate::error::{Result, WatermarkError};
use crate::matrix::Matrix;

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    payload_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(WatermarkError::Codec("missing netpbm magic".into()));
    }
    let magic = [bytes[0], bytes[1]];
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(WatermarkError::Codec("truncated header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(WatermarkError::Codec(format!("expected a number at byte {start}")));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| WatermarkError::Codec("header number out of range".into()))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(WatermarkError::Codec("missing whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(WatermarkError::UnsupportedFormat(format!(
            "maxval {maxval}, only 255 is supported"
        )));
    }
    if width == 0 || height == 0 {
        return Err(WatermarkError::Codec("zero image dimension".into()));
    }
    Ok(Header {
        magic,
        width,
        height,
        payload_offset: pos,
    })
}

fn check_magic(h: &Header, want: &[u8; 2]) -> Result<()> {
    if &h.magic == want {
        return Ok(());
    }
    Err(WatermarkError::UnsupportedFormat(format!(
        "expected {}, found {}",
        String::from_utf8_lossy(want),
        String::from_utf8_lossy(&h.magic)
    )))
}

fn payload<'a>(bytes: &'a [u8], h: &Header, channels: usize) -> Result<&'a [u8]> {
    let len = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| WatermarkError::Codec("image too large".into()))?;
    bytes
        .get(h.payload_offset..h.payload_offset + len)
        .ok_or_else(|| {
            WatermarkError::Codec(format!(
                "truncated payload: need {len} bytes, have {}",
                bytes.len() - h.payload_offset
            ))
        })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Matrix> {
    let h = parse_header(bytes)?;
    check_magic(&h, b"P5")?;
    let body = payload(bytes, &h, 1)?;
    Matrix::new(h.height, h.width, body.iter().map(|&b| f64::from(b)).collect())
}

pub fn encode_pgm(m: &Matrix) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", m.cols(), m.rows()).into_bytes();
    out.extend(m.to_u8_clamped());
    out
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let h = parse_header(bytes)?;
    check_magic(&h, b"P6")?;
    let body = payload(bytes, &h, 3)?;
    let plane = |k: usize| {
        Matrix::new(
            h.height,
            h.width,
            body.iter().skip(k).step_by(3).map(|&b| f64::from(b)).collect(),
        )
    };
    RgbImage::new(plane(0)?, plane(1)?, plane(2)?)
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    let [r, g, b] = img.channels().map(|c| c.to_u8_clamped());
    for i in 0..r.len() {
        out.extend_from_slice(&[r[i], g[i], b[i]]);
    }
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Matrix> {
    decode_pgm(&std::fs::read(path)?)
}

/// Rounds and clips to `[0, 255]` before writing.
pub fn write_pgm(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_pgm(m))
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<RgbImage> {
    decode_ppm(&std::fs::read(path)?)
}

pub fn write_ppm(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_ppm(img))
}
