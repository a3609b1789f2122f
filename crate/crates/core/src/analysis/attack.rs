//! Distortions applied to marked images before extraction.

use std::fmt;
use std::str::FromStr;

use super::rng::SeededRng;
use crate::error::{Result, WatermarkError};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackKind {
    /// Additive `N(0, sigma^2)` noise on every entry.
    GaussianNoise { sigma: f64 },
    /// Round to the nearest integer and clip into `[0, 255]`.
    Quantize8Bit,
    /// Replace the rectangle with the mean of the whole image.
    Crop {
        row: usize,
        col: usize,
        height: usize,
        width: usize,
    },
    /// Bilinear downsample by `scale`, then bilinear upsample back.
    Rescale { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    /// Required by stochastic kinds.
    pub seed: Option<u64>,
}

impl AttackSpec {
    pub fn new(kind: AttackKind, seed: Option<u64>) -> Self {
        Self { kind, seed }
    }

    pub fn noise(sigma: f64, seed: u64) -> Self {
        Self::new(AttackKind::GaussianNoise { sigma }, Some(seed))
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            AttackKind::GaussianNoise { .. } => "gaussian_noise",
            AttackKind::Quantize8Bit => "quantize8",
            AttackKind::Crop { .. } => "crop",
            AttackKind::Rescale { .. } => "rescale",
        }
    }

    /// Parameters as a comma-free string, suitable for a CSV cell.
    pub fn params(&self) -> String {
        match self.kind {
            AttackKind::GaussianNoise { sigma } => format!("sigma={sigma:.6}"),
            AttackKind::Quantize8Bit => String::new(),
            AttackKind::Crop {
                row,
                col,
                height,
                width,
            } => format!("rect={row};{col};{height};{width}"),
            AttackKind::Rescale { scale } => format!("scale={scale:.6}"),
        }
    }

    pub fn validate(&self, shape: (usize, usize)) -> Result<()> {
        match self.kind {
            AttackKind::GaussianNoise { sigma } => {
                if !sigma.is_finite() || sigma < 0.0 {
                    return Err(WatermarkError::InvalidParameter(format!(
                        "noise sigma must be finite and non-negative, got {sigma}"
                    )));
                }
                if self.seed.is_none() {
                    return Err(WatermarkError::InvalidParameter(
                        "gaussian noise requires a seed".into(),
                    ));
                }
            }
            AttackKind::Quantize8Bit => {}
            AttackKind::Crop {
                row,
                col,
                height,
                width,
            } => {
                let fits = height > 0
                    && width > 0
                    && row.checked_add(height).is_some_and(|e| e <= shape.0)
                    && col.checked_add(width).is_some_and(|e| e <= shape.1);
                if !fits {
                    return Err(WatermarkError::InvalidParameter(format!(
                        "crop rect {row},{col} {height}x{width} outside {}x{} image",
                        shape.0, shape.1
                    )));
                }
            }
            AttackKind::Rescale { scale } => {
                if !(scale > 0.0 && scale <= 1.0) {
                    return Err(WatermarkError::InvalidParameter(format!(
                        "rescale factor must lie in (0, 1], got {scale}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params();
        if p.is_empty() {
            write!(f, "{}", self.name())
        } else {
            write!(f, "{}[{}]", self.name(), p)
        }
    }
}

/// Parses `noise:SIGMA`, `quantize`, `crop:ROW,COL,HEIGHT,WIDTH` or
/// `rescale:SCALE`. The seed is left unset.
impl FromStr for AttackKind {
    type Err = WatermarkError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let bad = || WatermarkError::InvalidParameter(format!("cannot parse attack '{s}'"));
        let num = |a: Option<&str>| -> Result<f64> { a.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        match name {
            "noise" | "gaussian_noise" => Ok(AttackKind::GaussianNoise { sigma: num(arg)? }),
            "quantize" | "quantize8" => Ok(AttackKind::Quantize8Bit),
            "rescale" => Ok(AttackKind::Rescale { scale: num(arg)? }),
            "crop" => {
                let parts: Vec<usize> = arg
                    .ok_or_else(bad)?
                    .split([',', ';'])
                    .map(|p| p.trim().parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                match parts[..] {
                    [row, col, height, width] => Ok(AttackKind::Crop {
                        row,
                        col,
                        height,
                        width,
                    }),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

pub fn apply_attack(a: &Matrix, spec: &AttackSpec) -> Result<Matrix> {
    spec.validate(a.shape())?;
    match spec.kind {
        AttackKind::GaussianNoise { sigma } => {
            let mut rng = SeededRng::new(spec.seed.expect("validated"));
            Ok(Matrix::from_fn(a.rows(), a.cols(), |r, c| {
                a[(r, c)] + sigma * rng.normal()
            }))
        }
        AttackKind::Quantize8Bit => Ok(a.map(|x| x.round().clamp(0.0, 255.0))),
        AttackKind::Crop {
            row,
            col,
            height,
            width,
        } => {
            let mean = a.mean();
            let mut out = a.clone();
            for r in row..row + height {
                for c in col..col + width {
                    out[(r, c)] = mean;
                }
            }
            Ok(out)
        }
        AttackKind::Rescale { scale } => {
            let (rows, cols) = a.shape();
            let small_r = ((rows as f64 * scale).round() as usize).max(1);
            let small_c = ((cols as f64 * scale).round() as usize).max(1);
            let small = resize_bilinear(a, small_r, small_c);
            Ok(resize_bilinear(&small, rows, cols))
        }
    }
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
pub fn resize_bilinear(a: &Matrix, rows: usize, cols: usize) -> Matrix {
    let (in_r, in_c) = a.shape();
    let sy = in_r as f64 / rows as f64;
    let sx = in_c as f64 / cols as f64;
    let sample = |pos: f64, len: usize| -> (usize, usize, f64) {
        let p = pos.clamp(0.0, (len - 1) as f64);
        let i0 = p.floor() as usize;
        let i1 = (i0 + 1).min(len - 1);
        (i0, i1, p - i0 as f64)
    };
    Matrix::from_fn(rows, cols, |r, c| {
        let (y0, y1, fy) = sample((r as f64 + 0.5) * sy - 0.5, in_r);
        let (x0, x1, fx) = sample((c as f64 + 0.5) * sx - 0.5, in_c);
        let top = a[(y0, x0)] * (1.0 - fx) + a[(y0, x1)] * fx;
        let bottom = a[(y1, x0)] * (1.0 - fx) + a[(y1, x1)] * fx;
        top * (1.0 - fy) + bottom * fy
    })
}

/// Nearest-neighbour resampling, used to fit a watermark to the cover size.
pub fn resize_nearest(a: &Matrix, rows: usize, cols: usize) -> Matrix {
    let (in_r, in_c) = a.shape();
    Matrix::from_fn(rows, cols, |r, c| {
        let y = ((r as f64 + 0.5) * in_r as f64 / rows as f64).floor() as usize;
        let x = ((c as f64 + 0.5) * in_c as f64 / cols as f64).floor() as usize;
        a[(y.min(in_r - 1), x.min(in_c - 1))]
    })
}
