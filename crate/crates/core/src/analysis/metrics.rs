use crate::error::{dim_err, Result};
use crate::matrix::Matrix;

const PEAK: f64 = 255.0;

/// Peak signal-to-noise ratio in dB with peak 255. Identical inputs give
/// `f64::INFINITY`.
pub fn psnr(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(dim_err("psnr", a.shape(), b.shape()));
    }
    let n = a.as_slice().len() as f64;
    let mse = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / mse).log10())
}

/// Normalized correlation together with a flag marking the degenerate case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcScore {
    pub value: f64,
    /// One of the inputs was constant; `value` is then 0 by definition.
    pub degenerate: bool,
}

/// Pearson correlation of the flattened, mean-centered matrices.
pub fn correlation(a: &Matrix, b: &Matrix) -> Result<NcScore> {
    if a.shape() != b.shape() {
        return Err(dim_err("normalized correlation", a.shape(), b.shape()));
    }
    let (ma, mb) = (a.mean(), b.mean());
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(NcScore {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(NcScore {
        value: (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

pub fn normalized_correlation(a: &Matrix, b: &Matrix) -> Result<f64> {
    Ok(correlation(a, b)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rng::uniform_matrix;
    use crate::error::WatermarkError;

    #[test]
    fn psnr_examples() {
        let a = uniform_matrix(8, 8, 0.0, 255.0, 1);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let zeros = Matrix::zeros(4, 4);
        let full = Matrix::from_fn(4, 4, |_, _| 255.0);
        assert!(psnr(&zeros, &full).unwrap().abs() < 1e-12);
        let ones = Matrix::from_fn(4, 4, |_, _| 1.0);
        assert!((psnr(&zeros, &ones).unwrap() - 48.1308).abs() < 5e-5);
        assert!(matches!(psnr(&zeros, &Matrix::zeros(4, 3)), Err(WatermarkError::Dimension(_))));
    }

    #[test]
    fn nc_examples() {
        let a = uniform_matrix(8, 8, 0.0, 255.0, 2);
        assert!((normalized_correlation(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((normalized_correlation(&a, &a.scale(-1.0)).unwrap() + 1.0).abs() < 1e-15);

        let checker = Matrix::from_fn(8, 8, |r, c| if (r + c) % 2 == 0 { 1.0 } else { -1.0 });
        let stripes = Matrix::from_fn(8, 8, |r, _| if r % 2 == 0 { 1.0 } else { -1.0 });
        assert_eq!(normalized_correlation(&checker, &stripes).unwrap(), 0.0);

        let flat = Matrix::from_fn(8, 8, |_, _| 3.0);
        assert_eq!(
            correlation(&a, &flat).unwrap(),
            NcScore {
                value: 0.0,
                degenerate: true
            }
        );
    }
}
