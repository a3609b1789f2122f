//! Semi-blind and keyed SVD image watermarking.
//!
//! * [`semi_blind`]: embed a watermark's principal components into a cover's
//!   singular values; extract with the stored side info; project onto a
//!   reference image's basis.
//! * [`invisible`]: the same carrier with the payload quantized and XOR-masked
//!   by an identity-derived hash stream ([`hash_stream`]).
//! * [`color`]: luminance, blue-channel and per-channel strategies for RGB.
//! * [`analysis`]: PSNR, normalized correlation, attacks, robustness sweeps.
//! * [`codec`]: PGM/PPM, lossless SVDF float images, JSON key files.

pub mod analysis;
pub mod cli;
pub mod codec;
pub mod color;
pub mod error;
pub mod hash_stream;
pub mod invisible;
pub mod matrix;
pub mod semi_blind;
pub mod svd;

pub use error::{Result, WatermarkError};
pub use hash_stream::Identity;
pub use matrix::Matrix;
pub use semi_blind::{SchemeTag, SideInfo};
pub use svd::{svd, SvdFactors};
