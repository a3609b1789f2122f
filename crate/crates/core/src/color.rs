//! Applying the mono-channel schemes to RGB images.
//!
//! Three strategies are supported: mark the luminance plane `L = max + min`
//! of the three channels, mark the blue channel only, or mark every channel
//! separately.

use crate::error::{dim_err, Result, WatermarkError};
use crate::hash_stream::Identity;
use crate::invisible::{embed_invisible, extract_invisible};
use crate::matrix::Matrix;
use crate::semi_blind::{embed, extract, SchemeTag, SideInfo};

#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub r: Matrix,
    pub g: Matrix,
    pub b: Matrix,
}

impl RgbImage {
    pub fn new(r: Matrix, g: Matrix, b: Matrix) -> Result<Self> {
        if r.shape() != g.shape() || r.shape() != b.shape() {
            return Err(WatermarkError::Dimension(format!(
                "channel shapes differ: {:?} {:?} {:?}",
                r.shape(),
                g.shape(),
                b.shape()
            )));
        }
        Ok(Self { r, g, b })
    }

    /// Three identical channels.
    pub fn grey(m: &Matrix) -> Self {
        Self {
            r: m.clone(),
            g: m.clone(),
            b: m.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        self.r.rows()
    }

    pub fn cols(&self) -> usize {
        self.r.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.r.shape()
    }

    pub fn channels(&self) -> [&Matrix; 3] {
        [&self.r, &self.g, &self.b]
    }
}

/// `L = max(R, G, B) + min(R, G, B)`, range `[0, 510]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuminancePlane(pub Matrix);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelStrategy {
    Luminance,
    BlueChannel,
    PerChannel,
}

impl ChannelStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelStrategy::Luminance => "luminance",
            ChannelStrategy::BlueChannel => "blue",
            ChannelStrategy::PerChannel => "perchannel",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "luminance" => Ok(ChannelStrategy::Luminance),
            "blue" => Ok(ChannelStrategy::BlueChannel),
            "perchannel" => Ok(ChannelStrategy::PerChannel),
            _ => Err(WatermarkError::InvalidParameter(format!("unknown strategy '{s}'"))),
        }
    }

    fn record_count(self) -> usize {
        match self {
            ChannelStrategy::PerChannel => 3,
            _ => 1,
        }
    }
}

/// Side info for a color embedding: one record, or three (R, G, B) for
/// [`ChannelStrategy::PerChannel`].
#[derive(Debug, Clone, PartialEq)]
pub struct SideInfoBundle {
    pub strategy: ChannelStrategy,
    pub records: Vec<SideInfo>,
}

pub fn luminance_split(img: &RgbImage) -> LuminancePlane {
    LuminancePlane(Matrix::from_fn(img.rows(), img.cols(), |r, c| {
        let (x, y, z) = (img.r[(r, c)], img.g[(r, c)], img.b[(r, c)]);
        x.max(y).max(z) + x.min(y).min(z)
    }))
}

/// Writes a new luminance plane back by shifting every channel of a pixel by
/// `(L' - L) / 2`, then clipping into `[0, 255]`.
pub fn luminance_merge(img: &RgbImage, l_new: &LuminancePlane) -> Result<RgbImage> {
    if l_new.0.shape() != img.shape() {
        return Err(dim_err("luminance plane vs image", l_new.0.shape(), img.shape()));
    }
    let l_old = luminance_split(img);
    let delta = l_new.0.sub(&l_old.0)?.scale(0.5);
    let shift = |ch: &Matrix| -> Result<Matrix> {
        Ok(ch.add(&delta)?.map(|x| x.clamp(0.0, 255.0)))
    };
    RgbImage::new(shift(&img.r)?, shift(&img.g)?, shift(&img.b)?)
}

fn embed_mono(
    plane: &Matrix,
    w: &Matrix,
    scheme: SchemeTag,
    alpha: f64,
    id: Option<&Identity>,
) -> Result<(Matrix, SideInfo)> {
    match scheme {
        SchemeTag::SemiBlind => embed(plane, w, alpha),
        SchemeTag::HashCode => {
            let id = id.ok_or_else(|| {
                WatermarkError::InvalidKey("the hash-code scheme needs an identity".into())
            })?;
            embed_invisible(plane, w, id, alpha)
        }
    }
}

fn extract_mono(plane: &Matrix, info: &SideInfo, id: Option<&Identity>) -> Result<Matrix> {
    match info.scheme {
        SchemeTag::SemiBlind => extract(plane, info),
        SchemeTag::HashCode => {
            let id = id.ok_or_else(|| {
                WatermarkError::InvalidKey("the hash-code scheme needs an identity".into())
            })?;
            extract_invisible(plane, info, id)
        }
    }
}

pub fn embed_color(
    img: &RgbImage,
    w: &Matrix,
    strategy: ChannelStrategy,
    scheme: SchemeTag,
    alpha: f64,
    id: Option<&Identity>,
) -> Result<(RgbImage, SideInfoBundle)> {
    if w.shape() != img.shape() {
        return Err(dim_err("watermark vs image", w.shape(), img.shape()));
    }
    match (scheme, id) {
        (SchemeTag::HashCode, None) => {
            return Err(WatermarkError::InvalidKey(
                "the hash-code scheme needs an identity".into(),
            ))
        }
        (SchemeTag::SemiBlind, Some(_)) => {
            return Err(WatermarkError::InvalidParameter(
                "an identity is only used by the hash-code scheme".into(),
            ))
        }
        _ => {}
    }
    let (marked, records) = match strategy {
        ChannelStrategy::Luminance => {
            let l = luminance_split(img);
            let (l_marked, info) = embed_mono(&l.0, w, scheme, alpha, id)?;
            (luminance_merge(img, &LuminancePlane(l_marked))?, vec![info])
        }
        ChannelStrategy::BlueChannel => {
            let (b, info) = embed_mono(&img.b, w, scheme, alpha, id)?;
            (RgbImage::new(img.r.clone(), img.g.clone(), b)?, vec![info])
        }
        ChannelStrategy::PerChannel => {
            let (r, ir) = embed_mono(&img.r, w, scheme, alpha, id)?;
            let (g, ig) = embed_mono(&img.g, w, scheme, alpha, id)?;
            let (b, ib) = embed_mono(&img.b, w, scheme, alpha, id)?;
            (RgbImage::new(r, g, b)?, vec![ir, ig, ib])
        }
    };
    Ok((marked, SideInfoBundle { strategy, records }))
}

pub fn extract_color(
    img: &RgbImage,
    bundle: &SideInfoBundle,
    strategy: ChannelStrategy,
    id: Option<&Identity>,
) -> Result<Matrix> {
    if bundle.strategy != strategy || bundle.records.len() != strategy.record_count() {
        return Err(WatermarkError::MalformedSideInfo(format!(
            "bundle holds {} record(s) for strategy {}, requested {}",
            bundle.records.len(),
            bundle.strategy.as_str(),
            strategy.as_str()
        )));
    }
    match strategy {
        ChannelStrategy::Luminance => {
            extract_mono(&luminance_split(img).0, &bundle.records[0], id)
        }
        ChannelStrategy::BlueChannel => extract_mono(&img.b, &bundle.records[0], id),
        ChannelStrategy::PerChannel => {
            let mut acc: Option<Matrix> = None;
            for (plane, info) in img.channels().into_iter().zip(&bundle.records) {
                let w = extract_mono(plane, info, id)?;
                acc = Some(match acc {
                    None => w,
                    Some(sum) => sum.add(&w)?,
                });
            }
            Ok(acc.expect("three records").scale(1.0 / 3.0))
        }
    }
}
