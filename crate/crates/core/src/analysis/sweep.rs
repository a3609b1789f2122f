use std::fmt::Write as _;

use super::attack::{apply_attack, AttackSpec};
use super::metrics::{normalized_correlation, psnr};
use crate::error::{dim_err, Result, WatermarkError};
use crate::matrix::Matrix;
use crate::semi_blind::{check_alpha, embed_payload, extract, split_watermark, SchemeTag, SideInfo};
use crate::svd::svd;

pub const CSV_HEADER: &str = "alpha,attack,params,seed,psnr_db,nc";

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRow {
    pub alpha: f64,
    pub attack: AttackSpec,
    /// PSNR of the marked image (before the attack) against the cover.
    pub psnr_marked: f64,
    /// NC between the watermark extracted after the attack and the original.
    pub nc_extracted: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RobustnessReport {
    pub rows: Vec<RobustnessRow>,
}

impl RobustnessReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let seed = row.attack.seed.map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fixed6(row.alpha),
                row.attack.name(),
                row.attack.params(),
                seed,
                fixed6(row.psnr_marked),
                fixed6(row.nc_extracted),
            );
        }
        out
    }
}

fn fixed6(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.6}")
    }
}

/// Semi-blind embed, attack and extract for every `(alpha, attack)` pair.
/// Rows are ordered alpha-major, attacks in input order.
pub fn robustness_sweep(
    cover: &Matrix,
    watermark: &Matrix,
    alphas: &[f64],
    attacks: &[AttackSpec],
) -> Result<RobustnessReport> {
    if alphas.is_empty() || attacks.is_empty() {
        return Err(WatermarkError::InvalidParameter(
            "sweep needs at least one alpha and one attack".into(),
        ));
    }
    if cover.shape() != watermark.shape() {
        return Err(dim_err("cover and watermark", cover.shape(), watermark.shape()));
    }
    for &alpha in alphas {
        check_alpha(alpha)?;
        if alpha == 0.0 {
            return Err(WatermarkError::InvalidParameter("sweep alphas must be positive".into()));
        }
    }
    for attack in attacks {
        attack.validate(cover.shape())?;
    }

    let factors = svd(cover)?;
    let (pcs, v_w) = split_watermark(watermark)?;
    let mut report = RobustnessReport::default();
    for &alpha in alphas {
        let marked = embed_payload(&factors, pcs.matrix(), alpha)?;
        let info = SideInfo {
            scheme: SchemeTag::SemiBlind,
            alpha,
            rows: cover.rows(),
            cols: cover.cols(),
            u: factors.u.clone(),
            s: factors.s.clone(),
            v: factors.v.clone(),
            v_w: v_w.clone(),
            quant: None,
        };
        let psnr_marked = psnr(cover, &marked)?;
        for attack in attacks {
            let attacked = apply_attack(&marked, attack)?;
            let w_star = extract(&attacked, &info)?;
            report.rows.push(RobustnessRow {
                alpha,
                attack: *attack,
                psnr_marked,
                nc_extracted: normalized_correlation(&w_star, watermark)?,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::attack::AttackKind;
    use crate::analysis::synthetic::{portrait, texture};

    #[test]
    fn undistorted_sweep() {
        let cover = portrait(24, 24, 1);
        let w = texture(24, 24, 2);
        let report =
            robustness_sweep(&cover, &w, &[0.05, 0.1, 0.2], &[AttackSpec::noise(0.0, 1)]).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows.iter().all(|r| r.nc_extracted >= 0.9999));
        assert!(report
            .rows
            .windows(2)
            .all(|w| w[1].psnr_marked <= w[0].psnr_marked + 0.1));
    }

    #[test]
    fn csv_layout() {
        let report = RobustnessReport {
            rows: vec![
                RobustnessRow {
                    alpha: 0.1,
                    attack: AttackSpec::noise(2.0, 7),
                    psnr_marked: 30.5,
                    nc_extracted: 0.987654321,
                },
                RobustnessRow {
                    alpha: 0.1,
                    attack: AttackSpec::new(AttackKind::Quantize8Bit, None),
                    psnr_marked: f64::INFINITY,
                    nc_extracted: 1.0,
                },
            ],
        };
        assert_eq!(
            report.to_csv(),
            "alpha,attack,params,seed,psnr_db,nc\n\
             0.100000,gaussian_noise,sigma=2.000000,7,30.500000,0.987654\n\
             0.100000,quantize8,,,inf,1.000000\n"
        );
    }

    #[test]
    fn empty_lists_rejected() {
        let a = portrait(8, 8, 1);
        assert!(robustness_sweep(&a, &a, &[], &[AttackSpec::noise(1.0, 1)]).is_err());
        assert!(robustness_sweep(&a, &a, &[0.1], &[]).is_err());
    }
}
