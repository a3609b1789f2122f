//! Metrics, attacks and the robustness sweep.

use proptest::prelude::*;
use svdmark::analysis::rng::uniform_matrix;
use svdmark::analysis::synthetic::{portrait, texture};
use svdmark::analysis::{
    apply_attack, correlation, normalized_correlation, psnr, robustness_sweep, AttackKind,
    AttackSpec, RobustnessReport,
};
use svdmark::{Matrix, WatermarkError};

#[test]
fn psnr_examples() {
    let a = uniform_matrix(8, 8, 0.0, 255.0, 1);
    assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
    let zero = Matrix::zeros(4, 4);
    let full = zero.map(|_| 255.0);
    assert!(psnr(&zero, &full).unwrap().abs() < 1e-12);
    let off_by_one = a.map(|x| x + 1.0);
    assert!((psnr(&a, &off_by_one).unwrap() - 48.1308).abs() < 5e-5);
    assert!(matches!(psnr(&a, &Matrix::zeros(8, 7)), Err(WatermarkError::Dimension(_))));
}

#[test]
fn nc_examples() {
    let a = uniform_matrix(8, 8, 0.0, 255.0, 2);
    assert!((normalized_correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    assert!((normalized_correlation(&a, &a.scale(-1.0)).unwrap() + 1.0).abs() < 1e-12);
    let checker = Matrix::from_fn(8, 8, |r, c| ((r + c) % 2) as f64);
    let stripes = Matrix::from_fn(8, 8, |r, _| (r % 2) as f64);
    assert!(normalized_correlation(&checker, &stripes).unwrap().abs() < 1e-12);
    let flat = correlation(&a, &Matrix::zeros(8, 8).map(|_| 3.0)).unwrap();
    assert!(flat.degenerate && flat.value == 0.0);
}

#[test]
fn attack_identities() {
    let integral = uniform_matrix(16, 16, 0.0, 255.0, 3).map(f64::round);
    let quantized = apply_attack(&integral, &AttackSpec::new(AttackKind::Quantize8Bit, None)).unwrap();
    assert_eq!(quantized, integral);
    let a = uniform_matrix(16, 16, 0.0, 255.0, 4);
    assert_eq!(apply_attack(&a, &AttackSpec::noise(0.0, 9)).unwrap(), a);
    assert_eq!(
        apply_attack(&a, &AttackSpec::new(AttackKind::Rescale { scale: 1.0 }, None)).unwrap(),
        a
    );
}

#[test]
fn noise_statistics() {
    let a = Matrix::zeros(256, 256);
    let noisy = apply_attack(&a, &AttackSpec::noise(5.0, 42)).unwrap();
    let mean = noisy.mean();
    let sd = (noisy.as_slice().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 65535.0).sqrt();
    assert!((sd - 5.0).abs() <= 0.15, "{sd}");
}

#[test]
fn attack_validation() {
    let a = Matrix::zeros(10, 10);
    let crop = |row, col, height, width| AttackSpec::new(AttackKind::Crop { row, col, height, width }, None);
    assert!(matches!(apply_attack(&a, &crop(5, 5, 6, 2)), Err(WatermarkError::InvalidParameter(_))));
    assert!(matches!(apply_attack(&a, &crop(0, 0, 0, 2)), Err(WatermarkError::InvalidParameter(_))));
    assert!(apply_attack(&a, &crop(2, 2, 3, 3)).is_ok());
    assert!(matches!(
        apply_attack(&a, &AttackSpec::new(AttackKind::GaussianNoise { sigma: 1.0 }, None)),
        Err(WatermarkError::InvalidParameter(_))
    ));
    assert!(matches!(
        apply_attack(&a, &AttackSpec::new(AttackKind::Rescale { scale: 1.5 }, None)),
        Err(WatermarkError::InvalidParameter(_))
    ));
    assert!("crop:1,2,3".parse::<AttackKind>().is_err());
    assert_eq!("noise:2.5".parse::<AttackKind>().unwrap(), AttackKind::GaussianNoise { sigma: 2.5 });
}

fn sweep(cover: &Matrix, w: &Matrix) -> RobustnessReport {
    let attacks = [
        AttackSpec::noise(0.0, 1),
        AttackSpec::noise(3.0, 1),
        AttackSpec::new(AttackKind::Rescale { scale: 0.5 }, None),
    ];
    robustness_sweep(cover, w, &[0.05, 0.1, 0.3], &attacks).unwrap()
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let (cover, w) = (portrait(64, 64, 1), texture(64, 64, 2));
    let report = sweep(&cover, &w);
    assert_eq!(report.to_csv(), sweep(&cover, &w).to_csv());
    assert_eq!(report.rows.len(), 9);
    let alphas: Vec<f64> = report.rows.iter().map(|r| r.alpha).collect();
    assert_eq!(alphas, [0.05, 0.05, 0.05, 0.1, 0.1, 0.1, 0.3, 0.3, 0.3]);
    for row in report.rows.iter().filter(|r| r.attack.params() == "sigma=0") {
        assert!(row.nc_extracted >= 0.9999);
    }
    let psnrs: Vec<f64> = report.rows.iter().step_by(3).map(|r| r.psnr_marked).collect();
    assert!(psnrs.windows(2).all(|p| p[1] <= p[0] + 0.1), "{psnrs:?}");
    let csv = report.to_csv();
    assert!(csv.starts_with("alpha,attack,params,seed,psnr_db,nc\n"));
    assert_eq!(csv.lines().count(), 10);
}

fn small() -> impl Strategy<Value = (Matrix, Matrix)> {
    (2usize..8, 2usize..8).prop_flat_map(|(r, c)| {
        let v = move || proptest::collection::vec(-100.0f64..100.0, r * c);
        (v(), v()).prop_map(move |(a, b)| (Matrix::new(r, c, a).unwrap(), Matrix::new(r, c, b).unwrap()))
    })
}

proptest! {
    #[test]
    fn psnr_is_symmetric((a, b) in small()) {
        prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
    }

    #[test]
    fn nc_is_affine_invariant((a, b) in small(), k in 0.01f64..100.0, d in -1e3f64..1e3) {
        let base = correlation(&a, &b).unwrap();
        prop_assume!(!base.degenerate);
        let moved = normalized_correlation(&a, &b.map(|x| k * x + d)).unwrap();
        prop_assert!((moved - base.value).abs() <= 1e-10);
        prop_assert!((-1.0..=1.0).contains(&base.value));
    }

    #[test]
    fn stochastic_attacks_replay(seed in any::<u64>(), sigma in 0.0f64..10.0) {
        let a = uniform_matrix(6, 6, 0.0, 255.0, 5);
        let spec = AttackSpec::noise(sigma, seed);
        let x = apply_attack(&a, &spec).unwrap();
        let y = apply_attack(&a, &spec).unwrap();
        prop_assert!(x.as_slice().iter().zip(y.as_slice()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}
