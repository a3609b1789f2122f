//! Deterministic stand-ins for the classic test images.
//!
//! * [`portrait`]: smooth, Lena-like: soft gradients, blurred blobs and a
//!   faint texture.
//! * [`texture`]: busy, Baboon-like: dense multi-orientation sinusoids and
//!   grain.
//! * [`silhouette`]: Plane-like: a dark airframe shape over a bright sky
//!   gradient, with the pose chosen by the seed.
//!
//! All values lie in `[0, 255]` and are real-valued; quantize explicitly if
//! 8-bit pixels are needed.

use std::f64::consts::PI;

use super::rng::SeededRng;
use crate::matrix::Matrix;

pub fn portrait(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SeededRng::new(seed ^ 0x706f_7274);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..7)
        .map(|_| {
            (
                rng.uniform(),
                rng.uniform(),
                0.06 + 0.18 * rng.uniform(),
                if rng.uniform() < 0.5 { -1.0 } else { 1.0 } * (30.0 + 50.0 * rng.uniform()),
            )
        })
        .collect();
    let (fx, fy, phase) = (
        3.0 + 4.0 * rng.uniform(),
        2.0 + 5.0 * rng.uniform(),
        2.0 * PI * rng.uniform(),
    );
    let mut grain = SeededRng::new(seed ^ 0x6772_6169);
    Matrix::from_fn(rows, cols, |r, c| {
        let y = r as f64 / rows as f64;
        let x = c as f64 / cols as f64;
        let mut v = 95.0 + 60.0 * x - 30.0 * y;
        for &(bx, by, w, amp) in &blobs {
            let d2 = (x - bx).powi(2) + (y - by).powi(2);
            v += amp * (-d2 / (2.0 * w * w)).exp();
        }
        v += 8.0 * (2.0 * PI * (fx * x + fy * y) + phase).sin();
        v += 2.0 * grain.normal();
        v.clamp(5.0, 250.0)
    })
}

pub fn texture(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SeededRng::new(seed ^ 0x6261_626f);
    let waves: Vec<(f64, f64, f64, f64)> = (0..24)
        .map(|_| {
            let theta = PI * rng.uniform();
            let freq = 6.0 + 40.0 * rng.uniform();
            (
                freq * theta.cos(),
                freq * theta.sin(),
                2.0 * PI * rng.uniform(),
                8.0 + 14.0 * rng.uniform(),
            )
        })
        .collect();
    let mut grain = SeededRng::new(seed ^ 0x6e6f_6973);
    Matrix::from_fn(rows, cols, |r, c| {
        let y = r as f64 / rows as f64;
        let x = c as f64 / cols as f64;
        let mut v = 120.0 + 30.0 * (PI * x).sin() * (PI * y).cos();
        for &(kx, ky, ph, amp) in &waves {
            v += amp * (2.0 * PI * (kx * x + ky * y) + ph).sin();
        }
        v += 18.0 * grain.normal();
        v.clamp(0.0, 255.0)
    })
}

pub fn silhouette(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SeededRng::new(seed ^ 0x706c_616e);
    let cx = 0.35 + 0.3 * rng.uniform();
    let cy = 0.35 + 0.3 * rng.uniform();
    let angle = -0.6 + 1.2 * rng.uniform();
    let scale = 0.7 + 0.5 * rng.uniform();
    let sky_tilt = 40.0 + 40.0 * rng.uniform();
    let (ca, sa) = (angle.cos(), angle.sin());
    let mut grain = SeededRng::new(seed ^ 0x736b_7920);
    Matrix::from_fn(rows, cols, |r, c| {
        let y = r as f64 / rows as f64;
        let x = c as f64 / cols as f64;
        // airframe-local coordinates, nose along +u
        let (dx, dy) = ((x - cx) / scale, (y - cy) / scale);
        let u = ca * dx + sa * dy;
        let w = -sa * dx + ca * dy;
        let fuselage = (u / 0.32).powi(2) + (w / 0.045).powi(2) <= 1.0;
        let wing = u.abs() < 0.07 - 0.05 * (w.abs() / 0.3) && w.abs() < 0.3 && u > -0.1;
        let tail = (u + 0.27).abs() < 0.035 && w.abs() < 0.11;
        let mut v = 215.0 - sky_tilt * y + 10.0 * x;
        if fuselage || wing || tail {
            v = 55.0 + 25.0 * u;
        }
        v += 1.5 * grain.normal();
        v.clamp(0.0, 255.0)
    })
}
