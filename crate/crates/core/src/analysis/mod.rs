//! Fidelity metrics, attack simulation and robustness sweeps.

pub mod attack;
pub mod metrics;
pub mod rng;
pub mod sweep;
pub mod synthetic;

pub use attack::{apply_attack, AttackKind, AttackSpec};
pub use metrics::{correlation, normalized_correlation, psnr, NcScore};
pub use sweep::{robustness_sweep, RobustnessReport, RobustnessRow};
