//! File formats: 8-bit PGM/PPM, lossless SVDF float images, JSON key files.

pub mod netpbm;
pub mod sideinfo;
pub mod svdf;

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub use netpbm::{read_pgm, read_ppm, write_pgm, write_ppm};
pub use sideinfo::{load_key, load_sideinfo, save_bundle, save_sideinfo, KeyFile};
pub use svdf::{read_svdf, write_svdf};

/// Writes through a temporary file in the target directory and renames it
/// into place, so `path` is either untouched or complete.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    // tempfile creates 0600; match what a plain create would give
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
