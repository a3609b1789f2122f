//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification rejected.
//! Errors are reported on stderr as a single `error[CODE]: message` line.
//!
//! Image files are chosen by extension: `.pgm` (8-bit grey), `.svdf`
//! (lossless float grey) and `.ppm` (8-bit RGB, embedded with `--strategy`).

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::attack::resize_nearest;
use crate::analysis::synthetic::{portrait, silhouette, texture};
use crate::analysis::{
    apply_attack, normalized_correlation, psnr, robustness_sweep, AttackKind, AttackSpec,
};
use crate::codec::sideinfo::{bundle_to_json, sideinfo_to_json};
use crate::codec::{load_key, read_pgm, read_ppm, read_svdf, write_pgm, write_ppm, write_svdf, KeyFile};
use crate::color::{embed_color, extract_color, ChannelStrategy, RgbImage};
use crate::error::{Result, WatermarkError};
use crate::hash_stream::Identity;
use crate::invisible::{
    embed_invisible, extract_invisible, recover_unmasked_components, Decision,
    DEFAULT_VERIFY_THRESHOLD,
};
use crate::matrix::Matrix;
use crate::semi_blind::{
    detect_reference, embed, extract, recover_components, reference_basis, SchemeTag, SideInfo,
    DEFAULT_ALPHA,
};

pub const SEED_ENV: &str = "SVDMARK_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "svdmark",
    version,
    about = "Semi-blind and hash-code SVD image watermarking",
    arg_required_else_help = true
)]
struct Cli {
    /// Embedding strength
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Color strategy for .ppm images: luminance, blue or perchannel
    #[arg(long, global = true)]
    strategy: Option<String>,
    /// Seed for stochastic attacks and synthetic images (SVDMARK_SEED overrides)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    watermark: PathBuf,
    /// Marked image (.svdf keeps full precision)
    #[arg(long)]
    out: PathBuf,
    /// Side-info key file to write (JSON)
    #[arg(long)]
    key: PathBuf,
    /// Nearest-neighbour resize the watermark to the cover size
    #[arg(long)]
    resize: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Semi-blind embed
    Embed(EmbedArgs),
    /// Semi-blind extract
    Extract {
        #[arg(long)]
        marked: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hash-code embed, committing the watermark to --id
    EmbedHash {
        #[command(flatten)]
        common: EmbedArgs,
        #[arg(long)]
        id: String,
    },
    /// Hash-code extract with --id
    ExtractHash {
        #[arg(long)]
        marked: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hash-code extract and compare against a claimed watermark; exit 2 on rejection
    VerifyHash {
        #[arg(long)]
        marked: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        claimed: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VERIFY_THRESHOLD)]
        threshold: f64,
    },
    /// Project recovered principal components onto a reference image's basis
    DetectReference {
        #[arg(long)]
        marked: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Identity, for hash-code keys
        #[arg(long)]
        id: Option<String>,
    },
    /// PSNR and normalized correlation between two images
    Metrics {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Apply one distortion: noise:SIGMA, quantize, crop:ROW,COL,H,W or rescale:SCALE
    Attack {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        kind: String,
    },
    /// Embed/attack/extract over a grid and write a CSV report
    Sweep {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        watermark: PathBuf,
        /// Comma-separated list, e.g. 0.05,0.1,0.2
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        /// Repeatable attack spec (see `attack --kind`)
        #[arg(long = "attack", required = true)]
        attacks: Vec<String>,
        /// CSV destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic test image: portrait, texture or silhouette
    Synth {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 256)]
        rows: usize,
        #[arg(long, default_value_t = 256)]
        cols: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e);
            1
        }
    }
}

fn seed(cli_seed: Option<u64>) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            WatermarkError::InvalidParameter(format!("{SEED_ENV}='{v}' is not an unsigned integer"))
        }),
        Err(_) => Ok(cli_seed.unwrap_or(0)),
    }
}

enum Image {
    Grey(Matrix),
    Color(RgbImage),
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

fn read_image(path: &Path) -> Result<Image> {
    match extension(path).as_str() {
        "pgm" => Ok(Image::Grey(read_pgm(path)?)),
        "svdf" => Ok(Image::Grey(read_svdf(path)?)),
        "ppm" => Ok(Image::Color(read_ppm(path)?)),
        other => Err(WatermarkError::UnsupportedFormat(format!(
            "{}: unknown image extension '{other}'",
            path.display()
        ))),
    }
}

fn read_grey(path: &Path) -> Result<Matrix> {
    match read_image(path)? {
        Image::Grey(m) => Ok(m),
        Image::Color(_) => Err(WatermarkError::UnsupportedFormat(format!(
            "{}: a single-channel image is required here",
            path.display()
        ))),
    }
}

fn write_grey(m: &Matrix, path: &Path) -> Result<()> {
    match extension(path).as_str() {
        "pgm" => write_pgm(m, path),
        "svdf" => write_svdf(m, path),
        other => Err(WatermarkError::UnsupportedFormat(format!(
            "{}: cannot write a grey image as '{other}'",
            path.display()
        ))),
    }
}

fn write_color(img: &RgbImage, path: &Path) -> Result<()> {
    match extension(path).as_str() {
        "ppm" => write_ppm(img, path),
        other => Err(WatermarkError::UnsupportedFormat(format!(
            "{}: color images are written as .ppm, not '{other}'",
            path.display()
        ))),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    crate::codec::write_atomic(path, text.as_bytes())
}

fn strategy(s: Option<&str>) -> Result<ChannelStrategy> {
    s.map_or(Ok(ChannelStrategy::Luminance), ChannelStrategy::parse)
}

fn identity(id: &str) -> Result<Identity> {
    Identity::new(id.as_bytes())
}

fn execute(cli: Cli) -> Result<i32> {
    let alpha = cli.alpha;
    let strategy_flag = cli.strategy.as_deref();
    match cli.command {
        Command::Embed(args) => {
            embed_command(&args, alpha, strategy_flag, SchemeTag::SemiBlind, None)?;
        }
        Command::EmbedHash { common, id } => {
            let id = identity(&id)?;
            embed_command(&common, alpha, strategy_flag, SchemeTag::HashCode, Some(&id))?;
        }
        Command::Extract { marked, key, out } => {
            let w = extract_any(&marked, &key, strategy_flag, None)?;
            write_grey(&w, &out)?;
        }
        Command::ExtractHash {
            marked,
            key,
            id,
            out,
        } => {
            let id = identity(&id)?;
            let w = extract_any(&marked, &key, strategy_flag, Some(&id))?;
            write_grey(&w, &out)?;
        }
        Command::VerifyHash {
            marked,
            key,
            id,
            claimed,
            threshold,
        } => {
            if !(threshold > 0.0 && threshold < 1.0) {
                return Err(WatermarkError::InvalidParameter(format!(
                    "threshold must lie in (0, 1), got {threshold}"
                )));
            }
            let id = identity(&id)?;
            let w = extract_any(&marked, &key, strategy_flag, Some(&id))?;
            let nc = normalized_correlation(&w, &read_grey(&claimed)?)?;
            let decision = if nc >= threshold {
                Decision::Verified
            } else {
                Decision::Rejected
            };
            println!("{decision:?} nc={nc:.6} threshold={threshold:.6}");
            if decision == Decision::Rejected {
                return Ok(2);
            }
        }
        Command::DetectReference {
            marked,
            key,
            reference,
            out,
            id,
        } => {
            let info = match load_key(&key)? {
                KeyFile::Single(info) => info,
                KeyFile::Bundle(_) => {
                    return Err(WatermarkError::UnsupportedFormat(
                        "reference detection works on single-channel keys".into(),
                    ))
                }
            };
            let marked = read_grey(&marked)?;
            let pcs = match info.scheme {
                SchemeTag::SemiBlind => recover_components(&marked, &info)?,
                SchemeTag::HashCode => {
                    let id = id.ok_or_else(|| {
                        WatermarkError::InvalidKey("hash-code key needs --id".into())
                    })?;
                    recover_unmasked_components(&marked, &info, &identity(&id)?)?
                }
            };
            let p = read_grey(&reference)?;
            let p_star = detect_reference(&pcs, &reference_basis(&p)?)?;
            write_grey(&p_star, &out)?;
            println!("nc_reference={:.6}", normalized_correlation(&p_star, &p)?);
        }
        Command::Metrics { a, b } => {
            let (a, b) = (flatten(read_image(&a)?)?, flatten(read_image(&b)?)?);
            println!(
                "psnr_db={:.6} nc={:.6}",
                psnr(&a, &b)?,
                normalized_correlation(&a, &b)?
            );
        }
        Command::Attack { input, out, kind } => {
            let spec = AttackSpec::new(kind.parse::<AttackKind>()?, Some(seed(cli.seed)?));
            let attacked = apply_attack(&read_grey(&input)?, &spec)?;
            write_grey(&attacked, &out)?;
        }
        Command::Sweep {
            cover,
            watermark,
            alphas,
            attacks,
            out,
        } => {
            let seed = seed(cli.seed)?;
            let specs = attacks
                .iter()
                .map(|a| Ok(AttackSpec::new(a.parse::<AttackKind>()?, Some(seed))))
                .collect::<Result<Vec<_>>>()?;
            let report =
                robustness_sweep(&read_grey(&cover)?, &read_grey(&watermark)?, &alphas, &specs)?;
            let csv = report.to_csv();
            match out {
                Some(path) => write_text(&path, &csv)?,
                None => {
                    std::io::stdout().write_all(csv.as_bytes())?;
                }
            }
        }
        Command::Synth {
            kind,
            rows,
            cols,
            out,
        } => {
            if rows == 0 || cols == 0 {
                return Err(WatermarkError::InvalidParameter("image shape must be positive".into()));
            }
            let seed = seed(cli.seed)?;
            let img = match kind.as_str() {
                "portrait" => portrait(rows, cols, seed),
                "texture" => texture(rows, cols, seed),
                "silhouette" => silhouette(rows, cols, seed),
                other => {
                    return Err(WatermarkError::InvalidParameter(format!(
                        "unknown synthetic kind '{other}'"
                    )))
                }
            };
            write_grey(&img, &out)?;
        }
    }
    Ok(0)
}

fn flatten(img: Image) -> Result<Matrix> {
    match img {
        Image::Grey(m) => Ok(m),
        Image::Color(c) => {
            let (rows, cols) = c.shape();
            let data: Vec<f64> = c
                .channels()
                .iter()
                .flat_map(|ch| ch.as_slice().iter().copied())
                .collect();
            Matrix::new(rows * 3, cols, data)
        }
    }
}

fn embed_command(
    args: &EmbedArgs,
    alpha: f64,
    strategy_flag: Option<&str>,
    scheme: SchemeTag,
    id: Option<&Identity>,
) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(WatermarkError::InvalidParameter(format!(
            "--alpha must be positive, got {alpha}"
        )));
    }
    let cover = read_image(&args.cover)?;
    let mut watermark = read_grey(&args.watermark)?;
    let shape = match &cover {
        Image::Grey(m) => m.shape(),
        Image::Color(c) => c.shape(),
    };
    if args.resize && watermark.shape() != shape {
        watermark = resize_nearest(&watermark, shape.0, shape.1);
    }
    match cover {
        Image::Grey(cover) => {
            let (marked, info) = match (scheme, id) {
                (SchemeTag::HashCode, Some(id)) => embed_invisible(&cover, &watermark, id, alpha)?,
                _ => embed(&cover, &watermark, alpha)?,
            };
            let json = sideinfo_to_json(&info)?;
            write_grey(&marked, &args.out)?;
            write_text(&args.key, &json)?;
        }
        Image::Color(cover) => {
            let strategy = strategy(strategy_flag)?;
            let (marked, bundle) = embed_color(&cover, &watermark, strategy, scheme, alpha, id)?;
            let json = bundle_to_json(&bundle)?;
            write_color(&marked, &args.out)?;
            write_text(&args.key, &json)?;
        }
    }
    Ok(())
}

fn extract_any(
    marked: &Path,
    key: &Path,
    strategy_flag: Option<&str>,
    id: Option<&Identity>,
) -> Result<Matrix> {
    match (load_key(key)?, read_image(marked)?) {
        (KeyFile::Single(info), Image::Grey(m)) => extract_single(&m, &info, id),
        (KeyFile::Bundle(bundle), Image::Color(img)) => {
            let strategy = match strategy_flag {
                Some(s) => ChannelStrategy::parse(s)?,
                None => bundle.strategy,
            };
            extract_color(&img, &bundle, strategy, id)
        }
        (KeyFile::Single(_), Image::Color(_)) => Err(WatermarkError::MalformedSideInfo(
            "single-channel key used with a color image".into(),
        )),
        (KeyFile::Bundle(_), Image::Grey(_)) => Err(WatermarkError::MalformedSideInfo(
            "color key bundle used with a single-channel image".into(),
        )),
    }
}

fn extract_single(m: &Matrix, info: &SideInfo, id: Option<&Identity>) -> Result<Matrix> {
    match (info.scheme, id) {
        (SchemeTag::SemiBlind, _) => extract(m, info),
        (SchemeTag::HashCode, Some(id)) => extract_invisible(m, info, id),
        (SchemeTag::HashCode, None) => Err(WatermarkError::InvalidKey(
            "hash-code key needs an identity (use extract-hash)".into(),
        )),
    }
}
