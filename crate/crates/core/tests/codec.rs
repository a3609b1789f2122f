//! File formats and key files on disk.

use std::fs;

use svdmark::analysis::rng::uniform_matrix;
use svdmark::codec::netpbm::{decode_pgm, decode_ppm, encode_pgm, encode_ppm};
use svdmark::codec::sideinfo::{bundle_to_json, sideinfo_to_json};
use svdmark::codec::{
    load_key, load_sideinfo, read_pgm, read_ppm, read_svdf, save_bundle, save_sideinfo, write_pgm,
    write_svdf, KeyFile,
};
use svdmark::color::{embed_color, ChannelStrategy, RgbImage};
use svdmark::invisible::{embed_invisible, extract_invisible};
use svdmark::semi_blind::{embed, extract};
use svdmark::{Identity, Matrix, SchemeTag, WatermarkError};

fn bits(m: &Matrix) -> Vec<u64> {
    m.as_slice().iter().map(|x| x.to_bits()).collect()
}

#[test]
fn pgm_layout() {
    let m = Matrix::from_rows(&[&[0.0, 255.0], &[128.0, 1.0]]).unwrap();
    let bytes = encode_pgm(&m);
    assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
    assert_eq!(&bytes[bytes.len() - 4..], &[0x00, 0xFF, 0x80, 0x01]);
    assert_eq!(decode_pgm(&bytes).unwrap(), m);
    assert!(matches!(decode_pgm(&bytes[..bytes.len() - 1]), Err(WatermarkError::Codec(_))));
    assert!(matches!(
        decode_pgm(b"P5\n1 1\n65535\n\0\0"),
        Err(WatermarkError::UnsupportedFormat(_))
    ));
    assert_eq!(decode_pgm(b"P5\n# comment\n1 1\n255\n\x07").unwrap()[(0, 0)], 7.0);
}

#[test]
fn ppm_layout() {
    let one = |v| Matrix::new(1, 1, vec![v]).unwrap();
    let red = RgbImage::new(one(255.0), one(0.0), one(0.0)).unwrap();
    let bytes = encode_ppm(&red);
    assert_eq!(&bytes[bytes.len() - 3..], &[0xFF, 0x00, 0x00]);
    assert_eq!(decode_ppm(&bytes).unwrap(), red);
    assert!(matches!(
        decode_ppm(&encode_pgm(&one(3.0))),
        Err(WatermarkError::UnsupportedFormat(_))
    ));
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let integral = uniform_matrix(9, 13, 0.0, 255.0, 1).map(f64::round);
    write_pgm(&integral, dir.path().join("a.pgm")).unwrap();
    assert_eq!(read_pgm(dir.path().join("a.pgm")).unwrap(), integral);

    let real = uniform_matrix(9, 13, -1e6, 1e6, 2);
    write_svdf(&real, dir.path().join("a.svdf")).unwrap();
    assert_eq!(bits(&read_svdf(dir.path().join("a.svdf")).unwrap()), bits(&real));

    let img = RgbImage::grey(&integral);
    svdmark::codec::write_ppm(&img, dir.path().join("a.ppm")).unwrap();
    assert_eq!(read_ppm(dir.path().join("a.ppm")).unwrap(), img);
    assert!(matches!(
        read_ppm(dir.path().join("a.pgm")),
        Err(WatermarkError::UnsupportedFormat(_))
    ));
}

#[test]
fn file_mediated_extraction_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let a = uniform_matrix(32, 32, 0.0, 255.0, 3);
    let w = uniform_matrix(32, 32, 0.0, 255.0, 4);

    let (marked, info) = embed(&a, &w, 0.1).unwrap();
    write_svdf(&marked, dir.path().join("m.svdf")).unwrap();
    save_sideinfo(&info, dir.path().join("k.json")).unwrap();
    let loaded = load_sideinfo(dir.path().join("k.json")).unwrap();
    assert_eq!(loaded, info);
    let from_disk = extract(&read_svdf(dir.path().join("m.svdf")).unwrap(), &loaded).unwrap();
    assert_eq!(bits(&from_disk), bits(&extract(&marked, &info).unwrap()));

    let key = Identity::new(b"alice|1".to_vec()).unwrap();
    let (marked, info) = embed_invisible(&a, &w, &key, 0.05).unwrap();
    save_sideinfo(&info, dir.path().join("h.json")).unwrap();
    let loaded = load_sideinfo(dir.path().join("h.json")).unwrap();
    assert_eq!(
        bits(&extract_invisible(&marked, &loaded, &key).unwrap()),
        bits(&extract_invisible(&marked, &info, &key).unwrap())
    );
    let text = fs::read_to_string(dir.path().join("h.json")).unwrap();
    assert!(!text.contains("alice"));
}

#[test]
fn bundles_load_as_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let img = RgbImage::grey(&uniform_matrix(8, 8, 50.0, 200.0, 5));
    let w = uniform_matrix(8, 8, 0.0, 255.0, 6);
    let (_, bundle) =
        embed_color(&img, &w, ChannelStrategy::PerChannel, SchemeTag::SemiBlind, 0.1, None).unwrap();
    save_bundle(&bundle, dir.path().join("b.json")).unwrap();
    match load_key(dir.path().join("b.json")).unwrap() {
        KeyFile::Bundle(b) => assert_eq!(b, bundle),
        KeyFile::Single(_) => panic!("bundle loaded as a single record"),
    }
    let single = sideinfo_to_json(&bundle.records[0]).unwrap();
    assert!(bundle_to_json(&bundle).unwrap().len() > single.len());
}

#[test]
fn failed_writes_leave_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.svdf");
    assert!(matches!(
        write_svdf(&Matrix::zeros(2, 2), &target),
        Err(WatermarkError::Io(_))
    ));
    assert!(!target.exists());

    // overwriting replaces the file whole and leaves no temporaries
    let path = dir.path().join("x.svdf");
    write_svdf(&uniform_matrix(40, 40, 0.0, 1.0, 7), &path).unwrap();
    let small = Matrix::zeros(1, 1);
    write_svdf(&small, &path).unwrap();
    assert_eq!(read_svdf(&path).unwrap(), small);
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("x.svdf")]);
}

#[test]
fn malformed_key_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    fs::write(&path, "{ not json").unwrap();
    assert!(matches!(load_key(&path), Err(WatermarkError::Codec(_))));
    fs::write(&path, r#"{"version": 9}"#).unwrap();
    assert!(matches!(load_key(&path), Err(WatermarkError::UnsupportedVersion(_))));
}
