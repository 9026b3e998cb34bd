//! End-to-end CLI behavior: exit codes, manifest round-trips, and
//! byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_born-sobolev"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bscli-{}-{}", tag, std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn empty_or_bad_range_is_usage_error() {
    let dir = tmp_dir("usage");
    let status = bin()
        .args(["bounds", "--sweep", "ball", "--range", "", "--out"])
        .arg(dir.join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin()
        .args(["bounds", "--sweep", "ball", "--range", "5:1", "--out"])
        .arg(dir.join("y"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin()
        .args(["bounds", "--sweep", "sideways", "--range", "1:2", "--out"])
        .arg(dir.join("z"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bounds_flagged_rows_exit_code_4() {
    let dir = tmp_dir("flags");
    // Ball radius 3 at offset 98 pokes outside the R = 100 sphere.
    let status = bin()
        .args(["bounds", "--sweep", "ball", "--range", "1:3:2", "--lmax-init", "64", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn series_depth_above_ceiling_is_usage_error() {
    let dir = tmp_dir("budget");
    let status = bin()
        .args(["series", "--nodes", "8", "--n-terms", "9", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn series_default_scene_checks_pass() {
    let dir = tmp_dir("series");
    let status = bin()
        .args(["series", "--nodes", "32", "--n-terms", "4", "--forward-terms", "20", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let table = String::from_utf8(read(&dir.join("inverse_bounds.csv"))).unwrap();
    assert!(table.contains("preconditions_hold=true"), "{table}");
    assert!(table.lines().filter(|l| l.ends_with(",pass")).count() > 5);
    assert!(!table.contains(",fail"), "no inequality may fail on the default scene:\n{table}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invert_reruns_are_byte_identical_and_config_overrides() {
    let d1 = tmp_dir("inv1");
    let d2 = tmp_dir("inv2");
    let d3 = tmp_dir("inv3");
    let base = [
        "invert", "--setting", "one", "--aparam", "0", "--bdata", "0", "--seed", "7", "--iters",
        "3",
    ];
    assert_eq!(bin().args(base).arg("--out").arg(&d1).status().unwrap().code(), Some(0));
    assert_eq!(bin().args(base).arg("--out").arg(&d2).status().unwrap().code(), Some(0));
    assert_eq!(read(&d1.join("trace.csv")), read(&d2.join("trace.csv")));
    assert_eq!(read(&d1.join("observed_data.csv")), read(&d2.join("observed_data.csv")));
    assert_eq!(read(&d1.join("final_model.bsgf")), read(&d2.join("final_model.bsgf")));

    // Config file overrides the seed flag: different noise stream.
    let cfgfile = d3.join("override.cfg");
    std::fs::write(&cfgfile, "seed=9\nnoise=0.05\n").unwrap();
    let status = bin()
        .args(base)
        .arg("--config")
        .arg(&cfgfile)
        .arg("--out")
        .arg(&d3)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_ne!(read(&d1.join("observed_data.csv")), read(&d3.join("observed_data.csv")));
    let manifest = String::from_utf8(read(&d3.join("manifest.json"))).unwrap();
    assert!(manifest.contains("\"seed\": 9"), "{manifest}");
    for d in [d1, d2, d3] {
        std::fs::remove_dir_all(&d).ok();
    }
}

#[test]
fn manifest_rerun_reproduces_outputs() {
    let d1 = tmp_dir("mani1");
    let d2 = tmp_dir("mani2");
    let status = bin()
        .args(["bounds", "--sweep", "b", "--range", "0:1", "--lmax-init", "64", "--kind", "diffuse", "--out"])
        .arg(&d1)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let status = bin()
        .args(["rerun", "--manifest"])
        .arg(d1.join("manifest.json"))
        .arg("--out")
        .arg(&d2)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(
        read(&d1.join("bounds_diffuse_b.csv")),
        read(&d2.join("bounds_diffuse_b.csv")),
        "rerun from manifest must reproduce the table byte for byte"
    );
    std::fs::remove_dir_all(&d1).ok();
    std::fs::remove_dir_all(&d2).ok();
}

#[test]
fn series_above_radius_reports_divergence_and_skips_inverse() {
    let dir = tmp_dir("diverge");
    let status = bin()
        .args([
            "series",
            "--nodes",
            "48",
            "--contrast",
            "1.5",
            "--forward-terms",
            "20",
            "--n-terms",
            "3",
            "--out",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let fwd = String::from_utf8(read(&dir.join("forward_series.csv"))).unwrap();
    assert!(fwd.contains("forward_diverged=true"), "{fwd}");
    let inv = String::from_utf8(read(&dir.join("inverse_bounds.csv"))).unwrap();
    assert!(inv.contains("inverse_applicable=false"), "{inv}");
    std::fs::remove_dir_all(&dir).ok();
}
