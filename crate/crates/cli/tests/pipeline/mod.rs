//! Drives the `avfusion` binary through a full synth → extract → train →
//! fuse → evaluate run inside one directory, using relative paths only.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use avfusion::data::VideoVolume;

pub const BIN: &str = env!("CARGO_BIN_EXE_avfusion");

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().expect("spawn avfusion")
}

/// Runs a stage and returns an error naming it on a nonzero exit.
pub fn stage(dir: &Path, args: &[&str]) -> Result<Output, String> {
    let out = run(dir, args);
    if out.status.success() {
        Ok(out)
    } else {
        Err(format!("`avfusion {}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

const CHANNELS: [&str; 4] = ["audio", "lbptop", "cnn", "blstm"];

/// The full pipeline. Returns the stdout of the evaluate stages.
pub fn full_pipeline(dir: &Path, info: &str, seed: u64) -> Result<Vec<String>, String> {
    let s = seed.to_string();
    let seed_of = |k: u64| (seed * 10 + k).to_string();
    for (split, n, k) in [("train", "210", 1), ("val", "105", 2), ("test", "140", 3)] {
        stage(dir, &["synth", "--out", split, "--n-clips", n, "--informativeness", info, "--seed", &seed_of(k)])?;
        stage(dir, &["extract", "--manifest", &format!("{split}/manifest.csv"), "--out-dir", &format!("feat/{split}")])?;
    }
    // a raw video volume through the LBP-TOP stage
    let volume = VideoVolume::from_fn(8, 16, 16, |t, y, x| ((t * 37 + y * 11 + x * 7 + seed as usize) % 256) as f64)
        .map_err(|e| e.to_string())?;
    volume.write(dir.join("volume.fvt")).map_err(|e| e.to_string())?;
    stage(dir, &["lbptop", "--in", "volume.fvt", "--out", "volume.lbptop.fvt"])?;
    stage(dir, &["pool", "--in", "train/clips/clip00000.cnn_scores.fvt", "--k", "7", "--out", "pooled.fvt"])?;
    stage(dir, &["pca", "fit", "--in", "feat/train/audio.fvt", "--components", "10", "--out", "models/pca_audio.json"])?;
    for split in ["train", "val", "test"] {
        stage(
            dir,
            &["pca", "apply", "--model", "models/pca_audio.json", "--in", &format!("feat/{split}/audio.fvt"), "--out", &format!("feat/{split}/audio_pca.fvt")],
        )?;
    }
    let mut val_decisions = Vec::new();
    let mut test_decisions = Vec::new();
    for c in CHANNELS {
        let model = format!("models/{c}.json");
        stage(
            dir,
            &["train-svm", "--normalize", "--in", &format!("feat/train/{c}.fvt"), "--manifest", "train/manifest.csv", "--out", &model, "--seed", &s],
        )?;
        for (split, list) in [("val", &mut val_decisions), ("test", &mut test_decisions)] {
            let out = format!("decisions/{split}_{c}.csv");
            stage(
                dir,
                &["predict-svm", "--model", &model, "--in", &format!("feat/{split}/{c}.fvt"), "--manifest", &format!("{split}/manifest.csv"), "--channel", c, "--out", &out],
            )?;
            list.push(out);
        }
    }
    let mut fit = vec!["fuse-bn", "fit", "--manifest", "val/manifest.csv", "--out", "models/bn.json", "--decisions"];
    fit.extend(val_decisions.iter().map(String::as_str));
    stage(dir, &fit)?;
    let mut infer = vec!["fuse-bn", "infer", "--model", "models/bn.json", "--out", "predictions/bn.csv", "--decisions"];
    infer.extend(test_decisions.iter().map(String::as_str));
    stage(dir, &infer)?;
    let inputs = |split: &str| -> Vec<String> {
        let mut v = Vec::new();
        for c in CHANNELS {
            v.push(format!("--{c}"));
            v.push(format!("feat/{split}/{c}.fvt"));
        }
        v.push("--manifest".into());
        v.push(format!("{split}/manifest.csv"));
        v
    };
    let train_inputs = inputs("train");
    let mut args = vec!["fuse-feat", "train", "--out", "models/joint.json", "--seed", &s];
    args.extend(train_inputs.iter().map(String::as_str));
    stage(dir, &args)?;
    let test_inputs = inputs("test");
    let mut args = vec!["fuse-feat", "predict", "--model", "models/joint.json", "--out", "predictions/joint.csv"];
    args.extend(test_inputs.iter().map(String::as_str));
    stage(dir, &args)?;
    let mut reports = Vec::new();
    for (pred, out) in [
        ("predictions/bn.csv", "reports/bn.csv"),
        ("predictions/joint.csv", "reports/joint.csv"),
        ("decisions/test_cnn.csv", "reports/cnn.csv"),
    ] {
        let o = stage(dir, &["evaluate", "--predictions", pred, "--manifest", "test/manifest.csv", "--out", out])?;
        reports.push(String::from_utf8_lossy(&o.stdout).into_owned());
    }
    stage(dir, &["island-demo", "--seed", &s, "--epochs", "60", "--out", "island.csv"])?;
    Ok(reports)
}

/// Every file under `root`, as sorted relative paths.
pub fn files(root: &Path) -> Vec<PathBuf> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}

/// Overall accuracy parsed from an evaluate report CSV.
pub fn overall_accuracy(report_csv: &Path) -> f64 {
    let text = std::fs::read_to_string(report_csv).unwrap();
    let line = text.lines().find(|l| l.starts_with("overall,")).unwrap();
    line.split(',').nth(2).unwrap().parse().unwrap()
}
