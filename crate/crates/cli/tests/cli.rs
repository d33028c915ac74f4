mod pipeline;

use pipeline::{run, stage};

#[test]
fn end_to_end_on_informative_channels() {
    let dir = tempfile::tempdir().unwrap();
    let reports = pipeline::full_pipeline(dir.path(), "1,1,1,1", 0).unwrap();
    assert!(reports[0].contains("overall accuracy"));
    for name in ["bn", "joint", "cnn"] {
        let acc = pipeline::overall_accuracy(&dir.path().join(format!("reports/{name}.csv")));
        assert!(acc >= 0.95, "{name}: {acc}");
    }
    let header = std::fs::read_to_string(dir.path().join("predictions/bn.csv")).unwrap();
    assert!(header.starts_with("clip_id,predicted_label,p_Angry,"));
}

#[test]
fn fused_beats_chance_on_weak_channels() {
    let dir = tempfile::tempdir().unwrap();
    pipeline::full_pipeline(dir.path(), "0.3,0.3,0.3,0.3", 1).unwrap();
    for name in ["bn", "joint"] {
        let acc = pipeline::overall_accuracy(&dir.path().join(format!("reports/{name}.csv")));
        assert!(acc > 0.3, "{name}: {acc}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["pool", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["synth"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["fuse-bn", "fit", "--cpt", "nonsense"]).status.code(), Some(2));
}

#[test]
fn unknown_channel_in_bn_infer_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("val.csv"),
        "clip_id,channel,predicted_label\nclip00000,audio,Happy\nclip00001,audio,Sad\n",
    )
    .unwrap();
    stage(p, &["synth", "--out", "val", "--n-clips", "2"]).unwrap();
    stage(p, &["fuse-bn", "fit", "--decisions", "val.csv", "--manifest", "val/manifest.csv", "--out", "bn.json"]).unwrap();
    std::fs::write(p.join("test.csv"), "clip_id,channel,predicted_label\nx,blstm,Fear\n").unwrap();
    let out = run(p, &["fuse-bn", "infer", "--model", "bn.json", "--decisions", "test.csv", "--out", "o.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("UnknownChannel"), "{err}");
}

#[test]
fn data_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("bad.fvt"), b"NOPE\x01\x00\x00\x00").unwrap();
    let out = run(p, &["lbptop", "--in", "bad.fvt", "--out", "o.fvt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("BadMagic"));

    stage(p, &["synth", "--out", "d", "--n-clips", "5"]).unwrap();
    std::fs::write(p.join("pred.csv"), "clip_id,predicted_label\nclip00000,Happy\n").unwrap();
    let out = run(p, &["evaluate", "--predictions", "pred.csv", "--manifest", "d/manifest.csv", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no prediction for clip"));

    let out = run(p, &["synth", "--out", "e", "--informativeness", "2,0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
}
