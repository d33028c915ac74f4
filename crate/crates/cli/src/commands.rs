use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use avfusion::data::{Matrix, ScoreMatrix, VideoVolume};
use avfusion::eval::evaluate;
use avfusion::experiment::{run_fusion_experiment, ExperimentConfig};
use avfusion::features::{average_scores, k_average_pool, PcaModel, PoolingParams};
use avfusion::fusion::{
    bn_infer, build_joint_vector, fit_measurement_cpt, read_decisions, write_decisions, BnFusionModel, CptKind,
    Decision, FeatureFusionModel,
};
use avfusion::fusion::bn::fit_accuracy_cpt;
use avfusion::lbptop::{lbp_top_descriptor, LbpTopParams};
use avfusion::learn::{
    cluster_ratio, softmax_probe_train, svm_predict, svm_train, IslandLossParams, LinearSvmModel, ProbeOptions,
    SvmOptions,
};
use avfusion::manifest::{load_manifest, DatasetManifest};
use avfusion::synth::{gaussian_blobs_2d, synth_generate, SynthConfig};
use avfusion::tensor::{read_tensor, Tensor};
use avfusion::{Channel, EmotionLabel, NUM_CLASSES};
use serde::Deserialize;

use crate::*;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Lbptop(a) => lbptop(a),
        Command::Extract(a) => extract(a),
        Command::Pca(c) => pca(c),
        Command::Pool(a) => pool(a),
        Command::TrainSvm(a) => train_svm(a),
        Command::PredictSvm(a) => predict_svm(a),
        Command::FuseFeat(c) => fuse_feat(c),
        Command::FuseBn(c) => fuse_bn(c),
        Command::IslandDemo(a) => island_demo(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Reproduce(a) => reproduce(a),
    }
}

fn parse_channels(names: &[String]) -> Result<Vec<Channel>> {
    names
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Channel>().map_err(Into::into))
        .collect()
}

fn svm_options(a: SvmArgs) -> SvmOptions {
    SvmOptions {
        c: a.c,
        epochs: a.epochs,
        seed: a.seed,
    }
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let informativeness: [f64; 4] = a
        .informativeness
        .as_slice()
        .try_into()
        .map_err(|_| anyhow!("--informativeness needs exactly four values"))?;
    let config = SynthConfig {
        n_clips: a.n_clips,
        informativeness,
        failed_channels: parse_channels(&a.failed)?,
        seed: a.seed,
        frames: (a.frames_min, a.frames_max),
    };
    let ds = synth_generate(&config)?;
    let manifest = ds.write(&a.out)?;
    println!("wrote {} clips to {}", manifest.len(), a.out.join("manifest.csv").display());
    Ok(())
}

fn lbptop(a: LbptopArgs) -> Result<()> {
    let params = LbpTopParams {
        radius_x: a.radius_x,
        radius_y: a.radius_y,
        radius_t: a.radius_t,
        grid_rows: a.grid_rows,
        grid_cols: a.grid_cols,
        normalize_histograms: !a.no_normalize,
    };
    let volume = VideoVolume::read(&a.input)?;
    let d = lbp_top_descriptor(&volume, &params)?;
    create_parent(&a.out)?;
    avfusion::tensor::write_tensor(&a.out, &[d.values.len()], &d.values)?;
    println!("{}: {} values", a.out.display(), d.values.len());
    Ok(())
}

/// A flat feature vector: rank 1, or rank 2 with a single row.
fn as_vector(t: Tensor, path: &Path) -> Result<Vec<f64>> {
    match t.dims.as_slice() {
        [_] | [1, _] => Ok(t.values),
        dims => bail!("{}: expected a feature vector, found dims {dims:?}", path.display()),
    }
}

fn channel_features(channel: Channel, path: &Path, pooling: PoolingParams) -> Result<Vec<f64>> {
    let t = read_tensor(path)?;
    match (channel, t.dims.len()) {
        (Channel::LbpTop, 3) => {
            let v = VideoVolume::new(t.dims[0], t.dims[1], t.dims[2], t.values)?;
            Ok(lbp_top_descriptor(&v, &LbpTopParams::default())?.values)
        }
        (Channel::Cnn, 2) if t.dims[1] == NUM_CLASSES => {
            let rows = t.values.chunks(NUM_CLASSES).map(|c| std::array::from_fn(|i| c[i])).collect();
            Ok(k_average_pool(&ScoreMatrix::new(rows)?, pooling)?)
        }
        _ => as_vector(t, path),
    }
}

fn extract(a: ExtractArgs) -> Result<()> {
    let manifest = load_manifest(&a.manifest)?;
    let pooling = PoolingParams { k: a.k };
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    for channel in Channel::MODALITIES {
        let present = manifest.entries.iter().filter(|e| e.path(channel).is_some()).count();
        if present == 0 {
            continue;
        }
        if present != manifest.len() {
            bail!("channel {channel} is present for {present} of {} clips; extract needs all or none", manifest.len());
        }
        let rows = manifest
            .entries
            .iter()
            .map(|e| {
                let p = e.path(channel).expect("checked above");
                channel_features(channel, p, pooling).with_context(|| format!("clip {}", e.clip_id))
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_rows(&rows).with_context(|| format!("channel {channel}"))?;
        let out = a.out_dir.join(format!("{channel}.fvt"));
        m.write(&out)?;
        println!("{}: {} x {}", out.display(), m.rows(), m.cols());
    }
    Ok(())
}

fn pca(c: PcaCommand) -> Result<()> {
    match c {
        PcaCommand::Fit { input, components, out } => {
            let x = Matrix::read(&input)?;
            let model = PcaModel::fit(&x, components)?;
            create_parent(&out)?;
            model.save(&out)?;
            println!("{}: {} -> {} dims", out.display(), model.input_dim(), model.output_dim());
        }
        PcaCommand::Apply { model, input, out } => {
            let model = PcaModel::load(&model)?;
            let y = model.transform_rows(&Matrix::read(&input)?)?;
            create_parent(&out)?;
            y.write(&out)?;
            println!("{}: {} x {}", out.display(), y.rows(), y.cols());
        }
    }
    Ok(())
}

fn pool(a: PoolArgs) -> Result<()> {
    let stack = a.input.iter().map(ScoreMatrix::read).collect::<avfusion::Result<Vec<_>>>()?;
    let pooled = k_average_pool(&average_scores(&stack)?, PoolingParams { k: a.k })?;
    create_parent(&a.out)?;
    avfusion::tensor::write_tensor(&a.out, &[pooled.len()], &pooled)?;
    println!("{}: {} values", a.out.display(), pooled.len());
    Ok(())
}

/// Labels for every manifest row, which must line up with the matrix rows.
fn aligned_labels(manifest: &DatasetManifest, rows: usize) -> Result<Vec<EmotionLabel>> {
    if manifest.len() != rows {
        bail!("manifest lists {} clips but the feature matrix has {rows} rows", manifest.len());
    }
    Ok(manifest.labels()?)
}

fn train_svm(a: TrainSvmArgs) -> Result<()> {
    let x = Matrix::read(&a.input)?;
    let manifest = load_manifest(&a.manifest)?;
    let y = aligned_labels(&manifest, x.rows())?;
    create_parent(&a.out)?;
    if a.normalize {
        FeatureFusionModel::train(&x, &y, svm_options(a.svm))?.save(&a.out)?;
    } else {
        svm_train(&x, &y, svm_options(a.svm))?.save(&a.out)?;
    }
    println!("{}: trained on {} x {}", a.out.display(), x.rows(), x.cols());
    Ok(())
}

/// A classifier loaded from disk; normalized models carry a `<stem>.norm.json` sidecar.
enum Classifier {
    Plain(LinearSvmModel),
    Normalized(FeatureFusionModel),
}

impl Classifier {
    fn load(path: &Path) -> Result<Self> {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if path.with_file_name(format!("{stem}.norm.json")).exists() {
            Ok(Classifier::Normalized(FeatureFusionModel::load(path)?))
        } else {
            Ok(Classifier::Plain(LinearSvmModel::load(path)?))
        }
    }

    fn predict(&self, x: &[f64]) -> Result<EmotionLabel> {
        Ok(match self {
            Classifier::Plain(m) => svm_predict(m, x)?.0,
            Classifier::Normalized(m) => m.predict(x)?.0,
        })
    }
}

fn write_predictions(
    out: &Path,
    manifest: &DatasetManifest,
    channel: Channel,
    x: &Matrix,
    classify: impl Fn(&[f64]) -> Result<EmotionLabel>,
) -> Result<()> {
    if manifest.len() != x.rows() {
        bail!("manifest lists {} clips but the feature matrix has {} rows", manifest.len(), x.rows());
    }
    let decisions = manifest
        .entries
        .iter()
        .zip(x.iter_rows())
        .map(|(e, row)| {
            Ok(Decision {
                clip_id: e.clip_id.clone(),
                channel,
                predicted_label: classify(row)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    create_parent(out)?;
    write_decisions(out, &decisions)?;
    println!("{}: {} decisions ({channel})", out.display(), decisions.len());
    Ok(())
}

fn predict_svm(a: PredictSvmArgs) -> Result<()> {
    let channel: Channel = a.channel.parse()?;
    let model = Classifier::load(&a.model)?;
    let x = Matrix::read(&a.input)?;
    let manifest = load_manifest(&a.manifest)?;
    write_predictions(&a.out, &manifest, channel, &x, |r| model.predict(r))
}

fn joint_matrix(inputs: &ChannelInputs) -> Result<(Matrix, DatasetManifest)> {
    let read = |p: &PathBuf| Matrix::read(p).with_context(|| format!("reading {}", p.display()));
    let (au, lb, cn, bl) = (read(&inputs.audio)?, read(&inputs.lbptop)?, read(&inputs.cnn)?, read(&inputs.blstm)?);
    let n = au.rows();
    if [lb.rows(), cn.rows(), bl.rows()].iter().any(|r| *r != n) {
        bail!("channel matrices have different row counts");
    }
    let rows = (0..n)
        .map(|i| build_joint_vector(au.row(i), lb.row(i), cn.row(i), bl.row(i)))
        .collect::<avfusion::Result<Vec<_>>>()?;
    let manifest = load_manifest(&inputs.manifest)?;
    if manifest.len() != n {
        bail!("manifest lists {} clips but the feature matrices have {n} rows", manifest.len());
    }
    Ok((Matrix::from_rows(&rows)?, manifest))
}

fn fuse_feat(c: FuseFeatCommand) -> Result<()> {
    match c {
        FuseFeatCommand::Train { inputs, out, svm } => {
            let (x, manifest) = joint_matrix(&inputs)?;
            let y = manifest.labels()?;
            create_parent(&out)?;
            FeatureFusionModel::train(&x, &y, svm_options(svm))?.save(&out)?;
            println!("{}: trained on {} x {}", out.display(), x.rows(), x.cols());
            Ok(())
        }
        FuseFeatCommand::Predict { model, inputs, out } => {
            let model = FeatureFusionModel::load(&model)?;
            let (x, manifest) = joint_matrix(&inputs)?;
            write_predictions(&out, &manifest, Channel::Joint, &x, |r| Ok(model.predict(r)?.0))
        }
    }
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<Decision>> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_decisions(p).with_context(|| format!("reading {}", p.display()))?);
    }
    Ok(all)
}

fn fuse_bn(c: FuseBnCommand) -> Result<()> {
    match c {
        FuseBnCommand::Fit {
            decisions,
            manifest,
            out,
            alpha,
            cpt,
            prior,
        } => {
            let manifest = load_manifest(&manifest)?;
            let mut by_channel: BTreeMap<Channel, (Vec<EmotionLabel>, Vec<EmotionLabel>)> = BTreeMap::new();
            for d in read_all(&decisions)? {
                let i = manifest
                    .position(&d.clip_id)
                    .ok_or_else(|| anyhow!("decision for clip {:?} not in manifest", d.clip_id))?;
                let truth = manifest.entries[i]
                    .label
                    .ok_or_else(|| anyhow!("clip {:?} has no label", d.clip_id))?;
                let slot = by_channel.entry(d.channel).or_default();
                slot.0.push(d.predicted_label);
                slot.1.push(truth);
            }
            let kind = match cpt {
                CptArg::Confusion => CptKind::Confusion,
                CptArg::Accuracy => CptKind::Accuracy,
            };
            let fitted = by_channel
                .iter()
                .map(|(channel, (preds, truths))| match kind {
                    CptKind::Confusion => fit_measurement_cpt(*channel, preds, truths, alpha),
                    CptKind::Accuracy => fit_accuracy_cpt(*channel, preds, truths),
                })
                .collect::<avfusion::Result<Vec<_>>>()?;
            let prior = match prior {
                PriorArg::Uniform => BnFusionModel::uniform_prior(),
                PriorArg::Frequency => BnFusionModel::frequency_prior(&manifest.labels()?),
            };
            let mut model = BnFusionModel::new(prior, fitted)?;
            model.cpt_kind = kind;
            model.smoothing = alpha;
            create_parent(&out)?;
            model.save(&out)?;
            let names: Vec<&str> = by_channel.keys().map(|c| c.as_str()).collect();
            println!("{}: channels {}", out.display(), names.join(","));
            Ok(())
        }
        FuseBnCommand::Infer { model, decisions, out } => {
            let model = BnFusionModel::load(&model)?;
            let mut order: Vec<String> = Vec::new();
            let mut clips: BTreeMap<String, Vec<(Channel, EmotionLabel)>> = BTreeMap::new();
            for d in read_all(&decisions)? {
                if !clips.contains_key(&d.clip_id) {
                    order.push(d.clip_id.clone());
                }
                clips.entry(d.clip_id).or_default().push((d.channel, d.predicted_label));
            }
            create_parent(&out)?;
            let mut w = csv::Writer::from_path(&out).with_context(|| format!("writing {}", out.display()))?;
            let mut header = vec!["clip_id".to_string(), "predicted_label".to_string()];
            header.extend(EmotionLabel::NAMES.iter().map(|n| format!("p_{n}")));
            w.write_record(&header)?;
            for id in &order {
                let (label, post) = bn_infer(&model, &clips[id]).with_context(|| format!("clip {id}"))?;
                let mut rec = vec![id.clone(), label.to_string()];
                rec.extend(post.iter().map(|p| format!("{p:.17e}")));
                w.write_record(&rec)?;
            }
            w.flush()?;
            println!("{}: {} fused predictions", out.display(), order.len());
            Ok(())
        }
    }
}

fn island_demo(a: IslandDemoArgs) -> Result<()> {
    let (x, y) = gaussian_blobs_2d(50, NUM_CLASSES, 3.0, a.seed);
    let options = ProbeOptions {
        epochs: a.epochs,
        seed: a.seed,
        ..Default::default()
    };
    let island = IslandLossParams {
        lambda: a.lambda,
        lambda1: a.lambda1,
        ..Default::default()
    };
    let plain = IslandLossParams { lambda: 0.0, ..island };
    let base = softmax_probe_train(&x, &y, &plain, &options)?;
    let with = softmax_probe_train(&x, &y, &island, &options)?;
    let r0 = cluster_ratio(&base.model.embed_rows(&x), &y);
    let r1 = cluster_ratio(&with.model.embed_rows(&x), &y);
    create_parent(&a.out)?;
    let mut w = csv::Writer::from_path(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    w.write_record(["epoch", "loss_softmax", "loss_island"])?;
    for (i, (l0, l1)) in base.loss_trace.iter().zip(&with.loss_trace).enumerate() {
        w.write_record([i.to_string(), format!("{l0:.17e}"), format!("{l1:.17e}")])?;
    }
    w.flush()?;
    println!("{:<16} {:>14}", "training", "cluster ratio");
    println!("{:<16} {:>14.6}", "softmax", r0);
    println!("{:<16} {:>14.6}", format!("island λ={}", a.lambda), r1);
    Ok(())
}

#[derive(Deserialize)]
struct PredictionRow {
    clip_id: String,
    predicted_label: String,
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<()> {
    let manifest = load_manifest(&a.manifest)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&a.predictions)
        .with_context(|| format!("reading {}", a.predictions.display()))?;
    let mut predicted: BTreeMap<String, EmotionLabel> = BTreeMap::new();
    for (i, row) in rdr.deserialize::<PredictionRow>().enumerate() {
        let row = row.with_context(|| format!("prediction row {}", i + 1))?;
        if predicted.insert(row.clip_id.clone(), row.predicted_label.parse()?).is_some() {
            bail!("clip {:?} predicted more than once", row.clip_id);
        }
    }
    let mut preds = Vec::with_capacity(manifest.len());
    let mut truths = Vec::with_capacity(manifest.len());
    for e in &manifest.entries {
        let p = predicted
            .get(&e.clip_id)
            .ok_or_else(|| anyhow!("no prediction for clip {:?}", e.clip_id))?;
        let t = e.label.ok_or_else(|| anyhow!("clip {:?} has no label", e.clip_id))?;
        preds.push(*p);
        truths.push(t);
    }
    let report = evaluate(&preds, &truths)?;
    create_parent(&a.out)?;
    report.write_csv(&a.out)?;
    print!("{report}");
    Ok(())
}

fn reproduce(a: ReproduceArgs) -> Result<()> {
    let config = ExperimentConfig {
        seed: a.seed,
        failed_channels: parse_channels(&a.failed)?,
        ..Default::default()
    };
    let r = run_fusion_experiment(&config)?;
    let mut rows: Vec<(String, f64)> = Channel::MODALITIES
        .iter()
        .zip(r.channel_accuracy)
        .map(|(c, acc)| (c.to_string(), acc))
        .collect();
    rows.push(("feature fusion".into(), r.feature_fusion_accuracy));
    rows.push(("model fusion".into(), r.model_fusion_accuracy));
    println!("{:<16} {:>9}", "system", "accuracy");
    for (name, acc) in &rows {
        println!("{name:<16} {:>8.2}%", 100.0 * acc);
    }
    if let Some(out) = &a.out {
        create_parent(out)?;
        let mut w = csv::Writer::from_path(out).with_context(|| format!("writing {}", out.display()))?;
        w.write_record(["system", "accuracy"])?;
        for (name, acc) in &rows {
            w.write_record([name.clone(), format!("{acc:.6}")])?;
        }
        w.flush()?;
    }
    Ok(())
}
