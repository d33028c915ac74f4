//! Synthetic four-channel datasets with tunable per-channel informativeness.
//!
//! Every clip draws a label uniformly from the seven classes. Vector channels
//! (audio, LBP-TOP, BLSTM) emit `scale·info·e_label + N(0, I)`, where
//! `e_label` is the unit vector on the coordinate equal to the class index.
//! The CNN channel emits a T×7 matrix of per-frame softmax scores whose
//! logits are `scale·info·onehot(label)` plus a clip-level and a frame-level
//! N(0, I) offset. A failed channel is generated with informativeness 0, which
//! makes it independent of the label. Channel noise is independent across
//! channels given the label.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{Matrix, ScoreMatrix};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::features::pooling::{k_average_pool, PoolingParams};
use crate::fusion::joint::JointVectorLayout;
use crate::label::{Channel, EmotionLabel, NUM_CLASSES};
use crate::manifest::{DatasetManifest, ManifestEntry};

/// Mean offset at informativeness 1 for the vector channels.
pub const VECTOR_SCALE: f64 = 6.0;
/// Logit offset at informativeness 1 for the CNN channel.
pub const CNN_SCALE: f64 = 8.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n_clips: usize,
    /// Audio, LBP-TOP, CNN, BLSTM; each in [0, 1].
    pub informativeness: [f64; 4],
    pub failed_channels: Vec<Channel>,
    pub seed: u64,
    /// Inclusive frame-count range of the CNN score matrices.
    pub frames: (usize, usize),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_clips: 100,
            informativeness: [1.0; 4],
            failed_channels: Vec::new(),
            seed: 0,
            frames: (4, 40),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.informativeness.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter("informativeness must lie in [0, 1]".into()));
        }
        if self.frames.0 == 0 || self.frames.0 > self.frames.1 {
            return Err(Error::InvalidParameter("frame range must be non-empty and start at >= 1".into()));
        }
        if self.failed_channels.contains(&Channel::Joint) {
            return Err(Error::UnknownChannel("joint".into()));
        }
        Ok(())
    }

    fn effective_info(&self, channel: Channel) -> f64 {
        if self.failed_channels.contains(&channel) {
            0.0
        } else {
            self.informativeness[channel.modality_index().unwrap()]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthClip {
    pub clip_id: String,
    pub label: EmotionLabel,
    pub audio: Vec<f64>,
    pub lbptop: Vec<f64>,
    pub cnn_scores: ScoreMatrix,
    pub blstm: Vec<f64>,
}

/// Clip-level features ready for classification: the CNN scores pooled to 49 dims.
#[derive(Clone, Debug, PartialEq)]
pub struct ClipFeatures {
    pub audio: Vec<f64>,
    pub lbptop: Vec<f64>,
    pub cnn: Vec<f64>,
    pub blstm: Vec<f64>,
}

impl ClipFeatures {
    pub fn channel(&self, channel: Channel) -> &[f64] {
        match channel {
            Channel::Audio => &self.audio,
            Channel::LbpTop => &self.lbptop,
            Channel::Cnn => &self.cnn,
            Channel::Blstm => &self.blstm,
            Channel::Joint => panic!("joint vector is built, not stored"),
        }
    }

    pub fn joint(&self, layout: &JointVectorLayout) -> Result<Vec<f64>> {
        layout.build(&self.audio, &self.lbptop, &self.cnn, &self.blstm)
    }
}

impl SynthClip {
    pub fn features(&self, pooling: PoolingParams) -> Result<ClipFeatures> {
        Ok(ClipFeatures {
            audio: self.audio.clone(),
            lbptop: self.lbptop.clone(),
            cnn: k_average_pool(&self.cnn_scores, pooling)?,
            blstm: self.blstm.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthDataset {
    pub clips: Vec<SynthClip>,
}

fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize, label: usize, shift: f64) -> Vec<f64> {
    (0..dim)
        .map(|k| {
            let z: f64 = rng.sample(StandardNormal);
            if k == label % dim {
                z + shift
            } else {
                z
            }
        })
        .collect()
}

fn cnn_scores(rng: &mut ChaCha8Rng, frames: usize, label: usize, shift: f64) -> Result<ScoreMatrix> {
    let clip: [f64; NUM_CLASSES] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let rows = (0..frames)
        .map(|_| {
            let logits: [f64; NUM_CLASSES] = std::array::from_fn(|c| {
                let z: f64 = rng.sample(StandardNormal);
                clip[c] + z + if c == label { shift } else { 0.0 }
            });
            let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e = logits.map(|l| (l - m).exp());
            let s: f64 = e.iter().sum();
            e.map(|v| v / s)
        })
        .collect();
    ScoreMatrix::new(rows)
}

fn generate_clip(config: &SynthConfig, layout: &JointVectorLayout, index: usize) -> Result<SynthClip> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let label = rng.random_range(0..NUM_CLASSES);
    let frames = rng.random_range(config.frames.0..=config.frames.1);
    let audio = gaussian_vector(&mut rng, layout.audio, label, VECTOR_SCALE * config.effective_info(Channel::Audio));
    let lbptop = gaussian_vector(&mut rng, layout.lbptop, label, VECTOR_SCALE * config.effective_info(Channel::LbpTop));
    let cnn = cnn_scores(&mut rng, frames, label, CNN_SCALE * config.effective_info(Channel::Cnn))?;
    let blstm = gaussian_vector(&mut rng, layout.blstm, label, VECTOR_SCALE * config.effective_info(Channel::Blstm));
    Ok(SynthClip {
        clip_id: format!("clip{index:05}"),
        label: EmotionLabel::new(label)?,
        audio,
        lbptop,
        cnn_scores: cnn,
        blstm,
    })
}

pub fn synth_generate(config: &SynthConfig) -> Result<SynthDataset> {
    synth_generate_with(config, Execution::default())
}

/// Each clip uses its own ChaCha stream, so output is independent of the execution policy.
pub fn synth_generate_with(config: &SynthConfig, exec: Execution) -> Result<SynthDataset> {
    config.validate()?;
    let layout = JointVectorLayout::default();
    let clips = exec
        .map(config.n_clips, |i| generate_clip(config, &layout, i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SynthDataset { clips })
}

impl SynthDataset {
    pub fn labels(&self) -> Vec<EmotionLabel> {
        self.clips.iter().map(|c| c.label).collect()
    }

    pub fn features(&self, pooling: PoolingParams) -> Result<Vec<ClipFeatures>> {
        self.clips.iter().map(|c| c.features(pooling)).collect()
    }

    /// Writes `clips/<id>.<channel>.fvt` files and `manifest.csv` under `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<DatasetManifest> {
        let dir = dir.as_ref();
        let clips_dir = dir.join("clips");
        std::fs::create_dir_all(&clips_dir).map_err(|e| Error::io(&clips_dir, e))?;
        let mut entries = Vec::with_capacity(self.clips.len());
        for c in &self.clips {
            let rel = |suffix: &str| Path::new("clips").join(format!("{}.{suffix}.fvt", c.clip_id));
            let (a, l, s, b) = (rel("audio"), rel("lbptop"), rel("cnn_scores"), rel("blstm"));
            Matrix::from_rows(&[&c.audio])?.write(dir.join(&a))?;
            crate::tensor::write_tensor(dir.join(&l), &[c.lbptop.len()], &c.lbptop)?;
            c.cnn_scores.write(dir.join(&s))?;
            crate::tensor::write_tensor(dir.join(&b), &[c.blstm.len()], &c.blstm)?;
            entries.push(ManifestEntry {
                clip_id: c.clip_id.clone(),
                label: Some(c.label),
                audio: Some(a),
                lbptop_video: Some(l),
                cnn_scores: Some(s),
                blstm_feat: Some(b),
            });
        }
        let manifest = DatasetManifest { entries };
        manifest.save(dir.join("manifest.csv"))?;
        Ok(manifest)
    }
}

/// 2-D Gaussian blobs for the island-loss demonstration: class `j` centered at
/// `(spacing·(j − (classes−1)/2), 0)` with unit isotropic noise.
pub fn gaussian_blobs_2d(per_class: usize, classes: usize, spacing: f64, seed: u64) -> (Matrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(per_class * classes);
    let mut labels = Vec::with_capacity(per_class * classes);
    let mid = (classes as f64 - 1.0) / 2.0;
    for i in 0..per_class * classes {
        let j = i % classes;
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        rows.push(vec![spacing * (j as f64 - mid) + zx, zy]);
        labels.push(j);
    }
    (Matrix::from_rows(&rows).expect("uniform rows"), labels)
}
