//! Bayesian-network decision fusion.
//!
//! A hidden emotion node with one child per channel. Each edge carries a CPT
//! `P(M = m | E = e)` describing how that channel's classifier errs. Inference
//! returns the MAP emotion given whichever channel decisions are observed;
//! unobserved channels drop out of the product.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{Channel, EmotionLabel, NUM_CLASSES};

pub type Cpt = [[f64; NUM_CLASSES]; NUM_CLASSES];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CptKind {
    /// Full smoothed confusion matrix.
    Confusion,
    /// Scalar accuracy p on the diagonal, (1 − p)/6 elsewhere.
    Accuracy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prior {
    Uniform,
    LabelFrequency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel {
    pub channel: Channel,
    /// Row = true emotion, column = measured emotion.
    pub cpt: Cpt,
}

impl MeasurementModel {
    pub fn new(channel: Channel, cpt: Cpt) -> Result<Self> {
        for (e, row) in cpt.iter().enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "{channel} CPT row {e} is not a probability vector"
                )));
            }
        }
        Ok(MeasurementModel { channel, cpt })
    }

    pub fn identity(channel: Channel) -> Self {
        let cpt = std::array::from_fn(|e| std::array::from_fn(|m| f64::from(e == m)));
        MeasurementModel { channel, cpt }
    }

    pub fn uniform(channel: Channel) -> Self {
        MeasurementModel {
            channel,
            cpt: [[1.0 / NUM_CLASSES as f64; NUM_CLASSES]; NUM_CLASSES],
        }
    }

    /// Diagonal `p`, off-diagonal `(1 − p)/6`.
    pub fn from_accuracy(channel: Channel, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("accuracy {p} outside [0, 1]")));
        }
        let off = (1.0 - p) / (NUM_CLASSES - 1) as f64;
        let cpt = std::array::from_fn(|e| std::array::from_fn(|m| if e == m { p } else { off }));
        Ok(MeasurementModel { channel, cpt })
    }
}

fn check_lengths(predictions: &[EmotionLabel], truths: &[EmotionLabel]) -> Result<()> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch(predictions.len(), truths.len()));
    }
    if predictions.is_empty() {
        return Err(Error::Empty("decision list"));
    }
    Ok(())
}

/// `cpt[e][m] = (count(truth=e, pred=m) + α) / (count(truth=e) + 7α)`.
pub fn fit_measurement_cpt(
    channel: Channel,
    predictions: &[EmotionLabel],
    truths: &[EmotionLabel],
    alpha: f64,
) -> Result<MeasurementModel> {
    check_lengths(predictions, truths)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter("smoothing must be >= 0".into()));
    }
    let mut counts = [[0usize; NUM_CLASSES]; NUM_CLASSES];
    for (p, t) in predictions.iter().zip(truths) {
        counts[t.index()][p.index()] += 1;
    }
    let mut cpt = [[0.0; NUM_CLASSES]; NUM_CLASSES];
    for e in 0..NUM_CLASSES {
        let total: usize = counts[e].iter().sum();
        let denom = total as f64 + NUM_CLASSES as f64 * alpha;
        if denom == 0.0 {
            return Err(Error::EmptyClassRow(e));
        }
        for m in 0..NUM_CLASSES {
            cpt[e][m] = (counts[e][m] as f64 + alpha) / denom;
        }
    }
    Ok(MeasurementModel { channel, cpt })
}

/// Scalar-accuracy measurement model fitted from decisions.
pub fn fit_accuracy_cpt(channel: Channel, predictions: &[EmotionLabel], truths: &[EmotionLabel]) -> Result<MeasurementModel> {
    check_lengths(predictions, truths)?;
    let correct = predictions.iter().zip(truths).filter(|(p, t)| p == t).count();
    MeasurementModel::from_accuracy(channel, correct as f64 / truths.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BnFusionModel {
    pub prior: [f64; NUM_CLASSES],
    measurements: Vec<MeasurementModel>,
    pub cpt_kind: CptKind,
    pub smoothing: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasurementJson {
    channel: Channel,
    cpt: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BnJson {
    prior: Vec<f64>,
    cpt_kind: CptKind,
    smoothing: f64,
    measurements: Vec<MeasurementJson>,
}

impl BnFusionModel {
    /// Measurements are stored in canonical channel order; each channel may appear once.
    pub fn new(prior: [f64; NUM_CLASSES], mut measurements: Vec<MeasurementModel>) -> Result<Self> {
        if prior.iter().any(|p| !p.is_finite() || *p < 0.0) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("prior must be a probability vector".into()));
        }
        if measurements.is_empty() {
            return Err(Error::Empty("measurement models"));
        }
        measurements.sort_by_key(|m| m.channel);
        if measurements.windows(2).any(|w| w[0].channel == w[1].channel) {
            return Err(Error::InvalidParameter("duplicate measurement channel".into()));
        }
        for m in &measurements {
            if m.channel == Channel::Joint {
                return Err(Error::UnknownChannel(m.channel.to_string()));
            }
            MeasurementModel::new(m.channel, m.cpt)?;
        }
        Ok(BnFusionModel {
            prior,
            measurements,
            cpt_kind: CptKind::Confusion,
            smoothing: 0.0,
        })
    }

    pub fn uniform_prior() -> [f64; NUM_CLASSES] {
        [1.0 / NUM_CLASSES as f64; NUM_CLASSES]
    }

    /// Label frequencies of `labels`, or uniform for an empty list.
    pub fn frequency_prior(labels: &[EmotionLabel]) -> [f64; NUM_CLASSES] {
        if labels.is_empty() {
            return Self::uniform_prior();
        }
        let mut p = [0.0; NUM_CLASSES];
        for l in labels {
            p[l.index()] += 1.0;
        }
        p.map(|c| c / labels.len() as f64)
    }

    /// Fits one CPT per channel from validation decisions.
    pub fn fit(
        decisions: &[(Channel, Vec<EmotionLabel>)],
        truths: &[EmotionLabel],
        kind: CptKind,
        alpha: f64,
        prior: Prior,
    ) -> Result<Self> {
        let measurements = decisions
            .iter()
            .map(|(c, preds)| match kind {
                CptKind::Confusion => fit_measurement_cpt(*c, preds, truths, alpha),
                CptKind::Accuracy => fit_accuracy_cpt(*c, preds, truths),
            })
            .collect::<Result<Vec<_>>>()?;
        let prior = match prior {
            Prior::Uniform => Self::uniform_prior(),
            Prior::LabelFrequency => Self::frequency_prior(truths),
        };
        let mut model = Self::new(prior, measurements)?;
        model.cpt_kind = kind;
        model.smoothing = alpha;
        Ok(model)
    }

    pub fn measurements(&self) -> &[MeasurementModel] {
        &self.measurements
    }

    pub fn measurement(&self, channel: Channel) -> Option<&MeasurementModel> {
        self.measurements.iter().find(|m| m.channel == channel)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = BnJson {
            prior: self.prior.to_vec(),
            cpt_kind: self.cpt_kind,
            smoothing: self.smoothing,
            measurements: self
                .measurements
                .iter()
                .map(|m| MeasurementJson {
                    channel: m.channel,
                    cpt: m.cpt.iter().flatten().copied().collect(),
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&json)? + "\n";
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let json: BnJson = serde_json::from_str(&text)?;
        let prior: [f64; NUM_CLASSES] = json
            .prior
            .try_into()
            .map_err(|_| Error::ShapeMismatch("prior must have 7 entries".into()))?;
        let measurements = json
            .measurements
            .into_iter()
            .map(|m| {
                if m.cpt.len() != NUM_CLASSES * NUM_CLASSES {
                    return Err(Error::ShapeMismatch(format!("{} CPT must have 49 entries", m.channel)));
                }
                let cpt = std::array::from_fn(|e| std::array::from_fn(|k| m.cpt[e * NUM_CLASSES + k]));
                MeasurementModel::new(m.channel, cpt)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut model = Self::new(prior, measurements)?;
        model.cpt_kind = json.cpt_kind;
        model.smoothing = json.smoothing;
        Ok(model)
    }
}

/// MAP inference over the observed channel decisions.
///
/// Factors multiply in canonical channel order regardless of the order of
/// `observed`, so any permutation of the observations gives bit-identical output.
pub fn bn_infer(model: &BnFusionModel, observed: &[(Channel, EmotionLabel)]) -> Result<(EmotionLabel, [f64; NUM_CLASSES])> {
    if observed.is_empty() {
        return Err(Error::NoObservations);
    }
    let mut by_channel: [Option<EmotionLabel>; 5] = [None; 5];
    for (c, label) in observed {
        let m = model.measurement(*c).ok_or_else(|| Error::UnknownChannel(c.to_string()))?;
        let slot = &mut by_channel[m.channel as usize];
        if slot.is_some_and(|prev| prev != *label) {
            return Err(Error::InvalidParameter(format!("conflicting observations for {c}")));
        }
        *slot = Some(*label);
    }
    let mut post = model.prior;
    for m in &model.measurements {
        if let Some(label) = by_channel[m.channel as usize] {
            for (e, p) in post.iter_mut().enumerate() {
                *p *= m.cpt[e][label.index()];
            }
        }
    }
    let total: f64 = post.iter().sum();
    if !(total > 0.0) {
        return Err(Error::AllZeroPosterior);
    }
    let post = post.map(|p| p / total);
    let best = (0..NUM_CLASSES).fold(0, |b, e| if post[e] > post[b] { e } else { b });
    Ok((EmotionLabel::new(best)?, post))
}

/// Fuses one clip's per-channel classifier decisions; `None` marks a missing channel.
pub fn bn_fusion_predict(model: &BnFusionModel, decisions: &[(Channel, Option<EmotionLabel>)]) -> Result<EmotionLabel> {
    let observed: Vec<(Channel, EmotionLabel)> = decisions.iter().filter_map(|(c, l)| l.map(|l| (*c, l))).collect();
    bn_infer(model, &observed).map(|r| r.0)
}
