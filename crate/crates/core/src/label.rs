//! Emotion classes and feature channels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of emotion classes.
pub const NUM_CLASSES: usize = 7;

/// One of the seven emotions, indexed in alphabetical order of the class names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmotionLabel(u8);

impl EmotionLabel {
    pub const NAMES: [&'static str; NUM_CLASSES] =
        ["Angry", "Disgust", "Fear", "Happy", "Neutral", "Sad", "Surprise"];

    pub fn new(index: usize) -> Result<Self> {
        if index < NUM_CLASSES {
            Ok(EmotionLabel(index as u8))
        } else {
            Err(Error::UnknownLabel(index.to_string()))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self.index()]
    }

    pub fn all() -> impl Iterator<Item = EmotionLabel> {
        (0..NUM_CLASSES as u8).map(EmotionLabel)
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::NAMES
            .iter()
            .position(|name| *name == s)
            .map(|i| EmotionLabel(i as u8))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl Serialize for EmotionLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EmotionLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Source of a feature vector or classifier decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Audio,
    LbpTop,
    Cnn,
    Blstm,
    Joint,
}

impl Channel {
    /// The four per-modality channels, in fusion order.
    pub const MODALITIES: [Channel; 4] = [Channel::Audio, Channel::LbpTop, Channel::Cnn, Channel::Blstm];

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Audio => "audio",
            Channel::LbpTop => "lbptop",
            Channel::Cnn => "cnn",
            Channel::Blstm => "blstm",
            Channel::Joint => "joint",
        }
    }

    /// Position within [`Channel::MODALITIES`], `None` for `Joint`.
    pub fn modality_index(self) -> Option<usize> {
        Self::MODALITIES.iter().position(|c| *c == self)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "audio" => Ok(Channel::Audio),
            "lbptop" | "lbp-top" | "lbp_top" => Ok(Channel::LbpTop),
            "cnn" => Ok(Channel::Cnn),
            "blstm" => Ok(Channel::Blstm),
            "joint" => Ok(Channel::Joint),
            other => Err(Error::UnknownChannel(other.to_string())),
        }
    }
}
