//! Dataset manifest CSV.
//!
//! Header: `clip_id,label,audio,lbptop_video,cnn_scores,blstm_feat`. The label
//! cell may be empty (unlabeled test clips) and any path cell may be empty
//! when that channel is absent. Relative paths resolve against the directory
//! holding the manifest.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{Channel, EmotionLabel};

pub const HEADER: [&str; 6] = ["clip_id", "label", "audio", "lbptop_video", "cnn_scores", "blstm_feat"];

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    pub clip_id: String,
    pub label: Option<EmotionLabel>,
    pub audio: Option<PathBuf>,
    pub lbptop_video: Option<PathBuf>,
    pub cnn_scores: Option<PathBuf>,
    pub blstm_feat: Option<PathBuf>,
}

impl ManifestEntry {
    pub fn path(&self, channel: Channel) -> Option<&Path> {
        match channel {
            Channel::Audio => self.audio.as_deref(),
            Channel::LbpTop => self.lbptop_video.as_deref(),
            Channel::Cnn => self.cnn_scores.as_deref(),
            Channel::Blstm => self.blstm_feat.as_deref(),
            Channel::Joint => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    clip_id: String,
    label: String,
    audio: String,
    lbptop_video: String,
    cnn_scores: String,
    blstm_feat: String,
}

impl DatasetManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Labels in entry order; fails if any entry is unlabeled.
    pub fn labels(&self) -> Result<Vec<EmotionLabel>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                e.label.ok_or_else(|| Error::MalformedRow {
                    row: i + 1,
                    reason: format!("clip {:?} has no label", e.clip_id),
                })
            })
            .collect()
    }

    pub fn position(&self, clip_id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.clip_id == clip_id)
    }

    /// Writes the manifest with paths exactly as stored.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let cell = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        for e in &self.entries {
            w.serialize(Row {
                clip_id: e.clip_id.clone(),
                label: e.label.map(|l| l.name().to_string()).unwrap_or_default(),
                audio: cell(&e.audio),
                lbptop_video: cell(&e.lbptop_video),
                cnn_scores: cell(&e.cnn_scores),
                blstm_feat: cell(&e.blstm_feat),
            })?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Loads a manifest, resolving relative paths and checking that every referenced file exists.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut manifest = parse_manifest(file, &base)?;
    for e in &manifest.entries {
        for c in Channel::MODALITIES {
            if let Some(p) = e.path(c) {
                if !p.is_file() {
                    return Err(Error::MissingFile(p.to_path_buf()));
                }
            }
        }
    }
    manifest.entries.shrink_to_fit();
    Ok(manifest)
}

/// Parses manifest CSV from a reader without touching the filesystem.
pub fn parse_manifest(reader: impl std::io::Read, base: &Path) -> Result<DatasetManifest> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::MalformedRow {
            row: 0,
            reason: format!("expected header {}", HEADER.join(",")),
        });
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        let row_data: Row = record.deserialize(Some(&headers)).map_err(|e| Error::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        if row_data.clip_id.is_empty() {
            return Err(Error::MalformedRow {
                row,
                reason: "empty clip_id".into(),
            });
        }
        if !seen.insert(row_data.clip_id.clone()) {
            return Err(Error::DuplicateClipId(row_data.clip_id));
        }
        let label = if row_data.label.is_empty() {
            None
        } else {
            Some(row_data.label.parse()?)
        };
        let resolve = |cell: &str| -> Option<PathBuf> {
            if cell.is_empty() {
                None
            } else {
                let p = Path::new(cell);
                Some(if p.is_absolute() { p.to_path_buf() } else { base.join(p) })
            }
        };
        entries.push(ManifestEntry {
            label,
            audio: resolve(&row_data.audio),
            lbptop_video: resolve(&row_data.lbptop_video),
            cnn_scores: resolve(&row_data.cnn_scores),
            blstm_feat: resolve(&row_data.blstm_feat),
            clip_id: row_data.clip_id,
        });
    }
    Ok(DatasetManifest { entries })
}
