//! Channel decision CSV: `clip_id,channel,predicted_label`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{Channel, EmotionLabel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub clip_id: String,
    pub channel: Channel,
    pub predicted_label: EmotionLabel,
}

pub fn write_decisions(path: impl AsRef<Path>, decisions: &[Decision]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    if decisions.is_empty() {
        w.write_record(["clip_id", "channel", "predicted_label"])?;
    }
    for d in decisions {
        w.serialize(d)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct RawDecision {
    clip_id: String,
    channel: String,
    predicted_label: String,
}

pub fn read_decisions(path: impl AsRef<Path>) -> Result<Vec<Decision>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<RawDecision>().enumerate() {
        let row = row.map_err(|e| Error::MalformedRow {
            row: i + 1,
            reason: e.to_string(),
        })?;
        out.push(Decision {
            channel: row.channel.parse()?,
            predicted_label: row.predicted_label.parse()?,
            clip_id: row.clip_id,
        });
    }
    Ok(out)
}
