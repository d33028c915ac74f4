use crate::error::{Error, Result};
use crate::label::Channel;

/// Segment sizes of the joint vector, concatenated in the order audio,
/// LBP-TOP, CNN, BLSTM.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JointVectorLayout {
    pub audio: usize,
    pub lbptop: usize,
    pub cnn: usize,
    pub blstm: usize,
}

impl Default for JointVectorLayout {
    fn default() -> Self {
        JointVectorLayout {
            audio: 20,
            lbptop: 150,
            cnn: 49,
            blstm: 50,
        }
    }
}

impl JointVectorLayout {
    pub fn total(&self) -> usize {
        self.audio + self.lbptop + self.cnn + self.blstm
    }

    pub fn dim(&self, channel: Channel) -> usize {
        match channel {
            Channel::Audio => self.audio,
            Channel::LbpTop => self.lbptop,
            Channel::Cnn => self.cnn,
            Channel::Blstm => self.blstm,
            Channel::Joint => self.total(),
        }
    }

    pub fn build(&self, audio: &[f64], lbptop: &[f64], cnn: &[f64], blstm: &[f64]) -> Result<Vec<f64>> {
        let parts = [(Channel::Audio, audio), (Channel::LbpTop, lbptop), (Channel::Cnn, cnn), (Channel::Blstm, blstm)];
        let mut out = Vec::with_capacity(self.total());
        for (channel, seg) in parts {
            if seg.len() != self.dim(channel) {
                return Err(Error::DimensionMismatch(format!(
                    "{channel}: expected {} values, got {}",
                    self.dim(channel),
                    seg.len()
                )));
            }
            out.extend_from_slice(seg);
        }
        Ok(out)
    }
}

/// Concatenates the four channel features under the default 20/150/49/50 layout.
pub fn build_joint_vector(audio: &[f64], lbptop: &[f64], cnn: &[f64], blstm: &[f64]) -> Result<Vec<f64>> {
    JointVectorLayout::default().build(audio, lbptop, cnn, blstm)
}
