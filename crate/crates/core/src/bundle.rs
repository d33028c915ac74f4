//! Model bundles: a JSON sidecar naming FVT1 tensor files stored beside it.
//!
//! For a sidecar `model.json`, tensor `name` lives in `model.name.fvt`. The
//! sidecar records each tensor's file name and dims plus free-form metadata.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{self, Tensor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorRef {
    pub file: String,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub kind: String,
    pub tensors: BTreeMap<String, TensorRef>,
    #[serde(default)]
    pub meta: serde_json::Value,
}

fn tensor_path(sidecar: &Path, name: &str) -> PathBuf {
    let stem = sidecar
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    sidecar.with_file_name(format!("{stem}.{name}.fvt"))
}

pub struct BundleWriter {
    path: PathBuf,
    sidecar: Sidecar,
}

impl BundleWriter {
    pub fn new(path: impl AsRef<Path>, kind: &str, meta: serde_json::Value) -> Self {
        BundleWriter {
            path: path.as_ref().to_path_buf(),
            sidecar: Sidecar {
                kind: kind.to_string(),
                tensors: BTreeMap::new(),
                meta,
            },
        }
    }

    pub fn tensor(&mut self, name: &str, dims: &[usize], values: &[f64]) -> Result<&mut Self> {
        let file = tensor_path(&self.path, name);
        tensor::write_tensor(&file, dims, values)?;
        self.sidecar.tensors.insert(
            name.to_string(),
            TensorRef {
                file: file.file_name().unwrap().to_string_lossy().into_owned(),
                dims: dims.to_vec(),
            },
        );
        Ok(self)
    }

    pub fn finish(self) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.sidecar)?;
        std::fs::write(&self.path, json + "\n").map_err(|e| Error::io(&self.path, e))
    }
}

pub struct BundleReader {
    path: PathBuf,
    pub sidecar: Sidecar,
}

impl BundleReader {
    pub fn open(path: impl AsRef<Path>, kind: &str) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let sidecar: Sidecar = serde_json::from_str(&text)?;
        if sidecar.kind != kind {
            return Err(Error::InvalidParameter(format!(
                "{} holds a {:?} model, expected {kind:?}",
                path.display(),
                sidecar.kind
            )));
        }
        Ok(BundleReader { path, sidecar })
    }

    pub fn tensor(&self, name: &str) -> Result<Tensor> {
        let r = self
            .sidecar
            .tensors
            .get(name)
            .ok_or_else(|| Error::InvalidParameter(format!("bundle lacks tensor {name:?}")))?;
        let t = tensor::read_tensor(self.path.with_file_name(&r.file))?;
        if t.dims != r.dims {
            return Err(Error::ShapeMismatch(format!(
                "tensor {name}: sidecar says {:?}, file has {:?}",
                r.dims, t.dims
            )));
        }
        Ok(t)
    }

    pub fn meta<T: serde::de::DeserializeOwned>(&self) -> Result<T> {
        Ok(serde_json::from_value(self.sidecar.meta.clone())?)
    }
}
