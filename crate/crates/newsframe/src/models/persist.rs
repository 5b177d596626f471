//! Trained-model directories: `model.json` plus weight files.

use std::path::Path;

use newsframe_core::logreg::LogisticRegression;
use newsframe_core::{HeadKind, ModalitySpec, Task};
use serde::{Deserialize, Serialize};

use super::neural::NeuralModel;
use super::{Model, TrainConfig, TrainLog, TrainedModel};
use crate::encoders::{ImageEncoder, TextEncoder};
use crate::error::{Error, Result};

const MANIFEST: &str = "model.json";
const HEAD: &str = "head.safetensors";
const TEXT_DIR: &str = "text_encoder";
const IMAGE_DIR: &str = "image_encoder";
const FORMAT: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelManifest {
    pub format: u32,
    pub task: Task,
    pub modality: String,
    pub kind: HeadKind,
    pub n_classes: usize,
    pub config: TrainConfig,
    pub log: TrainLog,
    pub seed: u64,
    pub text_encoder: Option<String>,
    pub image_encoder: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logreg: Option<LogisticRegression>,
    #[serde(default)]
    pub with_frame: bool,
    /// Free-form evaluation numbers attached by the caller.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<serde_json::Value>,
}

impl TrainedModel {
    pub fn manifest(&self) -> ModelManifest {
        let mut m = ModelManifest {
            format: FORMAT,
            task: self.spec.task(),
            modality: self.spec.key(),
            kind: self.kind,
            n_classes: self.n_classes,
            config: self.config.clone(),
            log: self.log.clone(),
            seed: self.config.seed,
            text_encoder: None,
            image_encoder: None,
            priors: None,
            logreg: None,
            with_frame: false,
            metrics: None,
        };
        match &self.model {
            Model::Majority { priors } => m.priors = Some(priors.clone()),
            Model::LogReg { model, with_frame } => {
                m.logreg = Some(model.clone());
                m.with_frame = *with_frame;
            }
            Model::Neural(n) => {
                m.text_encoder = n.text.as_ref().map(|t| t.identifier.clone());
                m.image_encoder = n.image.as_ref().map(|i| i.identifier.clone());
            }
        }
        m
    }

    pub fn save(&self, dir: &Path, metrics: Option<serde_json::Value>) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut manifest = self.manifest();
        manifest.metrics = metrics;
        let p = dir.join(MANIFEST);
        std::fs::write(&p, serde_json::to_vec_pretty(&manifest)?).map_err(|e| Error::io(p, e))?;
        if let Model::Neural(n) = &self.model {
            n.head_store.save(&dir.join(HEAD))?;
            if let Some(t) = &n.text {
                t.save_dir(&dir.join(TEXT_DIR))?;
            }
            if let Some(i) = &n.image {
                i.save_dir(&dir.join(IMAGE_DIR))?;
            }
        }
        Ok(())
    }
}

/// Loads a model directory written by [`TrainedModel::save`].
pub fn load_model(dir: &Path) -> Result<TrainedModel> {
    let p = dir.join(MANIFEST);
    let bytes = std::fs::read(&p).map_err(|e| Error::io(&p, e))?;
    let m: ModelManifest = serde_json::from_slice(&bytes)?;
    if m.format != FORMAT {
        return Err(Error::Config(format!("unsupported model format {}", m.format)));
    }
    let spec = ModalitySpec::parse(m.task, &m.modality)?;
    let model = match m.kind {
        HeadKind::Majority => Model::Majority { priors: m.priors.clone().ok_or_else(|| Error::Config("manifest lacks priors".into()))? },
        HeadKind::SreLogReg => Model::LogReg {
            model: m.logreg.clone().ok_or_else(|| Error::Config("manifest lacks logistic weights".into()))?,
            with_frame: m.with_frame,
        },
        kind => {
            let precision = m.config.precision;
            let text = match &m.text_encoder {
                Some(id) => Some(TextEncoder::from_dir(&dir.join(TEXT_DIR), id, precision)?),
                None => None,
            };
            let image = match &m.image_encoder {
                Some(id) => Some(ImageEncoder::from_dir(&dir.join(IMAGE_DIR), id, m.seed, precision)?),
                None => None,
            };
            let n = NeuralModel::new(kind, text, image, m.n_classes, m.seed, m.config.fusion_dropout, m.config.text_head_dropout)?;
            let report = n.head_store.load(&dir.join(HEAD))?;
            if !report.missing.is_empty() {
                return Err(Error::Config(format!("head weights lack {}", report.missing.join(", "))));
            }
            Model::Neural(Box::new(n))
        }
    };
    Ok(TrainedModel { spec, kind: m.kind, config: m.config, n_classes: m.n_classes, model, log: m.log })
}
