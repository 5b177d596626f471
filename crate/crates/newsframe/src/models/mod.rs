//! Classifier heads, training and prediction.

pub mod loss;
mod neural;
mod persist;
mod train;

use std::path::PathBuf;
use std::sync::Arc;

use newsframe_core::logreg::{LogRegConfig, LogisticRegression};
use newsframe_core::metrics::{argmax, softmax};
use newsframe_core::sre::SreVector;
use newsframe_core::{Frame, HeadKind, ModalitySpec, Part};
use serde::{Deserialize, Serialize};

use crate::encoders::{EncoderSource, Precision};
use crate::error::{Error, Result};
use crate::imaging::{preprocess_image, ImageTensor};

pub use loss::{loss_from_logits, LossKind};
pub use neural::NeuralModel;
pub use train::train;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub seed: u64,
    pub loss: LossKind,
    /// Epochs without validation improvement before stopping (fusion only).
    pub early_stop_patience: usize,
    /// Keep fine-tuning the text encoder while training the fusion head.
    pub fusion_text_trainable: bool,
    pub fusion_dropout: f64,
    /// Dropout on the pooled text vector in text-based heads.
    pub text_head_dropout: f64,
    pub logreg: LogRegConfig,
    pub precision: Precision,
    pub text_encoder: EncoderSource,
    pub image_encoder: EncoderSource,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            batch_size: 4,
            learning_rate: 2e-5,
            weight_decay: 0.01,
            seed: 0,
            loss: LossKind::CrossEntropy,
            early_stop_patience: 5,
            fusion_text_trainable: false,
            fusion_dropout: 0.5,
            text_head_dropout: 0.1,
            logreg: LogRegConfig::default(),
            precision: Precision::F32,
            text_encoder: EncoderSource::ScratchTiny,
            image_encoder: EncoderSource::ScratchTiny,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("epochs and batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum ImageInput {
    Path(PathBuf),
    Tensor(Arc<ImageTensor>),
}

impl ImageInput {
    pub fn load(&self, article_id: &str) -> Result<Arc<ImageTensor>> {
        match self {
            ImageInput::Tensor(t) => Ok(t.clone()),
            ImageInput::Path(p) => Ok(Arc::new(preprocess_image(p, article_id)?)),
        }
    }
}

/// One model input with its gold class index.
#[derive(Debug, Clone)]
pub struct Example {
    pub article_id: String,
    pub label: usize,
    /// Assembled text for text-based parts, if any.
    pub text: Option<String>,
    pub sre: Option<SreVector>,
    /// Gold frame, used as a one-hot feature when the logistic model is
    /// conditioned on the frame label.
    pub frame: Option<Frame>,
    pub image: Option<ImageInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: Option<f64>,
    pub val_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
    /// Epoch whose weights were kept.
    pub best_epoch: Option<usize>,
    pub stopped_early: bool,
    pub warnings: Vec<String>,
    /// Log of the text fine-tuning stage preceding fusion training.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_stage: Option<Box<TrainLog>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logreg_converged: Option<bool>,
}

pub enum Model {
    /// Constant predictor returning the training-set class distribution.
    Majority {
        priors: Vec<f64>,
    },
    LogReg {
        model: LogisticRegression,
        with_frame: bool,
    },
    Neural(Box<NeuralModel>),
}

pub struct TrainedModel {
    pub spec: ModalitySpec,
    pub kind: HeadKind,
    pub config: TrainConfig,
    pub n_classes: usize,
    pub model: Model,
    pub log: TrainLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: usize,
    pub probabilities: Vec<f64>,
}

/// SRE one-hot, optionally followed by a frame one-hot.
pub fn logreg_features(ex: &Example, with_frame: bool) -> Result<Vec<f64>> {
    let sre = ex.sre.ok_or_else(|| Error::Data(format!("{}: missing SRE annotation", ex.article_id)))?;
    let mut x = sre.to_f64().to_vec();
    if with_frame {
        let f = ex.frame.ok_or_else(|| Error::Data(format!("{}: missing frame label", ex.article_id)))?;
        x.extend((0..Frame::COUNT).map(|i| f64::from(u8::from(i == f.index()))));
    }
    Ok(x)
}

/// Checks that an example carries every input its modality needs.
pub fn check_inputs(spec: &ModalitySpec, ex: &Example) -> Result<()> {
    let missing = |what: &str| Err(Error::Data(format!("{}: missing required {what} input", ex.article_id)));
    if spec.has_text() && ex.text.is_none() {
        return missing("text");
    }
    if spec.contains(Part::Sre) && ex.sre.is_none() {
        return missing("sre");
    }
    if spec.contains(Part::Image) && ex.image.is_none() {
        return missing("image");
    }
    if spec.contains(Part::Sre) && spec.contains(Part::FrameLabel) && !spec.has_content_text() && ex.frame.is_none() {
        return missing("frame label");
    }
    Ok(())
}

impl TrainedModel {
    /// Raw scores per class for a batch of examples.
    pub fn scores(&self, batch: &[&Example]) -> Result<Vec<Vec<f64>>> {
        for ex in batch {
            check_inputs(&self.spec, ex)?;
        }
        match &self.model {
            Model::Majority { priors } => {
                let s: Vec<f64> = priors.iter().map(|p| p.max(1e-300).ln()).collect();
                Ok(batch.iter().map(|_| s.clone()).collect())
            }
            Model::LogReg { model, with_frame } => batch.iter().map(|ex| Ok(model.logits(&logreg_features(ex, *with_frame)?))).collect(),
            Model::Neural(m) => m.eval_logits(batch),
        }
    }

    pub fn predict_batch(&self, batch: &[&Example]) -> Result<Vec<Prediction>> {
        Ok(self.scores(batch)?.into_iter().map(|s| Prediction { label: argmax(&s), probabilities: softmax(&s) }).collect())
    }
}

/// Label and class probabilities for one item. Ties go to the lowest class.
pub fn predict(model: &TrainedModel, item: &Example) -> Result<Prediction> {
    Ok(model.predict_batch(&[item])?.remove(0))
}

pub use persist::load_model;
