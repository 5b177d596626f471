//! Batched classification losses on logits.

use candle_core::{Tensor, D};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    CrossEntropy,
    Focal {
        gamma: f64,
    },
}

/// Mean loss over a batch of `[B, C]` logits.
pub fn loss_from_logits(logits: &Tensor, targets: &[usize], kind: LossKind) -> Result<Tensor> {
    let (b, c) = logits.dims2()?;
    if b != targets.len() {
        return Err(Error::Data(format!("{b} logit rows for {} targets", targets.len())));
    }
    if let Some(&t) = targets.iter().find(|&&t| t >= c) {
        return Err(newsframe_core::Error::TargetOutOfRange { target: t, n_classes: c }.into());
    }
    let idx: Vec<u32> = targets.iter().map(|&t| t as u32).collect();
    let idx = Tensor::from_vec(idx, (b, 1), logits.device())?;
    let logp = candle_nn::ops::log_softmax(logits, D::Minus1)?.gather(&idx, 1)?.squeeze(1)?;
    let per_item = match kind {
        LossKind::CrossEntropy => logp.neg()?,
        LossKind::Focal { gamma } => {
            if !gamma.is_finite() || gamma < 0.0 {
                return Err(newsframe_core::Error::InvalidGamma.into());
            }
            if gamma == 0.0 {
                logp.neg()?
            } else {
                let one_minus = logp.exp()?.neg()?.affine(1.0, 1.0)?.maximum(1e-12)?;
                one_minus.powf(gamma)?.mul(&logp)?.neg()?
            }
        }
    };
    Ok(per_item.mean_all()?)
}
