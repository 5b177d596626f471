//! Scalar classification losses on probability vectors.

use crate::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-6;

fn target_probability(probs: &[f64], target: usize) -> Result<f64> {
    if target >= probs.len() {
        return Err(Error::TargetOutOfRange { target, n_classes: probs.len() });
    }
    let valid = probs.iter().all(|p| p.is_finite() && (0.0..=1.0).contains(p));
    let sum: f64 = probs.iter().sum();
    if !valid || (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution);
    }
    Ok(probs[target])
}

/// `-ln p(target)`.
pub fn cross_entropy(probs: &[f64], target: usize) -> Result<f64> {
    let p = target_probability(probs, target)?;
    Ok(-libm::log(p))
}

/// Focal loss `(1 - p)^gamma * -ln p` of the target class probability `p`.
pub fn focal_loss(probs: &[f64], target: usize, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidGamma);
    }
    let p = target_probability(probs, target)?;
    if p == 1.0 {
        return Ok(0.0);
    }
    Ok(libm::pow(1.0 - p, gamma) * -libm::log(p))
}
