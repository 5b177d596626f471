//! Pearson correlation and the frame-level correlation table.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::taxonomy::Frame;
use crate::{Error, Result};

/// Product-moment correlation coefficient, clamped to [-1, 1].
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// A per-frame series used in the correlation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Concreteness,
    RelevanceRatio,
    F1Relevant,
    F1All,
}

/// Frame-level observations; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameObservation {
    pub frame: Frame,
    pub concreteness: Option<f64>,
    pub relevance_ratio: Option<f64>,
    pub f1_relevant: Option<f64>,
    pub f1_all: Option<f64>,
}

impl FrameObservation {
    pub fn get(&self, s: Series) -> Option<f64> {
        match s {
            Series::Concreteness => self.concreteness,
            Series::RelevanceRatio => self.relevance_ratio,
            Series::F1Relevant => self.f1_relevant,
            Series::F1All => self.f1_all,
        }
    }
}

/// The correlation pairs analysed at frame level, with reference coefficients.
pub const CORRELATION_PAIRS: [(Series, Series, f64); 5] = [
    (Series::Concreteness, Series::RelevanceRatio, 0.69),
    (Series::Concreteness, Series::F1Relevant, 0.93),
    (Series::Concreteness, Series::F1All, 0.94),
    (Series::RelevanceRatio, Series::F1Relevant, 0.81),
    (Series::RelevanceRatio, Series::F1All, 0.67),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub x: Series,
    pub y: Series,
    pub r: Option<f64>,
    pub n_frames: usize,
    /// Frames dropped because one of the two series was missing.
    pub dropped: Vec<Frame>,
    pub error: Option<String>,
    /// Reference value for the same pair.
    pub reference: f64,
}

/// Correlates every pair in [`CORRELATION_PAIRS`] over the frames where both values exist.
pub fn correlation_table(rows: &[FrameObservation]) -> Vec<CorrelationEntry> {
    CORRELATION_PAIRS
        .iter()
        .map(|&(xs, ys, reference)| {
            let mut x = Vec::new();
            let mut y = Vec::new();
            let mut dropped = Vec::new();
            for row in rows {
                match (row.get(xs), row.get(ys)) {
                    (Some(a), Some(b)) => {
                        x.push(a);
                        y.push(b);
                    }
                    _ => dropped.push(row.frame),
                }
            }
            let (r, error) = match pearson(&x, &y) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(alloc::format!("{e}"))),
            };
            CorrelationEntry { x: xs, y: ys, r, n_frames: x.len(), dropped, error, reference }
        })
        .collect()
}
