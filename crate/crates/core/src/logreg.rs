//! Multinomial logistic regression.
//!
//! Minimises mean cross-entropy plus `||W||^2 / (2 C n)` (the bias is not
//! penalised), which is the usual `C`-parameterised objective rescaled by
//! `1 / (C n)`. Optimisation is full-batch gradient descent with Armijo
//! backtracking, so fits are deterministic.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::metrics::{argmax, softmax};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    /// Inverse regularisation strength.
    pub c: f64,
    pub max_iter: usize,
    /// Stop once the largest absolute gradient entry drops below this.
    pub tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig { c: 1.0, max_iter: 1000, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub n_features: usize,
    pub n_classes: usize,
    /// Row-major `[class][feature]`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitLog {
    /// Objective value before each accepted step, plus the final value.
    pub objective: Vec<f64>,
    pub converged: bool,
}

impl LogisticRegression {
    pub fn zeros(n_features: usize, n_classes: usize) -> Self {
        LogisticRegression { n_features, n_classes, weights: vec![0.0; n_features * n_classes], bias: vec![0.0; n_classes] }
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| {
                let row = &self.weights[c * self.n_features..(c + 1) * self.n_features];
                self.bias[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.logits(x))
    }

    /// Objective and gradient (weights then bias, flattened).
    fn objective(&self, xs: &[Vec<f64>], ys: &[usize], c: f64, grad: Option<&mut Vec<f64>>) -> f64 {
        let n = xs.len() as f64;
        let f = self.n_features;
        let mut loss = 0.0;
        let mut g = grad;
        if let Some(g) = g.as_deref_mut() {
            g.clear();
            g.resize(self.weights.len() + self.bias.len(), 0.0);
        }
        for (x, &y) in xs.iter().zip(ys) {
            let p = self.predict_proba(x);
            loss -= libm::log(p[y].max(f64::MIN_POSITIVE));
            if let Some(g) = g.as_deref_mut() {
                for (cls, &pc) in p.iter().enumerate() {
                    let d = (pc - f64::from(u8::from(cls == y))) / n;
                    for (j, v) in x.iter().enumerate() {
                        g[cls * f + j] += d * v;
                    }
                    g[self.weights.len() + cls] += d;
                }
            }
        }
        let penalty = self.weights.iter().map(|w| w * w).sum::<f64>() / (2.0 * c * n);
        if let Some(g) = g {
            for (gi, w) in g.iter_mut().zip(&self.weights) {
                *gi += w / (c * n);
            }
        }
        loss / n + penalty
    }

    fn apply(&mut self, direction: &[f64], step: f64) {
        let nw = self.weights.len();
        for (w, d) in self.weights.iter_mut().zip(&direction[..nw]) {
            *w -= step * d;
        }
        for (b, d) in self.bias.iter_mut().zip(&direction[nw..]) {
            *b -= step * d;
        }
    }

    /// Fits on dense features; labels are class indices below `n_classes`.
    pub fn fit(xs: &[Vec<f64>], ys: &[usize], n_classes: usize, cfg: &LogRegConfig) -> Result<(Self, FitLog)> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
        }
        if xs.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let n_features = xs[0].len();
        if xs.iter().any(|x| x.len() != n_features) {
            return Err(Error::RaggedFeatures);
        }
        if let Some(&bad) = ys.iter().find(|&&y| y >= n_classes) {
            return Err(Error::TargetOutOfRange { target: bad, n_classes });
        }

        let mut model = Self::zeros(n_features, n_classes);
        let mut grad = Vec::new();
        let mut step: f64 = 1.0;
        let mut value = model.objective(xs, ys, cfg.c, Some(&mut grad));
        let mut log = FitLog { objective: vec![value], converged: false };
        for _ in 0..cfg.max_iter {
            let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if gmax < cfg.tol {
                log.converged = true;
                break;
            }
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            step = (step * 2.0).min(1e3);
            loop {
                let mut trial = model.clone();
                trial.apply(&grad, step);
                let trial_value = trial.objective(xs, ys, cfg.c, None);
                if trial_value <= value - 0.5 * step * gnorm2 || step < 1e-12 {
                    model = trial;
                    value = trial_value;
                    break;
                }
                step *= 0.5;
            }
            log.objective.push(value);
            value = model.objective(xs, ys, cfg.c, Some(&mut grad));
        }
        Ok((model, log))
    }
}
