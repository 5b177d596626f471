//! Classification metrics over zero-based class indices.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fraction of positions where `pred` equals `gold`.
pub fn micro_accuracy(gold: &[usize], pred: &[usize]) -> Result<f64> {
    check_lengths(gold, pred)?;
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(correct as f64 / gold.len() as f64)
}

fn check_lengths(gold: &[usize], pred: &[usize]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch { left: gold.len(), right: pred.len() });
    }
    if gold.is_empty() {
        return Err(Error::Empty("label sequence"));
    }
    Ok(())
}

/// One-vs-rest precision, recall and F1 of a single class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    /// Set when `precision + recall == 0`; `f1` is then reported as 0.
    pub undefined: bool,
}

impl F1Score {
    fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        let denom = precision + recall;
        F1Score {
            precision,
            recall,
            f1: if denom == 0.0 { 0.0 } else { 2.0 * precision * recall / denom },
            support: (tp + fn_) as usize,
            undefined: denom == 0.0,
        }
    }
}

/// F1 of `class` treating every other class as negative.
pub fn per_class_f1(gold: &[usize], pred: &[usize], class: usize) -> Result<F1Score> {
    check_lengths(gold, pred)?;
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for (&g, &p) in gold.iter().zip(pred) {
        match (g == class, p == class) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(F1Score::from_counts(tp, fp, fn_))
}

/// Counts indexed `[gold][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub n_classes: usize,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        ConfusionMatrix { n_classes, counts: vec![vec![0; n_classes]; n_classes] }
    }

    pub fn from_labels(gold: &[usize], pred: &[usize], n_classes: usize) -> Result<Self> {
        check_lengths(gold, pred)?;
        let mut m = Self::new(n_classes);
        for (&g, &p) in gold.iter().zip(pred) {
            m.add(g, p)?;
        }
        Ok(m)
    }

    pub fn add(&mut self, gold: usize, pred: usize) -> Result<()> {
        let n = self.n_classes;
        for c in [gold, pred] {
            if c >= n {
                return Err(Error::TargetOutOfRange { target: c, n_classes: n });
            }
        }
        self.counts[gold][pred] += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.n_classes != self.n_classes {
            return Err(Error::LengthMismatch { left: self.n_classes, right: other.n_classes });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, gold: usize) -> u64 {
        self.counts[gold].iter().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let diag: u64 = (0..self.n_classes).map(|c| self.counts[c][c]).sum();
        diag as f64 / total as f64
    }

    pub fn f1(&self, class: usize) -> F1Score {
        let tp = self.counts[class][class];
        let fp = (0..self.n_classes).filter(|&g| g != class).map(|g| self.counts[g][class]).sum();
        let fn_ = (0..self.n_classes).filter(|&p| p != class).map(|p| self.counts[class][p]).sum();
        F1Score::from_counts(tp, fp, fn_)
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&x| libm::exp(x - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::Empty("value list"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, libm::sqrt(var)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_examples() {
        assert_eq!(micro_accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(micro_accuracy(&[0, 1, 2, 3], &[0, 1, 0, 0]).unwrap(), 0.5);
        // frame ids 1,1,2,3 vs 1,2,2,2 as indices
        assert_eq!(micro_accuracy(&[0, 0, 1, 2], &[0, 1, 1, 1]).unwrap(), 0.5);
        assert!(matches!(micro_accuracy(&[0], &[0, 1]), Err(Error::LengthMismatch { .. })));
        assert_eq!(micro_accuracy(&[], &[]), Err(Error::Empty("label sequence")));
    }

    #[test]
    fn f1_examples() {
        let s = per_class_f1(&[0, 0, 1], &[0, 1, 1], 0).unwrap();
        assert_eq!(s.precision, 1.0);
        assert_eq!(s.recall, 0.5);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-15);

        let absent = per_class_f1(&[0, 1], &[0, 1], 5).unwrap();
        assert_eq!(absent.f1, 0.0);
        assert!(absent.undefined);

        let perfect = per_class_f1(&[0, 1, 1], &[0, 1, 1], 1).unwrap();
        assert_eq!(perfect.f1, 1.0);
    }

    #[test]
    fn argmax_ties_take_lowest() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
        let p = softmax(&[3.0; 9]);
        assert_eq!(argmax(&p), 0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn confusion_rows_match_support() {
        let gold = [0, 0, 1, 2, 2, 2];
        let pred = [0, 1, 1, 2, 0, 2];
        let m = ConfusionMatrix::from_labels(&gold, &pred, 3).unwrap();
        assert_eq!(m.row_sum(2), 3);
        assert_eq!(m.total(), 6);
        assert_eq!(m.accuracy(), micro_accuracy(&gold, &pred).unwrap());
        for c in 0..3 {
            assert_eq!(m.f1(c), per_class_f1(&gold, &pred, c).unwrap());
        }
    }
}
