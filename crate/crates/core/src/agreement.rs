//! Inter-coder agreement for nominal codes: percent agreement and
//! Krippendorff's alpha.
//!
//! Alpha is computed from the coincidence matrix with the nominal difference
//! function. Missing codes are allowed; an item contributes only the pairs
//! among the codes it does have, and items with fewer than two codes are not
//! pairable.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub variable_name: String,
    /// Share of items with unanimous codes among fully coded items (or among
    /// pairable items when no item is fully coded, see `percent_over_partial`).
    pub percent_agreement: f64,
    pub alpha: f64,
    pub n_items: usize,
    pub n_coders: usize,
    /// Number of pairable values (the `n` of the coincidence matrix).
    pub n_pairable: usize,
    /// Set when expected disagreement is zero and alpha is reported as 1 by convention.
    pub alpha_by_convention: bool,
    pub percent_over_partial: bool,
}

/// Computes agreement over `codings[coder][item]`, `None` marking a missing code.
pub fn agreement<L: Ord>(variable_name: &str, codings: &[Vec<Option<L>>]) -> Result<AgreementResult> {
    let n_coders = codings.len();
    if n_coders < 2 {
        return Err(Error::TooFewCoders(n_coders));
    }
    let n_items = codings[0].len();
    if codings.iter().any(|row| row.len() != n_items) {
        return Err(Error::RaggedCodings);
    }
    if n_items == 0 {
        return Err(Error::Empty("codings"));
    }

    // Dense value indices in label order.
    let mut values: BTreeMap<&L, usize> = BTreeMap::new();
    for code in codings.iter().flatten().flatten() {
        let next = values.len();
        values.entry(code).or_insert(next);
    }
    let v = values.len();
    let mut coincidence = vec![0.0f64; v * v];

    let mut unanimous_full = 0usize;
    let mut full = 0usize;
    let mut unanimous_pairable = 0usize;
    let mut pairable_items = 0usize;
    let mut unit: Vec<usize> = Vec::with_capacity(n_coders);
    for item in 0..n_items {
        unit.clear();
        unit.extend(codings.iter().filter_map(|row| row[item].as_ref()).map(|c| values[c]));
        let m = unit.len();
        if m < 2 {
            continue;
        }
        let same = unit.iter().all(|&x| x == unit[0]);
        pairable_items += 1;
        unanimous_pairable += usize::from(same);
        if m == n_coders {
            full += 1;
            unanimous_full += usize::from(same);
        }
        let weight = 1.0 / (m as f64 - 1.0);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    coincidence[unit[i] * v + unit[j]] += weight;
                }
            }
        }
    }
    if pairable_items == 0 {
        return Err(Error::NoPairableValues);
    }

    let marginals: Vec<f64> = (0..v).map(|c| (0..v).map(|k| coincidence[c * v + k]).sum()).collect();
    let n: f64 = marginals.iter().sum();
    let observed: f64 =
        (0..v).flat_map(|c| (0..v).filter(move |&k| k != c).map(move |k| (c, k))).map(|(c, k)| coincidence[c * v + k]).sum();
    let mut expected = 0.0;
    for c in 0..v {
        for k in 0..v {
            if c != k {
                expected += marginals[c] * marginals[k];
            }
        }
    }
    let (alpha, by_convention) = if expected == 0.0 { (1.0, true) } else { (1.0 - (n - 1.0) * observed / expected, false) };

    let (percent_agreement, percent_over_partial) =
        if full > 0 { (unanimous_full as f64 / full as f64, false) } else { (unanimous_pairable as f64 / pairable_items as f64, true) };

    Ok(AgreementResult {
        variable_name: String::from(variable_name),
        percent_agreement,
        alpha,
        n_items,
        n_coders,
        n_pairable: libm::round(n) as usize,
        alpha_by_convention: by_convention,
        percent_over_partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unanimous_coders_use_convention() {
        let row: Vec<Option<u8>> = vec![Some(1); 10];
        let r = agreement("x", &[row.clone(), row]).unwrap();
        assert_eq!(r.percent_agreement, 1.0);
        assert_eq!(r.alpha, 1.0);
        assert!(r.alpha_by_convention);
    }

    #[test]
    fn perfect_agreement_with_variation() {
        let row: Vec<Option<u8>> = vec![Some(1), Some(2), Some(2), Some(3)];
        let r = agreement("x", &[row.clone(), row.clone(), row]).unwrap();
        assert_eq!(r.alpha, 1.0);
        assert!(!r.alpha_by_convention);
    }

    #[test]
    fn errors() {
        let one: Vec<Vec<Option<u8>>> = vec![vec![Some(1)]];
        assert_eq!(agreement("x", &one), Err(Error::TooFewCoders(1)));
        let ragged = vec![vec![Some(1)], vec![Some(1), Some(2)]];
        assert_eq!(agreement("x", &ragged), Err(Error::RaggedCodings));
        let sparse = vec![vec![Some(1), None], vec![None, Some(2)]];
        assert_eq!(agreement("x", &sparse), Err(Error::NoPairableValues));
    }
}
