//! Stratified k-fold planning.
//!
//! Members of each stratum are sorted by id, shuffled with a seeded ChaCha
//! stream and dealt round-robin onto folds. The dealing position carries over
//! from one stratum to the next, so per-stratum fold counts differ by at most
//! one and overall fold sizes stay balanced as well.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Label the folds are stratified by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StratifyBy {
    Frame,
    Relevance,
}

/// Raised when a stratum has fewer members than folds; some folds then see no
/// member of that stratum at test time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldWarning {
    pub stratum: u32,
    pub members: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratify_by: StratifyBy,
    pub assignments: BTreeMap<String, usize>,
    #[serde(default)]
    pub warnings: Vec<FoldWarning>,
}

/// Builds a stratified plan over `(id, stratum label)` pairs.
pub fn make_folds<'a, I>(items: I, k: usize, stratify_by: StratifyBy, seed: u64) -> Result<FoldPlan>
where
    I: IntoIterator<Item = (&'a str, u32)>,
{
    if k < 2 {
        return Err(Error::FoldCount(k));
    }
    let mut strata: BTreeMap<u32, Vec<&'a str>> = BTreeMap::new();
    let mut seen: BTreeMap<&'a str, ()> = BTreeMap::new();
    for (id, label) in items {
        if seen.insert(id, ()).is_some() {
            return Err(Error::DuplicateId(String::from(id)));
        }
        strata.entry(label).or_default().push(id);
    }
    if strata.is_empty() {
        return Err(Error::Empty("fold input"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut cursor = 0usize;
    for (label, members) in strata.iter_mut() {
        if members.len() < k {
            warnings.push(FoldWarning { stratum: *label, members: members.len(), k });
        }
        members.sort_unstable();
        members.shuffle(&mut rng);
        for id in members.iter() {
            assignments.insert(String::from(*id), cursor % k);
            cursor += 1;
        }
    }
    Ok(FoldPlan { k, seed, stratify_by, assignments, warnings })
}

impl FoldPlan {
    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignments.get(id).copied()
    }

    pub fn test_ids(&self, fold: usize) -> Vec<&str> {
        self.assignments.iter().filter(|(_, f)| **f == fold).map(|(id, _)| id.as_str()).collect()
    }

    pub fn train_ids(&self, fold: usize) -> Vec<&str> {
        self.assignments.iter().filter(|(_, f)| **f != fold).map(|(id, _)| id.as_str()).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.k];
        for f in self.assignments.values() {
            sizes[*f] += 1;
        }
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i:03}")).collect()
    }

    #[test]
    fn divisible_strata_fill_every_fold() {
        let ids = ids(8);
        let items: Vec<(&str, u32)> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), (i % 2) as u32 + 1)).collect();
        let plan = make_folds(items.iter().copied(), 4, StratifyBy::Frame, 3).unwrap();
        for fold in 0..4 {
            let test = plan.test_ids(fold);
            assert_eq!(test.len(), 2);
            let labels: Vec<u32> = test.iter().map(|id| items.iter().find(|(i, _)| i == id).unwrap().1).collect();
            assert!(labels.contains(&1) && labels.contains(&2));
        }
        assert!(plan.warnings.is_empty());
    }

    #[test]
    fn same_seed_same_plan() {
        let ids = ids(50);
        let items: Vec<(&str, u32)> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), (i % 3) as u32)).collect();
        let a = make_folds(items.iter().copied(), 4, StratifyBy::Frame, 7).unwrap();
        let b = make_folds(items.iter().rev().copied(), 4, StratifyBy::Frame, 7).unwrap();
        assert_eq!(a, b);
        let c = make_folds(items.iter().copied(), 4, StratifyBy::Frame, 8).unwrap();
        assert_ne!(a.assignments, c.assignments);
    }

    #[test]
    fn small_strata_warn() {
        let ids = ids(5);
        let items = vec![(ids[0].as_str(), 1), (ids[1].as_str(), 1), (ids[2].as_str(), 2)];
        let plan = make_folds(items, 4, StratifyBy::Frame, 0).unwrap();
        assert_eq!(plan.assignments.len(), 3);
        assert_eq!(plan.warnings.len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(make_folds(Vec::new(), 1, StratifyBy::Frame, 0), Err(Error::FoldCount(1)));
        assert_eq!(make_folds(Vec::new(), 4, StratifyBy::Frame, 0), Err(Error::Empty("fold input")));
        let dup = vec![("x", 1), ("x", 2)];
        assert!(matches!(make_folds(dup, 2, StratifyBy::Frame, 0), Err(Error::DuplicateId(_))));
    }
}
