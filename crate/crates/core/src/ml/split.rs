//! Stratified holdout and k-fold partitions.

use rand::seq::SliceRandom;

use crate::data::LabeledSet;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

fn class_indices(labels: &[u8]) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        out[usize::from(l)].push(i);
    }
    out
}

/// Stratified `(train, test)` index partition. Each class contributes
/// `round(n_class * test_fraction)` test rows, kept within `[1, n_class - 1]`.
pub fn split_indices(labels: &[u8], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if labels.is_empty() {
        return Err(Error::EmptyInput("cannot split an empty dataset".into()));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!("test fraction {test_fraction} must lie in (0, 1)")));
    }
    let mut rng = rng_from_seed(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut idx) in class_indices(labels).into_iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::Stratify(format!("class {label} has {} rows, need at least 2", idx.len())));
        }
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split(data: &LabeledSet, test_fraction: f64, seed: u64) -> Result<(LabeledSet, LabeledSet)> {
    let (train, test) = split_indices(&data.labels, test_fraction, seed)?;
    Ok((data.subset(&train), data.subset(&test)))
}

/// Stratified k-fold `(train, validation)` index pairs.
///
/// Each class is shuffled, the classes are concatenated, and rows are dealt
/// round-robin onto the folds. Dealing continues across the class boundary,
/// so fold sizes differ by at most one and per-class counts by at most one.
pub fn kfold_indices(labels: &[u8], k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::Config(format!("k = {k}, need at least 2 folds")));
    }
    if k > labels.len() {
        return Err(Error::Config(format!("k = {k} exceeds the {} available rows", labels.len())));
    }
    let mut rng = rng_from_seed(seed);
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0usize;
    for (label, mut idx) in class_indices(labels).into_iter().enumerate() {
        if idx.len() < k {
            return Err(Error::Stratify(format!("class {label} has {} rows, need at least k = {k}", idx.len())));
        }
        idx.shuffle(&mut rng);
        for i in idx {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok((0..k)
        .map(|v| {
            let train: Vec<usize> = {
                let mut t: Vec<usize> = folds.iter().enumerate().filter(|(j, _)| *j != v).flat_map(|(_, f)| f.iter().copied()).collect();
                t.sort_unstable();
                t
            };
            (train, folds[v].clone())
        })
        .collect())
}

pub fn kfold(data: &LabeledSet, k: usize, seed: u64) -> Result<Vec<(LabeledSet, LabeledSet)>> {
    Ok(kfold_indices(&data.labels, k, seed)?
        .into_iter()
        .map(|(t, v)| (data.subset(&t), data.subset(&v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn labels(pos: usize, neg: usize) -> Vec<u8> {
        let mut l = vec![1u8; pos];
        l.extend(vec![0u8; neg]);
        l
    }

    #[test]
    fn eighty_twenty_of_the_default_counts() {
        let l = labels(2442, 2383);
        let (train, test) = split_indices(&l, 0.2, 1).unwrap();
        assert_eq!((train.len(), test.len()), (3860, 965));
        let all: HashSet<_> = train.iter().chain(&test).collect();
        assert_eq!(all.len(), 4825);
        // class ratio of each part within one row of the full-set ratio
        let pos_test = test.iter().filter(|&&i| l[i] == 1).count() as f64;
        assert!((pos_test - 965.0 * 2442.0 / 4825.0).abs() <= 1.0);
        let pos_train = train.iter().filter(|&&i| l[i] == 1).count() as f64;
        assert!((pos_train - 3860.0 * 2442.0 / 4825.0).abs() <= 1.0);
    }

    #[test]
    fn fraction_bounds() {
        let l = labels(5, 5);
        assert!(matches!(split_indices(&l, 0.0, 1), Err(Error::Config(_))));
        assert!(matches!(split_indices(&l, 1.0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn tiny_class_cannot_be_stratified() {
        assert!(matches!(split_indices(&labels(1, 5), 0.2, 1), Err(Error::Stratify(_))));
    }

    #[test]
    fn split_is_deterministic() {
        let l = labels(40, 60);
        assert_eq!(split_indices(&l, 0.3, 5).unwrap(), split_indices(&l, 0.3, 5).unwrap());
    }

    #[test]
    fn five_folds_of_965() {
        let l = labels(2442, 2383);
        let folds = kfold_indices(&l, 5, 7).unwrap();
        let mut seen = HashSet::new();
        for (train, val) in &folds {
            assert_eq!(val.len(), 965);
            assert_eq!(train.len(), 3860);
            for &i in val {
                assert!(seen.insert(i), "row {i} validated twice");
            }
        }
        assert_eq!(seen.len(), 4825);
    }

    #[test]
    fn two_folds_on_four_rows() {
        // the only stratified 2-fold shapes of {1,1,0,0} put one row of each
        // class in each fold
        let l = vec![1, 1, 0, 0];
        let folds = kfold_indices(&l, 2, 3).unwrap();
        for (_, val) in &folds {
            assert_eq!(val.len(), 2);
            let pos = val.iter().filter(|&&i| l[i] == 1).count();
            assert_eq!(pos, 1);
        }
    }

    #[test]
    fn kfold_errors() {
        assert!(matches!(kfold_indices(&labels(3, 3), 1, 0), Err(Error::Config(_))));
        assert!(matches!(kfold_indices(&labels(3, 3), 7, 0), Err(Error::Config(_))));
        assert!(matches!(kfold_indices(&labels(2, 8), 3, 0), Err(Error::Stratify(_))));
    }
}
