//! Datasets, normalisation, stratified folds and the cross-validation
//! protocol used for the static benchmarks.

mod cv;
mod fetch;
mod load;

pub use cv::{run_cv, CvOptions, CvOutcome, FoldResult, ModelKind, ModelSpec, DEFAULT_ETA_GRID};
pub use fetch::{fetch_manifest, FetchOutcome};
pub use load::load_csv;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPattern<T> {
    pub features: Vec<T>,
    /// Index into [`Dataset::classes`].
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub name: String,
    pub patterns: Vec<LabeledPattern<T>>,
    pub feature_names: Vec<String>,
    /// Class names in first-appearance order.
    pub classes: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        name: impl Into<String>,
        patterns: Vec<LabeledPattern<T>>,
        feature_names: Vec<String>,
        classes: Vec<String>,
    ) -> Result<Self> {
        let n = feature_names.len();
        for (i, p) in patterns.iter().enumerate() {
            if p.features.len() != n {
                return Err(Error::invalid(format!(
                    "pattern {i} has {} features, expected {n}",
                    p.features.len()
                )));
            }
            if p.label >= classes.len() {
                return Err(Error::invalid(format!("pattern {i} has unknown label {}", p.label)));
            }
        }
        Ok(Dataset {
            name: name.into(),
            patterns,
            feature_names,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for p in &self.patterns {
            counts[p.label] += 1;
        }
        counts
    }
}

/// Per-feature minimum and maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler<T> {
    min: Vec<T>,
    max: Vec<T>,
}

impl<T: Scalar> MinMaxScaler<T> {
    pub fn fit<'a>(dim: usize, rows: impl IntoIterator<Item = &'a [T]>) -> Self {
        let mut min = vec![T::infinity(); dim];
        let mut max = vec![T::neg_infinity(); dim];
        for row in rows {
            for (i, &v) in row.iter().enumerate() {
                min[i] = min[i].min(v);
                max[i] = max[i].max(v);
            }
        }
        MinMaxScaler { min, max }
    }

    /// `(x − min) / (max − min)`, clamped to `[0, 1]`; constant features map to 0.
    pub fn transform(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let range = self.max[i] - self.min[i];
                if !(range > T::zero()) {
                    T::zero()
                } else {
                    ((v - self.min[i]) / range).max(T::zero()).min(T::one())
                }
            })
            .collect()
    }
}

/// Min-max scales every feature over the whole dataset.
pub fn minmax_normalize<T: Scalar>(ds: &Dataset<T>) -> Dataset<T> {
    let scaler = MinMaxScaler::fit(ds.dim(), ds.patterns.iter().map(|p| p.features.as_slice()));
    Dataset {
        name: ds.name.clone(),
        patterns: ds
            .patterns
            .iter()
            .map(|p| LabeledPattern {
                features: scaler.transform(&p.features),
                label: p.label,
            })
            .collect(),
        feature_names: ds.feature_names.clone(),
        classes: ds.classes.clone(),
    }
}

/// Disjoint test folds covering every pattern index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldSplit {
    folds: Vec<Vec<usize>>,
}

impl FoldSplit {
    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }

    pub fn k(&self) -> usize {
        self.folds.len()
    }

    /// Indices outside fold `i`, ascending.
    pub fn train_indices(&self, i: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    }
}

/// Stratified `k`-fold split: each class is shuffled with `seed` and dealt
/// round-robin, continuing the deal position from class to class.
pub fn stratified_kfold<T: Scalar>(ds: &Dataset<T>, k: usize, seed: u64) -> Result<FoldSplit> {
    if k < 2 {
        return Err(Error::Config(format!("fold count must be at least 2, got {k}")));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.num_classes()];
    for (i, p) in ds.patterns.iter().enumerate() {
        by_class[p.label].push(i);
    }
    for (c, members) in by_class.iter().enumerate() {
        if members.len() < k {
            return Err(Error::Config(format!(
                "class {:?} has {} patterns, fewer than the {k} folds requested",
                ds.classes[c],
                members.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_FOLDS, 0));
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for mut members in by_class {
        members.shuffle(&mut rng);
        for idx in members {
            folds[slot].push(idx);
            slot = (slot + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(FoldSplit { folds })
}

pub(crate) const STREAM_FOLDS: u64 = 1;
pub(crate) const STREAM_TRAIN: u64 = 2;
pub(crate) const STREAM_PREDICT: u64 = 3;
pub(crate) const STREAM_DRIFT_DATA: u64 = 4;
pub(crate) const STREAM_DRIFT_PREDICT: u64 = 5;

/// Deterministic child seed for `(stream, index)` under a master seed
/// (SplitMix64 finaliser).
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(labels: &[usize], classes: usize) -> Dataset<f64> {
        let patterns = labels
            .iter()
            .enumerate()
            .map(|(i, &label)| LabeledPattern {
                features: vec![i as f64],
                label,
            })
            .collect();
        Dataset::new(
            "toy",
            patterns,
            vec!["x1".into()],
            (0..classes).map(|c| c.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn normalize_columns() {
        let ds = Dataset::new(
            "t",
            [(2.0, 5.0, 0.0), (4.0, 5.0, 0.5), (6.0, 5.0, 1.0)]
                .iter()
                .enumerate()
                .map(|(i, &(a, b, c))| LabeledPattern {
                    features: vec![a, b, c],
                    label: i % 2,
                })
                .collect(),
            vec!["a".into(), "b".into(), "c".into()],
            vec!["p".into(), "q".into()],
        )
        .unwrap();
        let norm = minmax_normalize(&ds);
        let col = |j: usize| norm.patterns.iter().map(|p| p.features[j]).collect::<Vec<_>>();
        assert_eq!(col(0), [0.0, 0.5, 1.0]);
        assert_eq!(col(1), [0.0, 0.0, 0.0]);
        assert_eq!(col(2), [0.0, 0.5, 1.0]);
        assert_eq!(minmax_normalize(&norm).patterns[..], norm.patterns[..]);
    }

    #[test]
    fn small_exact_split() {
        let ds = toy(&[0, 0, 0, 0, 1, 1, 1, 1], 2);
        let split = stratified_kfold(&ds, 2, 3).unwrap();
        for fold in split.folds() {
            assert_eq!(fold.len(), 4);
            assert_eq!(fold.iter().filter(|&&i| ds.patterns[i].label == 0).count(), 2);
        }
    }

    #[test]
    fn too_few_members() {
        let ds = toy(&[0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1], 2);
        let err = stratified_kfold(&ds, 10, 0).unwrap_err();
        assert!(err.to_string().contains("\"0\""), "{err}");
        assert!(stratified_kfold(&ds, 1, 0).is_err());
    }

    #[test]
    fn folds_partition_and_stratify() {
        let labels: Vec<usize> = (0..97).map(|i| (i * 7 % 3).min(i % 4)).collect();
        let ds = toy(&labels, 3);
        let counts = ds.class_counts();
        for k in [2, 3, 5, 7] {
            let split = stratified_kfold(&ds, k, 11).unwrap();
            let mut all: Vec<usize> = split.folds().iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..ds.len()).collect::<Vec<_>>());
            for fold in split.folds() {
                for (c, &total) in counts.iter().enumerate() {
                    let here = fold.iter().filter(|&&i| ds.patterns[i].label == c).count() as f64;
                    assert!((here - total as f64 / k as f64).abs() < 1.0);
                }
            }
            assert_eq!(split, stratified_kfold(&ds, k, 11).unwrap());
        }
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
        assert_ne!(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
        assert_eq!(derive_seed(9, 9, 9), derive_seed(9, 9, 9));
    }
}
