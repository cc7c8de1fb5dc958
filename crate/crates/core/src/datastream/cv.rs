use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    derive_seed, minmax_normalize, stratified_kfold, Dataset, FoldSplit, MinMaxScaler, STREAM_PREDICT, STREAM_TRAIN,
};
use crate::error::{Error, Result};
use crate::learner::{FeatureMap, Representation, UpdateRule};
use crate::multiclass::{MulticlassModel, Scheme};
use crate::rulebase::RuleLayout;
use crate::scalar::Scalar;

/// Learning rates tried for the delta baseline.
pub const DEFAULT_ETA_GRID: [f64; 7] = [0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelKind {
    /// Fuzzy classifier with `m` sets per axis. `layout: None` picks the
    /// full grid for problems of at most two dimensions, DC-limited rules
    /// otherwise.
    Fuzzy { m: usize, layout: Option<RuleLayout> },
    /// Linear PA classifier on bias-augmented patterns.
    PaLinear,
    /// Linear Widrow-Hoff classifier on bias-augmented patterns.
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub scheme: Scheme,
    #[serde(flatten)]
    pub kind: ModelKind,
    /// Linear baselines see inputs mapped to `[-1, 1]` before the bias is
    /// appended. Ignored by fuzzy models.
    pub centered_linear: bool,
}

impl ModelSpec {
    /// Spec with centered linear inputs.
    pub fn new(scheme: Scheme, kind: ModelKind) -> Self {
        ModelSpec {
            scheme,
            kind,
            centered_linear: true,
        }
    }

    pub fn with_centered_linear(mut self, centered: bool) -> Self {
        self.centered_linear = centered;
        self
    }

    pub fn representation(&self, n: usize, feature_names: &[String]) -> Representation {
        match self.kind {
            ModelKind::Fuzzy { m, layout } => Representation::Fuzzy {
                n,
                m,
                layout: layout.unwrap_or(if n <= 2 {
                    RuleLayout::FullGrid
                } else {
                    RuleLayout::DcLimited
                }),
                feature_names: feature_names.to_vec(),
            },
            ModelKind::PaLinear | ModelKind::Delta => Representation::LinearBias {
                n,
                centered: self.centered_linear,
            },
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            ModelKind::Fuzzy { .. } => "Fuzzy",
            ModelKind::PaLinear => "PA",
            ModelKind::Delta => "Delta",
        };
        write!(f, "{name}({})", self.scheme)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    /// Fit min-max bounds on each training fold instead of the whole dataset.
    pub fold_local_normalization: bool,
    /// Worker threads for fold execution; 0 uses the global rayon pool.
    #[serde(skip)]
    pub threads: usize,
    pub eta_grid: Vec<f64>,
    /// Share of each training fold held out for learning-rate selection.
    pub selection_fraction: f64,
    /// Keep the trained per-fold models in the outcome.
    #[serde(skip)]
    pub keep_models: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 10,
            seed: 0,
            fold_local_normalization: false,
            threads: 1,
            eta_grid: DEFAULT_ETA_GRID.to_vec(),
            selection_fraction: 0.2,
            keep_models: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Number of `train_step` calls made on the final model.
    pub train_steps: usize,
    pub correct: usize,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CvOutcome<T> {
    pub spec: ModelSpec,
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    /// Population standard deviation over folds.
    pub std_accuracy: f64,
    pub fold_times_s: Vec<f64>,
    pub wall_time_s: f64,
    /// Trained models, one per fold, when requested.
    pub models: Vec<MulticlassModel<T>>,
}

/// Stratified k-fold cross-validation with one online epoch per fold.
///
/// Each fold gets a fresh model, sees every training pattern once in a
/// seeded random order, and is scored on the held-out fold.
pub fn run_cv<T: Scalar>(ds: &Dataset<T>, spec: &ModelSpec, opts: &CvOptions) -> Result<CvOutcome<T>> {
    if ds.num_classes() < 2 {
        return Err(Error::Config("cross-validation needs at least two classes".into()));
    }
    if spec.kind == ModelKind::Delta && opts.eta_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Config(
            "learning-rate grid must contain positive values only".into(),
        ));
    }
    if spec.kind == ModelKind::Delta && opts.eta_grid.is_empty() {
        return Err(Error::Config("learning-rate grid is empty".into()));
    }
    let started = Instant::now();
    let split = stratified_kfold(ds, opts.folds, opts.seed)?;
    let data = if opts.fold_local_normalization {
        ds.clone()
    } else {
        minmax_normalize(ds)
    };
    let repr = spec.representation(ds.dim(), &ds.feature_names);
    let features = FeatureMap::build(&repr)?;
    let ctx = FoldContext {
        data: &data,
        split: &split,
        spec,
        opts,
        repr: &repr,
        features: &features,
    };

    let run = |i: usize| -> Result<(FoldResult, Option<MulticlassModel<T>>, f64)> {
        let t0 = Instant::now();
        let (res, model) = ctx.run_fold(i)?;
        Ok((res, model, t0.elapsed().as_secs_f64()))
    };
    let results: Vec<_> = match opts.threads {
        1 => (0..split.k()).map(run).collect::<Result<_>>()?,
        0 => (0..split.k()).into_par_iter().map(run).collect::<Result<_>>()?,
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(|| (0..split.k()).into_par_iter().map(run).collect::<Result<_>>())?,
    };

    let mut folds = Vec::with_capacity(results.len());
    let mut models = Vec::new();
    let mut fold_times_s = Vec::with_capacity(results.len());
    for (res, model, secs) in results {
        folds.push(res);
        models.extend(model);
        fold_times_s.push(secs);
    }
    let accs: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / accs.len() as f64;
    Ok(CvOutcome {
        spec: *spec,
        folds,
        mean_accuracy: mean,
        std_accuracy: var.sqrt(),
        fold_times_s,
        wall_time_s: started.elapsed().as_secs_f64(),
        models,
    })
}

struct FoldContext<'a, T> {
    data: &'a Dataset<T>,
    split: &'a FoldSplit,
    spec: &'a ModelSpec,
    opts: &'a CvOptions,
    repr: &'a Representation,
    features: &'a FeatureMap,
}

type Rows<T> = Vec<(Vec<T>, usize)>;

impl<T: Scalar> FoldContext<'_, T> {
    fn run_fold(&self, i: usize) -> Result<(FoldResult, Option<MulticlassModel<T>>)> {
        let mut train_idx = self.split.train_indices(i);
        let test_idx = &self.split.folds()[i];
        let mut order_rng = ChaCha8Rng::seed_from_u64(derive_seed(self.opts.seed, STREAM_TRAIN, i as u64));
        let mut predict_rng = ChaCha8Rng::seed_from_u64(derive_seed(self.opts.seed, STREAM_PREDICT, i as u64));
        train_idx.shuffle(&mut order_rng);

        let pats = &self.data.patterns;
        let (train, test): (Rows<T>, Rows<T>) = if self.opts.fold_local_normalization {
            let scaler = MinMaxScaler::fit(self.data.dim(), train_idx.iter().map(|&j| pats[j].features.as_slice()));
            (
                train_idx
                    .iter()
                    .map(|&j| (scaler.transform(&pats[j].features), pats[j].label))
                    .collect(),
                test_idx
                    .iter()
                    .map(|&j| (scaler.transform(&pats[j].features), pats[j].label))
                    .collect(),
            )
        } else {
            (
                train_idx
                    .iter()
                    .map(|&j| (pats[j].features.clone(), pats[j].label))
                    .collect(),
                test_idx
                    .iter()
                    .map(|&j| (pats[j].features.clone(), pats[j].label))
                    .collect(),
            )
        };
        let train = self.featurize(train)?;
        let test = self.featurize(test)?;

        let (rule, learning_rate) = match self.spec.kind {
            ModelKind::Delta => {
                let eta = self.select_learning_rate(&train, &mut predict_rng)?;
                (
                    UpdateRule::Delta {
                        learning_rate: T::of(eta),
                    },
                    Some(eta),
                )
            }
            _ => (UpdateRule::PassiveAggressive, None),
        };
        let mut model = self.fresh_model(rule)?;
        let train_steps = train_epoch(&mut model, &train)?;
        let correct = count_correct(&model, &test, &mut predict_rng)?;
        let result = FoldResult {
            fold: i,
            train_size: train.len(),
            test_size: test.len(),
            train_steps,
            correct,
            accuracy: correct as f64 / test.len() as f64,
            learning_rate,
        };
        Ok((result, self.opts.keep_models.then_some(model)))
    }

    fn featurize(&self, rows: Rows<T>) -> Result<Rows<T>> {
        rows.into_iter()
            .map(|(x, y)| Ok((self.features.features(&x)?, y)))
            .collect()
    }

    fn fresh_model(&self, rule: UpdateRule<T>) -> Result<MulticlassModel<T>> {
        MulticlassModel::with_feature_map(
            self.spec.scheme,
            self.data.classes.clone(),
            self.repr.clone(),
            self.features.clone(),
            rule,
        )
    }

    /// Trains one epoch per candidate on the leading share of the shuffled
    /// training fold and keeps the rate with the best held-out accuracy
    /// (earliest grid entry on ties).
    fn select_learning_rate(&self, train: &[(Vec<T>, usize)], rng: &mut ChaCha8Rng) -> Result<f64> {
        let held = ((train.len() as f64 * self.opts.selection_fraction).round() as usize)
            .clamp(1, train.len().saturating_sub(1).max(1));
        let (fit, val) = train.split_at(train.len() - held);
        let mut best = (self.opts.eta_grid[0], -1.0);
        for &eta in &self.opts.eta_grid {
            let mut model = self.fresh_model(UpdateRule::Delta {
                learning_rate: T::of(eta),
            })?;
            train_epoch(&mut model, fit)?;
            let acc = count_correct(&model, val, rng)? as f64 / val.len() as f64;
            if acc > best.1 {
                best = (eta, acc);
            }
        }
        Ok(best.0)
    }
}

fn train_epoch<T: Scalar>(model: &mut MulticlassModel<T>, rows: &[(Vec<T>, usize)]) -> Result<usize> {
    for (f, y) in rows {
        model.train_features(f, *y)?;
    }
    Ok(rows.len())
}

fn count_correct<T: Scalar>(
    model: &MulticlassModel<T>,
    rows: &[(Vec<T>, usize)],
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    let mut correct = 0;
    for (f, y) in rows {
        if model.predict_features(f, rng)? == *y {
            correct += 1;
        }
    }
    Ok(correct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datastream::LabeledPattern;

    fn toy() -> Dataset<f64> {
        let rows = [(0.1, 0.2, 0), (0.2, 0.1, 0), (0.9, 0.8, 1), (0.8, 0.9, 1)];
        Dataset::new(
            "toy",
            rows.iter()
                .map(|&(a, b, l)| LabeledPattern {
                    features: vec![a, b],
                    label: l,
                })
                .collect(),
            vec!["a".into(), "b".into()],
            vec!["lo".into(), "hi".into()],
        )
        .unwrap()
    }

    #[test]
    fn smoke_every_model() {
        let ds = toy();
        let opts = CvOptions {
            folds: 2,
            seed: 5,
            ..CvOptions::default()
        };
        for scheme in [Scheme::Ovr, Scheme::Ovo] {
            for kind in [
                ModelKind::Fuzzy { m: 3, layout: None },
                ModelKind::PaLinear,
                ModelKind::Delta,
            ] {
                let out = run_cv(&ds, &ModelSpec::new(scheme, kind), &opts).unwrap();
                assert_eq!(out.folds.len(), 2);
                for f in &out.folds {
                    assert!((0.0..=1.0).contains(&f.accuracy));
                    assert_eq!(f.train_steps, f.train_size);
                    assert_eq!(f.learning_rate.is_some(), kind == ModelKind::Delta);
                }
            }
        }
    }

    #[test]
    fn labels() {
        assert_eq!(
            ModelSpec::new(Scheme::Ovr, ModelKind::Fuzzy { m: 3, layout: None }).to_string(),
            "Fuzzy(OvR)"
        );
        assert_eq!(ModelSpec::new(Scheme::Ovo, ModelKind::Delta).to_string(), "Delta(OvO)");
    }

    #[test]
    fn auto_layout() {
        let spec = ModelSpec::new(Scheme::Ovr, ModelKind::Fuzzy { m: 3, layout: None });
        let names: Vec<String> = (0..4).map(|i| format!("f{i}")).collect();
        assert!(matches!(
            spec.representation(2, &names[..2]),
            Representation::Fuzzy {
                layout: RuleLayout::FullGrid,
                ..
            }
        ));
        assert!(matches!(
            spec.representation(4, &names),
            Representation::Fuzzy {
                layout: RuleLayout::DcLimited,
                ..
            }
        ));
    }
}
