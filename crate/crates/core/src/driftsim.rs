//! Rotating-Gaussian concept drift.
//!
//! Each class emits patterns from an axis-aligned Gaussian. After every step
//! all class means rotate counterclockwise about a fixed center. The
//! experiment runner evaluates prequentially: every pattern is predicted
//! before it is used for training, then discarded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::datastream::{derive_seed, LabeledPattern, STREAM_DRIFT_DATA, STREAM_DRIFT_PREDICT};
use crate::error::{Error, Result};
use crate::learner::{Representation, UpdateRule};
use crate::multiclass::{MulticlassModel, Scheme};
use crate::rulebase::{default_feature_names, RuleLayout};
use crate::scalar::Scalar;
use crate::tracker::RuleTrace;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    /// Initial mean of each class, in class order.
    pub means0: Vec<Point>,
    /// Per-axis spread: a standard deviation, or a variance when
    /// `sigma_is_variance` is set.
    pub sigma: f64,
    pub sigma_is_variance: bool,
    pub center: Point,
    pub step_degrees: f64,
    pub patterns_per_step: usize,
    pub total_steps: usize,
    /// Factor applied to every consequent after each step; 1 disables it.
    pub decay: f64,
    pub seed: u64,
}

impl DriftConfig {
    /// Three classes on the diagonal, symmetric about (0.5, 0.5), σ = 0.1,
    /// 360 steps of 1° with 10 patterns each.
    pub fn paper_preset() -> Self {
        let r = std::f64::consts::SQRT_2;
        DriftConfig {
            means0: vec![
                [(2.0 - r) / 4.0, (2.0 - r) / 4.0],
                [0.5, 0.5],
                [(2.0 + r) / 4.0, (2.0 + r) / 4.0],
            ],
            sigma: 0.1,
            sigma_is_variance: false,
            center: [0.5, 0.5],
            step_degrees: 1.0,
            patterns_per_step: 10,
            total_steps: 360,
            decay: 1.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Standard deviation actually used for sampling.
    pub fn std_dev(&self) -> f64 {
        if self.sigma_is_variance {
            self.sigma.sqrt()
        } else {
            self.sigma
        }
    }

    pub fn total_patterns(&self) -> usize {
        self.patterns_per_step * self.total_steps
    }

    pub fn validate(&self) -> Result<()> {
        if self.means0.len() < 2 {
            return Err(Error::Config("drift needs at least two classes".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.means0.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Config("initial means must lie inside the unit square".into()));
        }
        if self.patterns_per_step == 0 {
            return Err(Error::Config("patterns per step must be at least 1".into()));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::Config(format!("decay must lie in (0, 1], got {}", self.decay)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftState {
    pub means: Vec<Point>,
    pub t: u64,
}

impl DriftState {
    pub fn initial(config: &DriftConfig) -> Self {
        DriftState {
            means: config.means0.clone(),
            t: 0,
        }
    }

    /// Rotates every mean counterclockwise by `degrees` about `center`.
    pub fn rotate(&self, degrees: f64, center: Point) -> DriftState {
        let (s, c) = degrees.to_radians().sin_cos();
        let means = self
            .means
            .iter()
            .map(|m| {
                let dx = m[0] - center[0];
                let dy = m[1] - center[1];
                [center[0] + c * dx - s * dy, center[1] + s * dx + c * dy]
            })
            .collect();
        DriftState { means, t: self.t + 1 }
    }
}

/// Draws one step's patterns: class uniform, coordinates Gaussian about the
/// class mean, clamped to `[0, 1]`.
pub fn sample_batch<T: Scalar, R: Rng + ?Sized>(
    state: &DriftState,
    config: &DriftConfig,
    rng: &mut R,
) -> Vec<LabeledPattern<T>> {
    let sd = config.std_dev();
    (0..config.patterns_per_step)
        .map(|_| {
            let label = rng.random_range(0..state.means.len());
            let mean = state.means[label];
            let features = mean
                .iter()
                .map(|&mu| {
                    let z: f64 = rng.sample(StandardNormal);
                    T::of((mu + sd * z).clamp(0.0, 1.0))
                })
                .collect();
            LabeledPattern { features, label }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct DriftReport<T> {
    pub scheme: Scheme,
    pub m: usize,
    pub config: DriftConfig,
    pub correct: usize,
    pub total: usize,
    /// Prequential accuracy of each step's batch.
    pub step_accuracy: Vec<f64>,
    pub traces: Vec<RuleTrace<T>>,
    pub model: MulticlassModel<T>,
}

impl<T> DriftReport<T> {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

/// Runs the rotating-Gaussian experiment with a full-grid fuzzy model.
pub fn run_drift_experiment<T: Scalar>(scheme: Scheme, config: &DriftConfig, m: usize) -> Result<DriftReport<T>> {
    config.validate()?;
    let classes: Vec<String> = (1..=config.means0.len()).map(|c| c.to_string()).collect();
    let repr = Representation::Fuzzy {
        n: 2,
        m,
        layout: RuleLayout::FullGrid,
        feature_names: default_feature_names(2),
    };
    let mut model = MulticlassModel::<T>::new(scheme, classes, repr, UpdateRule::PassiveAggressive)?;
    let mut traces: Vec<RuleTrace<T>> = (0..model.members().len())
        .map(|i| RuleTrace::new(model.member_name(i)))
        .collect();
    let mut data_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_DRIFT_DATA, 0));
    let mut predict_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_DRIFT_PREDICT, 0));
    let decay = T::of(config.decay);

    let mut state = DriftState::initial(config);
    let mut correct = 0;
    let mut step_accuracy = Vec::with_capacity(config.total_steps);
    for _ in 0..config.total_steps {
        let batch = sample_batch::<T, _>(&state, config, &mut data_rng);
        let mut hits = 0;
        for p in &batch {
            let f = model.feature_map().features(&p.features)?;
            if model.predict_features(&f, &mut predict_rng)? == p.label {
                hits += 1;
            }
            model.train_features(&f, p.label)?;
        }
        correct += hits;
        step_accuracy.push(hits as f64 / batch.len() as f64);
        for (trace, member) in traces.iter_mut().zip(model.members()) {
            trace.record_step(state.t, &member.classifier)?;
        }
        if config.decay < 1.0 {
            model.decay(decay);
        }
        state = state.rotate(config.step_degrees, config.center);
    }
    Ok(DriftReport {
        scheme,
        m,
        config: config.clone(),
        correct,
        total: config.total_patterns(),
        step_accuracy,
        traces,
        model,
    })
}
