//! Binary online classifiers over an arbitrary feature vector.
//!
//! A fuzzy classifier is this learner fed with rule firing strengths; the
//! linear baselines feed it the raw pattern with a constant 1 appended.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rulebase::{RuleBase, RuleLayout};
use crate::scalar::{dot, squared_norm, Scalar};

/// Class label of a binary problem. `Positive` is "Class 1".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryLabel {
    Positive,
    Negative,
}

impl BinaryLabel {
    pub fn from_sign(v: i8) -> Result<Self> {
        match v {
            1 => Ok(BinaryLabel::Positive),
            -1 => Ok(BinaryLabel::Negative),
            _ => Err(Error::invalid(format!("binary label must be +1 or -1, got {v}"))),
        }
    }

    pub fn sign<T: Scalar>(self) -> T {
        match self {
            BinaryLabel::Positive => T::one(),
            BinaryLabel::Negative => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            BinaryLabel::Positive => BinaryLabel::Negative,
            BinaryLabel::Negative => BinaryLabel::Positive,
        }
    }
}

/// How the weights are adjusted after each training pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum UpdateRule<T> {
    PassiveAggressive,
    /// Widrow-Hoff least-mean-squares step.
    Delta {
        learning_rate: T,
    },
}

/// What a single PA step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateOutcome<T> {
    /// Margin already satisfied; weights untouched.
    Passive,
    /// Weights moved by `tau * y * f`.
    Active { tau: T },
    /// `‖f‖² = 0`: nothing to update along, weights untouched.
    Degenerate,
}

impl<T> UpdateOutcome<T> {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, UpdateOutcome::Degenerate)
    }
}

/// Feature representation a classifier was built for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Representation {
    /// Rule firing strengths of an `m`-set partition over `n` axes.
    Fuzzy {
        n: usize,
        m: usize,
        layout: RuleLayout,
        feature_names: Vec<String>,
    },
    /// Raw pattern plus a trailing bias component. With `centered`, unit
    /// inputs are first mapped to `[-1, 1]` by `2x − 1`.
    LinearBias {
        n: usize,
        #[serde(default)]
        centered: bool,
    },
    /// Caller-supplied features of fixed length.
    Raw { len: usize },
}

impl Representation {
    pub fn is_fuzzy(&self) -> bool {
        matches!(self, Representation::Fuzzy { .. })
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Representation::Fuzzy { n, .. } | Representation::LinearBias { n, .. } => *n,
            Representation::Raw { len } => *len,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::Fuzzy { n, m, layout, .. } => write!(f, "fuzzy(n={n}, m={m}, {layout})"),
            Representation::LinearBias { n, centered: false } => write!(f, "linear+bias(n={n})"),
            Representation::LinearBias { n, centered: true } => write!(f, "centered-linear+bias(n={n})"),
            Representation::Raw { len } => write!(f, "raw(len={len})"),
        }
    }
}

/// Maps an input pattern to the feature vector a classifier consumes.
#[derive(Debug, Clone)]
pub enum FeatureMap {
    Fuzzy(Arc<RuleBase>),
    LinearBias { n: usize, centered: bool },
    Raw { len: usize },
}

impl FeatureMap {
    pub fn build(repr: &Representation) -> Result<Self> {
        Ok(match repr {
            Representation::Fuzzy {
                n,
                m,
                layout,
                feature_names,
            } => {
                let rb = RuleBase::generate(*n, *m, *layout)?.with_feature_names(feature_names.clone())?;
                FeatureMap::Fuzzy(Arc::new(rb))
            }
            Representation::LinearBias { n, centered } => FeatureMap::LinearBias {
                n: *n,
                centered: *centered,
            },
            Representation::Raw { len } => FeatureMap::Raw { len: *len },
        })
    }

    /// Length of the produced feature vectors.
    pub fn len(&self) -> usize {
        match self {
            FeatureMap::Fuzzy(rb) => rb.len(),
            FeatureMap::LinearBias { n, .. } => n + 1,
            FeatureMap::Raw { len } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rule_base(&self) -> Option<&RuleBase> {
        match self {
            FeatureMap::Fuzzy(rb) => Some(rb),
            _ => None,
        }
    }

    pub fn features<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        match self {
            FeatureMap::Fuzzy(rb) => rb.membership_vector(x),
            FeatureMap::LinearBias { n, centered } => {
                check_len(x.len(), *n, "pattern")?;
                if *centered {
                    let two = T::one() + T::one();
                    let shifted: Vec<T> = x.iter().map(|&v| two * v - T::one()).collect();
                    Ok(augment_bias(&shifted))
                } else {
                    Ok(augment_bias(x))
                }
            }
            FeatureMap::Raw { len } => {
                check_len(x.len(), *len, "feature vector")?;
                Ok(x.to_vec())
            }
        }
    }
}

/// Appends the constant bias feature 1.
pub fn augment_bias<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(x.len() + 1);
    out.extend_from_slice(x);
    out.push(T::one());
    out
}

/// `max(0, 1 − y·(w·f))`.
pub fn hinge_loss<T: Scalar>(f: &[T], y: BinaryLabel, w: &[T]) -> Result<T> {
    check_len(f.len(), w.len(), "feature vector")?;
    Ok(hinge(y.sign::<T>() * dot(w, f)))
}

fn hinge<T: Scalar>(margin: T) -> T {
    if margin >= T::one() {
        T::zero()
    } else {
        T::one() - margin
    }
}

/// One Passive-Aggressive step on raw weights.
pub fn pa_step<T: Scalar>(w: &mut [T], f: &[T], y: BinaryLabel) -> Result<UpdateOutcome<T>> {
    check_len(f.len(), w.len(), "feature vector")?;
    let ys = y.sign::<T>();
    let loss = hinge(ys * dot(w, f));
    if loss == T::zero() {
        return Ok(UpdateOutcome::Passive);
    }
    let norm = squared_norm(f);
    if norm == T::zero() {
        return Ok(UpdateOutcome::Degenerate);
    }
    let tau = loss / norm;
    let step = tau * ys;
    for (wi, &fi) in w.iter_mut().zip(f) {
        *wi = *wi + step * fi;
    }
    Ok(UpdateOutcome::Active { tau })
}

/// One Widrow-Hoff step on raw weights: `w ← w + η (y − w·f) f`.
pub fn delta_step<T: Scalar>(w: &mut [T], f: &[T], y: BinaryLabel, eta: T) -> Result<()> {
    check_len(f.len(), w.len(), "feature vector")?;
    if !(eta > T::zero()) {
        return Err(Error::invalid(format!("learning rate must be positive, got {eta}")));
    }
    let residual = y.sign::<T>() - dot(w, f);
    let step = eta * residual;
    for (wi, &fi) in w.iter_mut().zip(f) {
        *wi = *wi + step * fi;
    }
    Ok(())
}

/// Binary classifier: a weight vector and the rule that updates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineBinaryClassifier<T> {
    weights: Vec<T>,
    #[serde(flatten)]
    rule: UpdateRule<T>,
    representation: Representation,
}

impl<T: Scalar> OnlineBinaryClassifier<T> {
    /// Zero-initialised classifier over `len` features.
    pub fn new(len: usize, rule: UpdateRule<T>, representation: Representation) -> Result<Self> {
        Self::from_weights(vec![T::zero(); len], rule, representation)
    }

    pub fn from_weights(weights: Vec<T>, rule: UpdateRule<T>, representation: Representation) -> Result<Self> {
        if let UpdateRule::Delta { learning_rate } = rule {
            if !(learning_rate > T::zero()) {
                return Err(Error::invalid(format!(
                    "learning rate must be positive, got {learning_rate}"
                )));
            }
        }
        Ok(OnlineBinaryClassifier {
            weights,
            rule,
            representation,
        })
    }

    /// PA classifier over caller-supplied features.
    pub fn passive_aggressive(len: usize) -> Self {
        OnlineBinaryClassifier {
            weights: vec![T::zero(); len],
            rule: UpdateRule::PassiveAggressive,
            representation: Representation::Raw { len },
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn rule(&self) -> UpdateRule<T> {
        self.rule
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn score(&self, f: &[T]) -> Result<T> {
        check_len(f.len(), self.weights.len(), "feature vector")?;
        Ok(dot(&self.weights, f))
    }

    /// Class 1 when the score is `>= 0`, Class 2 otherwise.
    pub fn predict_binary(&self, f: &[T]) -> Result<BinaryLabel> {
        Ok(label_of(self.score(f)?))
    }

    pub fn hinge_loss(&self, f: &[T], y: BinaryLabel) -> Result<T> {
        hinge_loss(f, y, &self.weights)
    }

    pub fn pa_update(&mut self, f: &[T], y: BinaryLabel) -> Result<UpdateOutcome<T>> {
        pa_step(&mut self.weights, f, y)
    }

    pub fn delta_update(&mut self, f: &[T], y: BinaryLabel, eta: T) -> Result<()> {
        delta_step(&mut self.weights, f, y, eta)
    }

    /// Applies this classifier's own update rule.
    pub fn update(&mut self, f: &[T], y: BinaryLabel) -> Result<UpdateOutcome<T>> {
        match self.rule {
            UpdateRule::PassiveAggressive => self.pa_update(f, y),
            UpdateRule::Delta { learning_rate } => {
                self.delta_update(f, y, learning_rate)?;
                Ok(UpdateOutcome::Active { tau: learning_rate })
            }
        }
    }

    /// Multiplies every weight by `factor`.
    pub fn scale_weights(&mut self, factor: T) {
        for w in &mut self.weights {
            *w = *w * factor;
        }
    }
}

pub(crate) fn label_of<T: Scalar>(score: T) -> BinaryLabel {
    if score >= T::zero() {
        BinaryLabel::Positive
    } else {
        BinaryLabel::Negative
    }
}

fn check_len(got: usize, want: usize, what: &str) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} has length {got}, expected {want}")))
    }
}
