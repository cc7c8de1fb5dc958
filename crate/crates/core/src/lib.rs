//! Multi-class online fuzzy classifiers trained with Passive-Aggressive
//! updates.
//!
//! A fuzzy classifier scores a pattern by the consequent-weighted sum of rule
//! firing strengths; binary classifiers are combined into C-class models by
//! one-vs-the-rest or one-vs-one. The crate also carries the experiment
//! machinery around them: dataset ingestion and stratified cross-validation,
//! a rotating-Gaussian drift generator, and rule-importance traces.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the experiment drivers use.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datastream;
pub mod driftsim;
pub mod error;
pub mod learner;
pub mod membership;
pub mod multiclass;
pub mod report;
pub mod rulebase;
pub mod scalar;
pub mod tracker;

pub use error::{Error, Result};
pub use learner::{augment_bias, hinge_loss, BinaryLabel, FeatureMap, Representation, UpdateOutcome, UpdateRule};
pub use membership::{dc_membership, partition_labels, triangular_membership, FuzzyPartition};
pub use multiclass::{Role, Scheme, VoteTally};
pub use rulebase::{Antecedent, RuleBase, RuleLayout, Term};
pub use scalar::Scalar;

pub type OnlineBinaryClassifier = learner::OnlineBinaryClassifier<f64>;
pub type MulticlassModel = multiclass::MulticlassModel<f64>;
pub type Dataset = datastream::Dataset<f64>;
pub type LabeledPattern = datastream::LabeledPattern<f64>;
pub type RuleTrace = tracker::RuleTrace<f64>;
pub type RuleRanking = tracker::RuleRanking<f64>;
