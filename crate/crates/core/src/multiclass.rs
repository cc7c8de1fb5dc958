//! One-vs-the-Rest and One-vs-One composition of binary classifiers.
//!
//! OvR keeps one member per class and predicts the highest score. OvO keeps
//! one member per unordered pair `(a, b)`, `a < b`, where `a` plays the
//! positive role; prediction is a vote. Ties in either scheme are broken
//! uniformly at random among the tied classes.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{label_of, BinaryLabel, FeatureMap, OnlineBinaryClassifier, Representation, UpdateRule};
use crate::rulebase::RuleBase;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ovr,
    Ovo,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ovr => "OvR",
            Scheme::Ovo => "OvO",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ovr" => Ok(Scheme::Ovr),
            "ovo" => Ok(Scheme::Ovo),
            other => Err(Error::Config(format!("unknown scheme {other:?} (expected ovr or ovo)"))),
        }
    }
}

/// Which classes a member separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum Role {
    /// Class `class` versus every other class.
    Rest { class: usize },
    /// `a` (positive) versus `b` (negative), `a < b`.
    Pair { a: usize, b: usize },
}

/// Per-class vote counts of an OvO prediction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VoteTally {
    counts: Vec<usize>,
}

impl VoteTally {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Classes holding the maximum count, in index order.
    pub fn leaders(&self) -> Vec<usize> {
        let best = self.counts.iter().copied().max().unwrap_or(0);
        (0..self.counts.len()).filter(|&c| self.counts[c] == best).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member<T> {
    pub role: Role,
    pub classifier: OnlineBinaryClassifier<T>,
}

/// C-class model built from binary members that share one representation.
#[derive(Debug, Clone)]
pub struct MulticlassModel<T> {
    scheme: Scheme,
    classes: Vec<String>,
    representation: Representation,
    features: FeatureMap,
    members: Vec<Member<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ModelDocument<T> {
    schema_version: u32,
    scheme: Scheme,
    classes: Vec<String>,
    representation: Representation,
    members: Vec<Member<T>>,
}

const MODEL_SCHEMA_VERSION: u32 = 1;

impl<T: Scalar> MulticlassModel<T> {
    /// Fresh model with zero-initialised members.
    pub fn new(
        scheme: Scheme,
        classes: Vec<String>,
        representation: Representation,
        rule: UpdateRule<T>,
    ) -> Result<Self> {
        let features = FeatureMap::build(&representation)?;
        Self::with_feature_map(scheme, classes, representation, features, rule)
    }

    /// Like [`MulticlassModel::new`] but reuses an already built feature map.
    pub fn with_feature_map(
        scheme: Scheme,
        classes: Vec<String>,
        representation: Representation,
        features: FeatureMap,
        rule: UpdateRule<T>,
    ) -> Result<Self> {
        let c = classes.len();
        if c < 2 {
            return Err(Error::invalid(format!("need at least 2 classes, got {c}")));
        }
        let roles: Vec<Role> = match scheme {
            Scheme::Ovr => (0..c).map(|class| Role::Rest { class }).collect(),
            Scheme::Ovo => (0..c)
                .flat_map(|a| (a + 1..c).map(move |b| Role::Pair { a, b }))
                .collect(),
        };
        let len = features.len();
        let members = roles
            .into_iter()
            .map(|role| {
                Ok(Member {
                    role,
                    classifier: OnlineBinaryClassifier::new(len, rule, representation.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MulticlassModel {
            scheme,
            classes,
            representation,
            features,
            members,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.features
    }

    pub fn rule_base(&self) -> Option<&RuleBase> {
        self.features.rule_base()
    }

    pub fn members(&self) -> &[Member<T>] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [Member<T>] {
        &mut self.members
    }

    /// Human-readable member id: `f_<class>` or `f_<a>_<b>`.
    pub fn member_name(&self, i: usize) -> String {
        match self.members[i].role {
            Role::Rest { class } => format!("f_{}", self.classes[class]),
            Role::Pair { a, b } => format!("f_{}_{}", self.classes[a], self.classes[b]),
        }
    }

    /// Feeds one labelled pattern to every relevant member.
    ///
    /// Under OvO only the `C − 1` members whose pair contains `y` are touched.
    pub fn train_step(&mut self, x: &[T], y: usize) -> Result<()> {
        self.check_class(y)?;
        let f = self.features.features(x)?;
        self.train_features(&f, y)
    }

    /// [`MulticlassModel::train_step`] on an already computed feature vector.
    pub fn train_features(&mut self, f: &[T], y: usize) -> Result<()> {
        self.check_class(y)?;
        for member in &mut self.members {
            let label = match member.role {
                Role::Rest { class } if class == y => BinaryLabel::Positive,
                Role::Rest { .. } => BinaryLabel::Negative,
                Role::Pair { a, .. } if a == y => BinaryLabel::Positive,
                Role::Pair { b, .. } if b == y => BinaryLabel::Negative,
                Role::Pair { .. } => continue,
            };
            member.classifier.update(f, label)?;
        }
        Ok(())
    }

    /// Raw member scores, in member order.
    pub fn scores(&self, x: &[T]) -> Result<Vec<T>> {
        let f = self.features.features(x)?;
        self.scores_features(&f)
    }

    fn scores_features(&self, f: &[T]) -> Result<Vec<T>> {
        self.members.iter().map(|m| m.classifier.score(f)).collect()
    }

    pub fn predict<R: Rng + ?Sized>(&self, x: &[T], rng: &mut R) -> Result<usize> {
        let f = self.features.features(x)?;
        self.predict_features(&f, rng)
    }

    pub fn predict_features<R: Rng + ?Sized>(&self, f: &[T], rng: &mut R) -> Result<usize> {
        let scores = self.scores_features(f)?;
        let tied = match self.scheme {
            Scheme::Ovr => {
                let best = scores.iter().copied().fold(T::neg_infinity(), T::max);
                (0..scores.len()).filter(|&k| scores[k] == best).collect()
            }
            Scheme::Ovo => self.tally_scores(&scores).leaders(),
        };
        Ok(pick(&tied, rng))
    }

    /// OvO vote counts without tie-breaking.
    pub fn tally_votes(&self, x: &[T]) -> Result<VoteTally> {
        if self.scheme != Scheme::Ovo {
            return Err(Error::invalid("vote tallies exist only for one-vs-one models"));
        }
        let scores = self.scores(x)?;
        Ok(self.tally_scores(&scores))
    }

    fn tally_scores(&self, scores: &[T]) -> VoteTally {
        let mut counts = vec![0; self.classes.len()];
        for (member, &s) in self.members.iter().zip(scores) {
            if let Role::Pair { a, b } = member.role {
                match label_of(s) {
                    BinaryLabel::Positive => counts[a] += 1,
                    BinaryLabel::Negative => counts[b] += 1,
                }
            }
        }
        VoteTally { counts }
    }

    /// Multiplies every member's weights by `factor`.
    pub fn decay(&mut self, factor: T) {
        for m in &mut self.members {
            m.classifier.scale_weights(factor);
        }
    }

    fn check_class(&self, y: usize) -> Result<()> {
        if y < self.classes.len() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "class id {y} unknown; model has {} classes",
                self.classes.len()
            )))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION,
            scheme: self.scheme,
            classes: self.classes.clone(),
            representation: self.representation.clone(),
            members: self.members.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument<T> = serde_json::from_str(s)?;
        let features = FeatureMap::build(&doc.representation)?;
        let expected = match doc.scheme {
            Scheme::Ovr => doc.classes.len(),
            Scheme::Ovo => doc.classes.len() * doc.classes.len().saturating_sub(1) / 2,
        };
        if doc.members.len() != expected {
            return Err(Error::invalid(format!(
                "model lists {} members, a {} model over {} classes needs {expected}",
                doc.members.len(),
                doc.scheme,
                doc.classes.len()
            )));
        }
        if doc.members.iter().any(|m| m.classifier.len() != features.len()) {
            return Err(Error::invalid("member weight length differs from the representation"));
        }
        Ok(MulticlassModel {
            scheme: doc.scheme,
            classes: doc.classes,
            representation: doc.representation,
            features,
            members: doc.members,
        })
    }
}

fn pick<R: Rng + ?Sized>(tied: &[usize], rng: &mut R) -> usize {
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.random_range(0..tied.len())]
    }
}
