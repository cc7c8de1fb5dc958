//! Rule-importance reporting.
//!
//! A rule with a large positive consequent is representative of the
//! positive class of its classifier, one with a strongly negative consequent
//! of the negative class. This module ranks rules by consequent and records
//! how the extreme rules move over time.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::OnlineBinaryClassifier;
use crate::rulebase::{RuleBase, Term};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Largest,
    Smallest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedRule<T> {
    pub index: usize,
    pub description: String,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleRanking<T> {
    pub direction: Direction,
    pub entries: Vec<RankedRule<T>>,
}

/// The `k` rules with the largest (or smallest) consequents, ties broken
/// by rule index.
pub fn top_rules<T: Scalar>(
    clf: &OnlineBinaryClassifier<T>,
    rb: &RuleBase,
    k: usize,
    direction: Direction,
) -> Result<RuleRanking<T>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if !clf.representation().is_fuzzy() {
        return Err(Error::invalid(format!(
            "classifier uses a {} representation and has no rules to rank",
            clf.representation()
        )));
    }
    if clf.len() != rb.len() {
        return Err(Error::invalid(format!(
            "classifier has {} consequents but the rule base has {} rules",
            clf.len(),
            rb.len()
        )));
    }
    let w = clf.weights();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| {
        let by_value = match direction {
            Direction::Largest => w[b].partial_cmp(&w[a]),
            Direction::Smallest => w[a].partial_cmp(&w[b]),
        };
        by_value.unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let entries = order
        .into_iter()
        .take(k)
        .map(|index| {
            Ok(RankedRule {
                index,
                description: rb.describe_rule(index, None)?,
                value: w[index],
            })
        })
        .collect::<Result<_>>()?;
    Ok(RuleRanking { direction, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry<T> {
    pub t: u64,
    pub argmax: usize,
    pub argmin: usize,
    pub max_c: T,
    pub min_c: T,
}

/// Per-step argmax/argmin consequent of one binary classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTrace<T> {
    pub classifier: String,
    pub entries: Vec<TraceEntry<T>>,
}

impl<T: Scalar> RuleTrace<T> {
    pub fn new(classifier: impl Into<String>) -> Self {
        RuleTrace {
            classifier: classifier.into(),
            entries: Vec::new(),
        }
    }

    /// Appends the extreme consequents of `clf` at time `t`; ties go to the
    /// lowest rule index.
    pub fn record_step(&mut self, t: u64, clf: &OnlineBinaryClassifier<T>) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if t <= last.t {
                return Err(Error::invalid(format!(
                    "trace time must increase: got t={t} after t={}",
                    last.t
                )));
            }
        }
        let w = clf.weights();
        if w.is_empty() {
            return Err(Error::invalid("cannot trace a classifier without weights"));
        }
        let (mut argmax, mut argmin) = (0, 0);
        for (j, &v) in w.iter().enumerate().skip(1) {
            if v > w[argmax] {
                argmax = j;
            }
            if v < w[argmin] {
                argmin = j;
            }
        }
        self.entries.push(TraceEntry {
            t,
            argmax,
            argmin,
            max_c: w[argmax],
            min_c: w[argmin],
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Compact label of rule `j`: per-axis set codes ("SS", "MS", ...) for 2-D
/// rule bases, the linguistic description otherwise.
pub fn rule_label(rb: &RuleBase, j: usize) -> Result<String> {
    let ant = rb
        .antecedents()
        .get(j)
        .ok_or_else(|| Error::invalid(format!("rule index {j} out of range (N={})", rb.len())))?;
    if rb.dim() != 2 {
        return rb.describe_rule(j, None);
    }
    Ok(ant
        .terms()
        .iter()
        .map(|t| match t {
            Term::DontCare => "*".to_string(),
            Term::Set(k) => rb.partition().short_label(*k).unwrap_or_default(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

#[derive(Serialize)]
struct LabeledEntry<T> {
    t: u64,
    argmax_label: String,
    argmin_label: String,
    max_c: T,
    min_c: T,
}

#[derive(Serialize)]
struct LabeledTrace<'a, T> {
    classifier: &'a str,
    records: Vec<LabeledEntry<T>>,
}

fn labeled<T: Scalar>(trace: &RuleTrace<T>, rb: &RuleBase) -> Result<Vec<LabeledEntry<T>>> {
    trace
        .entries
        .iter()
        .map(|e| {
            Ok(LabeledEntry {
                t: e.t,
                argmax_label: rule_label(rb, e.argmax)?,
                argmin_label: rule_label(rb, e.argmin)?,
                max_c: e.max_c,
                min_c: e.min_c,
            })
        })
        .collect()
}

/// Writes `trace` as CSV (`t,argmax_label,argmin_label,max_c,min_c`) or JSON.
pub fn emit_trace<T: Scalar>(trace: &RuleTrace<T>, rb: &RuleBase, format: TraceFormat, path: &Path) -> Result<()> {
    let records = labeled(trace, rb)?;
    match format {
        TraceFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(path)
                .map_err(|e| csv_io(path, e))?;
            w.write_record(["t", "argmax_label", "argmin_label", "max_c", "min_c"])
                .map_err(|e| csv_io(path, e))?;
            for r in &records {
                w.serialize(r).map_err(|e| csv_io(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        TraceFormat::Json => {
            let doc = LabeledTrace {
                classifier: &trace.classifier,
                records,
            };
            let text = serde_json::to_string_pretty(&doc)?;
            std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}
