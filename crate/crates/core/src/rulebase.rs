//! Antecedent generation and rule firing strengths.
//!
//! Rule ordering is fixed so consequent indices are stable across runs:
//!
//! * full grid: lexicographic over set indices, first axis most significant;
//! * DC-limited: the all-DC rule, then single-set rules by (axis, set), then
//!   two-set rules by (axis pair, set pair).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::membership::{check_unit, triangle, FuzzyPartition};
use crate::scalar::Scalar;

/// Default cap on the size of a full-grid rule base.
pub const DEFAULT_RULE_CAP: usize = 1_000_000;

/// One antecedent slot: Don't-Care or a triangular set index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    DontCare,
    Set(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Antecedent {
    terms: Vec<Term>,
}

impl Antecedent {
    pub fn new(terms: Vec<Term>) -> Self {
        Antecedent { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of axes constrained by a fuzzy set.
    pub fn order(&self) -> usize {
        self.terms.iter().filter(|t| **t != Term::DontCare).count()
    }
}

/// How the antecedents of a rule base were generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleLayout {
    FullGrid,
    DcLimited,
}

impl fmt::Display for RuleLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleLayout::FullGrid => f.write_str("full-grid"),
            RuleLayout::DcLimited => f.write_str("dc-limited"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    n: usize,
    partition: FuzzyPartition,
    layout: RuleLayout,
    antecedents: Vec<Antecedent>,
    feature_names: Vec<String>,
}

/// `m^n`, or `None` on overflow.
pub fn full_grid_count(n: usize, m: usize) -> Option<usize> {
    u32::try_from(n).ok().and_then(|n| m.checked_pow(n))
}

/// `m²·n(n−1)/2 + m·n + 1`.
pub fn dc_limited_count(n: usize, m: usize) -> usize {
    m * m * n * n.saturating_sub(1) / 2 + m * n + 1
}

impl RuleBase {
    pub fn generate_full_grid(n: usize, m: usize) -> Result<Self> {
        Self::generate_full_grid_with_cap(n, m, DEFAULT_RULE_CAP)
    }

    pub fn generate_full_grid_with_cap(n: usize, m: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimensionality must be at least 1"));
        }
        let partition = FuzzyPartition::new(m)?;
        let count = match full_grid_count(n, m) {
            Some(c) if c <= cap => c,
            _ => {
                return Err(Error::ResourceLimit {
                    requested: format!("{m}^{n}"),
                    cap,
                })
            }
        };
        let mut antecedents = Vec::with_capacity(count);
        let mut digits = vec![0usize; n];
        for _ in 0..count {
            antecedents.push(Antecedent::new(digits.iter().map(|&k| Term::Set(k)).collect()));
            // odometer increment, last axis fastest
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        Ok(Self::assemble(n, partition, RuleLayout::FullGrid, antecedents))
    }

    pub fn generate_dc_limited(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimensionality must be at least 1"));
        }
        let partition = FuzzyPartition::new(m)?;
        let mut antecedents = Vec::with_capacity(dc_limited_count(n, m));
        antecedents.push(Antecedent::new(vec![Term::DontCare; n]));
        for axis in 0..n {
            for k in 0..m {
                let mut terms = vec![Term::DontCare; n];
                terms[axis] = Term::Set(k);
                antecedents.push(Antecedent::new(terms));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                for ka in 0..m {
                    for kb in 0..m {
                        let mut terms = vec![Term::DontCare; n];
                        terms[a] = Term::Set(ka);
                        terms[b] = Term::Set(kb);
                        antecedents.push(Antecedent::new(terms));
                    }
                }
            }
        }
        Ok(Self::assemble(n, partition, RuleLayout::DcLimited, antecedents))
    }

    pub fn generate(n: usize, m: usize, layout: RuleLayout) -> Result<Self> {
        match layout {
            RuleLayout::FullGrid => Self::generate_full_grid(n, m),
            RuleLayout::DcLimited => Self::generate_dc_limited(n, m),
        }
    }

    fn assemble(n: usize, partition: FuzzyPartition, layout: RuleLayout, antecedents: Vec<Antecedent>) -> Self {
        RuleBase {
            n,
            partition,
            layout,
            antecedents,
            feature_names: default_feature_names(n),
        }
    }

    /// Replaces the default `x1..xn` names used by [`RuleBase::describe_rule`].
    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n {
            return Err(Error::invalid(format!(
                "{} feature names for a {}-dimensional rule base",
                names.len(),
                self.n
            )));
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.antecedents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antecedents.is_empty()
    }

    pub fn partition(&self) -> &FuzzyPartition {
        &self.partition
    }

    pub fn layout(&self) -> RuleLayout {
        self.layout
    }

    pub fn antecedents(&self) -> &[Antecedent] {
        &self.antecedents
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Firing strength of every rule: the product of per-axis memberships,
    /// Don't-Care axes contributing 1.
    pub fn membership_vector<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.len()];
        self.membership_vector_into(x, &mut out)?;
        Ok(out)
    }

    pub fn membership_vector_into<T: Scalar>(&self, x: &[T], out: &mut [T]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::invalid(format!(
                "pattern has {} features, rule base expects {}",
                x.len(),
                self.n
            )));
        }
        if out.len() != self.len() {
            return Err(Error::invalid("output buffer length differs from rule count"));
        }
        let m = self.partition.m();
        let mut table = Vec::with_capacity(self.n * m);
        for &xi in x {
            check_unit(xi)?;
            table.extend((0..m).map(|k| triangle(xi, k, m)));
        }
        for (slot, ant) in out.iter_mut().zip(&self.antecedents) {
            *slot = ant
                .terms
                .iter()
                .enumerate()
                .fold(T::one(), |acc, (axis, term)| match *term {
                    Term::DontCare => acc,
                    Term::Set(k) => acc * table[axis * m + k],
                });
        }
        Ok(())
    }

    /// Renders rule `j` as "If <feature> is <label> and ...".
    pub fn describe_rule(&self, j: usize, feature_names: Option<&[String]>) -> Result<String> {
        let ant = self
            .antecedents
            .get(j)
            .ok_or_else(|| Error::invalid(format!("rule index {j} out of range (N={})", self.len())))?;
        let names = feature_names.unwrap_or(&self.feature_names);
        if names.len() != self.n {
            return Err(Error::invalid("feature name count differs from dimensionality"));
        }
        let clauses: Vec<String> = ant
            .terms
            .iter()
            .enumerate()
            .filter_map(|(axis, t)| match t {
                Term::DontCare => None,
                Term::Set(k) => Some(format!(
                    "{} is {}",
                    names[axis],
                    self.partition.label(*k).unwrap_or("?")
                )),
            })
            .collect();
        if clauses.is_empty() {
            Ok("If (always)".to_string())
        } else {
            Ok(format!("If {}", clauses.join(" and ")))
        }
    }
}

pub fn default_feature_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}
