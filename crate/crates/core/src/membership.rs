//! One-dimensional fuzzy sets on the unit interval.
//!
//! Each axis is covered by `m` uniformly spaced triangular sets whose peaks
//! sit at `k / (m - 1)`. The two edge sets are half-triangles, so the family
//! forms a Ruspini partition: memberships sum to one everywhere on `[0, 1]`.
//! The Don't-Care set is the constant function 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `m` triangular fuzzy sets plus Don't-Care for one axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzyPartition {
    m: usize,
    labels: Vec<String>,
}

impl FuzzyPartition {
    pub fn new(m: usize) -> Result<Self> {
        let labels = partition_labels(m)?;
        Ok(FuzzyPartition { m, labels })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, k: usize) -> Option<&str> {
        self.labels.get(k).map(String::as_str)
    }

    /// Short code used for 2-D grid labels ("S", "M", "L", ...).
    pub fn short_label(&self, k: usize) -> Option<String> {
        short_label(self.m, k)
    }

    /// Peak position of set `k`.
    pub fn peak<T: Scalar>(&self, k: usize) -> T {
        T::from_usize_lossy(k) / T::from_usize_lossy(self.m - 1)
    }

    pub fn membership<T: Scalar>(&self, x: T, k: usize) -> Result<T> {
        triangular_membership(x, k, self.m)
    }

    /// Memberships of `x` in all `m` sets, in set order.
    pub fn memberships<T: Scalar>(&self, x: T) -> Result<Vec<T>> {
        check_unit(x)?;
        Ok((0..self.m).map(|k| triangle(x, k, self.m)).collect())
    }
}

/// Membership of `x` in triangular set `k` of an `m`-set partition.
///
/// `x` must already lie in `[0, 1]`; out-of-range values are rejected rather
/// than clamped.
pub fn triangular_membership<T: Scalar>(x: T, k: usize, m: usize) -> Result<T> {
    if m < 2 {
        return Err(Error::invalid(format!("partition count m={m}, need m >= 2")));
    }
    if k >= m {
        return Err(Error::invalid(format!("set index {k} out of range for m={m}")));
    }
    check_unit(x)?;
    Ok(triangle(x, k, m))
}

/// Don't-Care membership: 1 for every input.
pub fn dc_membership<T: Scalar>(_x: T) -> T {
    T::one()
}

/// Linguistic names for the `m` sets of a partition, ordered by peak.
pub fn partition_labels(m: usize) -> Result<Vec<String>> {
    let names: &[&str] = match m {
        0 | 1 => {
            return Err(Error::invalid(format!("partition count m={m}, need m >= 2")));
        }
        2 => &["small", "large"],
        3 => &["small", "medium", "large"],
        4 => &["very small", "small", "large", "very large"],
        5 => &["very small", "small", "medium", "large", "very large"],
        _ => return Ok((0..m).map(|k| format!("set-{k}")).collect()),
    };
    Ok(names.iter().map(|s| s.to_string()).collect())
}

// Codes are prefix-free within each m, so concatenations stay unambiguous.
fn short_label(m: usize, k: usize) -> Option<String> {
    let codes: &[&str] = match m {
        2 => &["S", "L"],
        3 => &["S", "M", "L"],
        4 => &["VS", "S", "L", "VL"],
        5 => &["VS", "S", "M", "L", "VL"],
        _ => return (k < m).then(|| format!("[{k}]")),
    };
    codes.get(k).map(|s| s.to_string())
}

#[inline]
pub(crate) fn triangle<T: Scalar>(x: T, k: usize, m: usize) -> T {
    let scale = T::from_usize_lossy(m - 1);
    let peak = T::from_usize_lossy(k) / scale;
    (T::one() - (x - peak).abs() * scale).max(T::zero())
}

pub(crate) fn check_unit<T: Scalar>(x: T) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("value {x} lies outside [0, 1]")))
    }
}
