//! Coefficient vectors with explicit finite support, index sets, and sign patterns.
//!
//! Indices are 1-based and live inside a fixed `ambient_dim`; stored entries
//! are always nonzero, so the key set of a vector *is* its support.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely supported real coefficient sequence inside `{1..=ambient_dim}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector {
    entries: BTreeMap<u32, f64>,
    ambient_dim: u32,
}

impl CoeffVector {
    pub fn zero(ambient_dim: u32) -> Self {
        CoeffVector {
            entries: BTreeMap::new(),
            ambient_dim,
        }
    }

    /// Build from `(index, value)` pairs; zero values are dropped.
    pub fn from_pairs(ambient_dim: u32, pairs: &[(u32, f64)]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for &(n, v) in pairs {
            if n == 0 || n > ambient_dim {
                return Err(Error::domain(format!(
                    "index {n} out of range 1..={ambient_dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::domain(format!("non-finite coefficient at {n}")));
            }
            if v != 0.0 && entries.insert(n, v).is_some() {
                return Err(Error::domain(format!("duplicate index {n}")));
            }
        }
        Ok(CoeffVector {
            entries,
            ambient_dim,
        })
    }

    /// Dense constructor: `values[i]` is the coefficient of index `i + 1`.
    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i as u32 + 1, *v))
            .collect();
        CoeffVector {
            entries,
            ambient_dim: values.len() as u32,
        }
    }

    pub fn ambient_dim(&self) -> u32 {
        self.ambient_dim
    }

    pub fn coeff(&self, n: u32) -> f64 {
        self.entries.get(&n).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, n: u32, v: f64) -> Result<()> {
        if n == 0 || n > self.ambient_dim {
            return Err(Error::domain(format!(
                "index {n} out of range 1..={}",
                self.ambient_dim
            )));
        }
        if v == 0.0 {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, v);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_set(&self) -> IndexSet {
        IndexSet::new(self.entries.keys().copied().collect())
    }

    /// Entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(n, v)| (*n, *v))
    }

    /// `sup_n |coefficient|`; 0 for the zero vector.
    pub fn sup_norm(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        if s == 0.0 {
            return CoeffVector::zero(self.ambient_dim);
        }
        CoeffVector {
            entries: self.entries.iter().map(|(n, v)| (*n, s * v)).collect(),
            ambient_dim: self.ambient_dim,
        }
    }

    /// Keep only the indices for which `keep` holds.
    pub fn restricted(&self, mut keep: impl FnMut(u32) -> bool) -> Self {
        CoeffVector {
            entries: self
                .entries
                .iter()
                .filter(|(n, _)| keep(**n))
                .map(|(n, v)| (*n, *v))
                .collect(),
            ambient_dim: self.ambient_dim,
        }
    }

    /// Drop every index `< n0` (the formal tail `x - S_{n0-1}(x)`).
    pub fn tail_from(&self, n0: u32) -> Self {
        self.restricted(|n| n >= n0)
    }

    /// Add spike terms at indices currently outside the support.
    pub fn with_spikes(&self, spikes: &[(u32, f64)]) -> Result<Self> {
        let mut out = self.clone();
        for &(n, v) in spikes {
            if out.entries.contains_key(&n) {
                return Err(Error::domain(format!("spike collides with support at {n}")));
            }
            out.set(n, v)?;
        }
        Ok(out)
    }

    /// Smallest indices in `1..=ambient_dim` outside the support (ascending).
    pub fn free_indices(&self, count: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(count);
        for n in 1..=self.ambient_dim {
            if out.len() == count {
                break;
            }
            if !self.entries.contains_key(&n) {
                out.push(n);
            }
        }
        out
    }
}

/// A strictly increasing list of positive indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSet(Vec<u32>);

impl IndexSet {
    pub fn new(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSet(indices)
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    pub fn from_range(lo: u32, hi: u32) -> Self {
        IndexSet((lo..=hi).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, n: u32) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn min_index(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max_index(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// The comparison `self < other`: `max self < min other`. Vacuously true
    /// when either side is empty.
    pub fn entirely_below(&self, other: &IndexSet) -> bool {
        match (self.max_index(), other.min_index()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    /// `max self <= bound`; vacuously true for the empty set.
    pub fn max_at_most(&self, bound: u32) -> bool {
        self.max_index().map_or(true, |a| a <= bound)
    }

    pub fn disjoint(&self, other: &IndexSet) -> bool {
        let mut it = other.0.iter().peekable();
        for &n in &self.0 {
            while let Some(&&m) = it.peek() {
                if m < n {
                    it.next();
                } else {
                    break;
                }
            }
            if it.peek() == Some(&&n) {
                return false;
            }
        }
        true
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        IndexSet::new(v)
    }
}

/// Signs `{-1, +1}` attached to indices. Looking up an index the pattern does
/// not cover is a domain error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignPattern(BTreeMap<u32, i8>);

impl SignPattern {
    pub fn from_pairs(pairs: &[(u32, i8)]) -> Result<Self> {
        let mut signs = BTreeMap::new();
        for &(n, s) in pairs {
            if s != 1 && s != -1 {
                return Err(Error::domain(format!("sign at {n} must be +1 or -1")));
            }
            signs.insert(n, s);
        }
        Ok(SignPattern(signs))
    }

    /// All-plus pattern on a set.
    pub fn plus_on(set: &IndexSet) -> Self {
        SignPattern(set.iter().map(|n| (n, 1i8)).collect())
    }

    /// Pattern on `set` whose k-th sign is `-1` iff bit k of `bits` is set.
    pub fn from_bits(set: &IndexSet, bits: u64) -> Self {
        SignPattern(
            set.iter()
                .enumerate()
                .map(|(k, n)| (n, if bits >> k & 1 == 1 { -1i8 } else { 1i8 }))
                .collect(),
        )
    }

    pub fn sign(&self, n: u32) -> Result<f64> {
        self.0
            .get(&n)
            .map(|s| *s as f64)
            .ok_or_else(|| Error::domain(format!("sign pattern does not cover index {n}")))
    }

    /// `(index, sign * scale)` pairs over `set`, ascending.
    pub fn signed_spikes(&self, set: &IndexSet, scale: f64) -> Result<Vec<(u32, f64)>> {
        set.iter()
            .map(|n| Ok((n, self.sign(n)? * scale)))
            .collect()
    }
}
