//! Infinite sequences `ℕ → T` as a base function plus finite overrides,
//! and eventually periodic sequences ("lassos") as a finite, enumerable
//! fragment of them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

type Base<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;

/// A lazily evaluated infinite sequence.
///
/// Element `n` is `overrides[n]` when present and `base(n)` otherwise.
/// Values are memoised; concurrent probes of the same index may both call
/// `base`, but they store identical values, so the cache stays coherent.
pub struct LazySequence<T> {
    base: Base<T>,
    overrides: BTreeMap<usize, T>,
    memo: RwLock<HashMap<usize, T>>,
    probes: AtomicUsize,
}

impl<T: Clone> Clone for LazySequence<T> {
    fn clone(&self) -> Self {
        LazySequence {
            base: self.base.clone(),
            overrides: self.overrides.clone(),
            memo: RwLock::new(self.memo.read().expect("memo lock").clone()),
            probes: AtomicUsize::new(0),
        }
    }
}

impl<T: Clone + fmt::Debug + Send + Sync + 'static> fmt::Debug for LazySequence<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LazySequence{:?}…", self.prefix(8))
    }
}

impl<T: Clone + Send + Sync + 'static> LazySequence<T> {
    pub fn new(base: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        LazySequence {
            base: Arc::new(base),
            overrides: BTreeMap::new(),
            memo: RwLock::new(HashMap::new()),
            probes: AtomicUsize::new(0),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::new(move |_| c.clone())
    }

    /// `prefix ∗ tail`.
    pub fn extend(prefix: &[T], tail: LazySequence<T>) -> Self {
        let k = prefix.len();
        let tail = Arc::new(tail);
        let mut out = Self::new(move |n| tail.get(n - k));
        out.overrides = prefix.iter().cloned().enumerate().collect();
        out
    }

    pub fn get(&self, n: usize) -> T {
        self.probes.fetch_add(1, Ordering::Relaxed);
        if let Some(v) = self.overrides.get(&n) {
            return v.clone();
        }
        if let Some(v) = self.memo.read().expect("memo lock").get(&n) {
            return v.clone();
        }
        let v = (self.base)(n);
        self.memo.write().expect("memo lock").entry(n).or_insert_with(|| v.clone());
        v
    }

    /// The initial segment of length `n`.
    pub fn prefix(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.get(i)).collect()
    }

    /// How many times [`get`](Self::get) has been called on this value.
    pub fn probes(&self) -> usize {
        self.probes.load(Ordering::Relaxed)
    }

    pub fn with_override(mut self, n: usize, v: T) -> Self {
        self.overrides.insert(n, v);
        self.memo.get_mut().expect("memo lock").remove(&n);
        self
    }

    /// The tail starting at index `k`.
    pub fn shift(&self, k: usize) -> Self {
        let me = Arc::new(self.clone());
        Self::new(move |n| me.get(n + k))
    }

    /// `ᾱn ∗ y ∗ β`: the first `n` elements of `self`, then `y`, then `β`.
    pub fn splice(&self, n: usize, y: T, beta: &LazySequence<T>) -> Self {
        let mut prefix = self.prefix(n);
        prefix.push(y);
        Self::extend(&prefix, beta.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("the repeating part of a lasso must be nonempty")]
    EmptyCycle,
    #[error("cannot parse sequence element {0:?}")]
    Element(String),
}

/// An eventually periodic sequence `prefix ∗ cycle ∗ cycle ∗ …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lasso<T> {
    prefix: Vec<T>,
    cycle: Vec<T>,
}

impl<T: Clone> Lasso<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        Ok(Lasso { prefix, cycle })
    }

    /// `prefix` followed by `c, c, c, …`.
    pub fn eventually_constant(prefix: Vec<T>, c: T) -> Self {
        Lasso { prefix, cycle: vec![c] }
    }

    pub fn prefix_part(&self) -> &[T] {
        &self.prefix
    }

    pub fn cycle_part(&self) -> &[T] {
        &self.cycle
    }

    pub fn get(&self, n: usize) -> T {
        match self.prefix.get(n) {
            Some(v) => v.clone(),
            None => self.cycle[(n - self.prefix.len()) % self.cycle.len()].clone(),
        }
    }

    pub fn take(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.get(i)).collect()
    }

    /// Number of indices after which the sequence has shown all of its
    /// structure: every element from here on repeats an earlier window.
    pub fn period_end(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// `prefix ∗ self`.
    pub fn prepend(&self, prefix: &[T]) -> Lasso<T> {
        let mut p = prefix.to_vec();
        p.extend(self.prefix.iter().cloned());
        Lasso {
            prefix: p,
            cycle: self.cycle.clone(),
        }
    }

    /// `ᾱn ∗ y ∗ β` for lassos.
    pub fn splice(&self, n: usize, y: T, beta: &Lasso<T>) -> Lasso<T> {
        let mut prefix = self.take(n);
        prefix.push(y);
        prefix.extend(beta.prefix.iter().cloned());
        Lasso {
            prefix,
            cycle: beta.cycle.clone(),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Lasso<U> {
        Lasso {
            prefix: self.prefix.iter().map(&f).collect(),
            cycle: self.cycle.iter().map(&f).collect(),
        }
    }
}

impl<T: Clone + Send + Sync + 'static> Lasso<T> {
    pub fn to_sequence(&self) -> LazySequence<T> {
        let me = self.clone();
        LazySequence::new(move |n| me.get(n))
    }
}

impl<T: fmt::Display> fmt::Display for Lasso<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", join(&self.prefix), join(&self.cycle))
    }
}

/// Syntax: a comma list, then `;` and the repeating part, e.g. `5,4,3;7`.
impl<T: FromStr + Clone> FromStr for Lasso<T> {
    type Err = LassoError;

    fn from_str(s: &str) -> Result<Self, LassoError> {
        let (pre, cyc) = s.split_once(';').ok_or(LassoError::EmptyCycle)?;
        let list = |part: &str| -> Result<Vec<T>, LassoError> {
            part.split(',')
                .map(str::trim)
                .filter(|w| !w.is_empty())
                .map(|w| w.parse().map_err(|_| LassoError::Element(w.to_string())))
                .collect()
        };
        Lasso::new(list(pre)?, list(cyc)?)
    }
}

/// Every lasso over `0..n` with prefix length plus cycle length at most
/// `max_len`, in a fixed order (by total length, then prefix length, then
/// lexicographically).
pub fn all_lassos(n: usize, max_len: usize) -> Vec<Lasso<usize>> {
    let mut out = Vec::new();
    for total in 1..=max_len {
        for cyc_len in 1..=total {
            for word in crate::relations::product(n, total) {
                let (p, c) = word.split_at(total - cyc_len);
                out.push(Lasso {
                    prefix: p.to_vec(),
                    cycle: c.to_vec(),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_and_memo() {
        let s = LazySequence::new(|n| n * 10).with_override(2, 7);
        assert_eq!(s.prefix(4), vec![0, 10, 7, 30]);
        assert_eq!(s.get(3), s.get(3));
        assert!(s.probes() >= 6);
    }

    #[test]
    fn splice_examples() {
        let alpha = LazySequence::new(|n| n as u64 + 100);
        let beta = LazySequence::new(|n| n as u64);
        assert_eq!(alpha.splice(0, 9, &beta).prefix(4), vec![9, 0, 1, 2]);
        let same = alpha.splice(3, alpha.get(3), &alpha.shift(4));
        assert_eq!(same.prefix(10), alpha.prefix(10));
        let over = LazySequence::constant(1u64).with_override(5, 42);
        assert_eq!(alpha.splice(5, 42, &beta).get(5), over.get(5));
    }

    #[test]
    fn shared_memo_under_threads() {
        let s = Arc::new(LazySequence::new(|n| n * n));
        std::thread::scope(|scope| {
            for _ in 0..4 {
                let s = s.clone();
                scope.spawn(move || {
                    for i in 0..200 {
                        assert_eq!(s.get(i), i * i);
                    }
                });
            }
        });
    }

    #[test]
    fn lasso_parse_and_get() {
        let a: Lasso<u64> = "5,4,3;7".parse().unwrap();
        assert_eq!(a.take(6), vec![5, 4, 3, 7, 7, 7]);
        assert_eq!(a.to_string(), "5,4,3;7");
        let c: Lasso<u64> = ";0".parse().unwrap();
        assert_eq!(c.take(3), vec![0, 0, 0]);
        let p: Lasso<u64> = "1;2,3".parse().unwrap();
        assert_eq!(p.take(6), vec![1, 2, 3, 2, 3, 2]);
        assert_eq!("1,2".parse::<Lasso<u64>>(), Err(LassoError::EmptyCycle));
        assert_eq!("1;".parse::<Lasso<u64>>(), Err(LassoError::EmptyCycle));
        assert!(matches!("x;1".parse::<Lasso<u64>>(), Err(LassoError::Element(_))));
    }

    #[test]
    fn lasso_splice_matches_lazy_splice() {
        let a: Lasso<u64> = "1,2,3;4,5".parse().unwrap();
        let b: Lasso<u64> = "9;8".parse().unwrap();
        let lazy = a.to_sequence().splice(2, 0, &b.to_sequence());
        assert_eq!(a.splice(2, 0, &b).take(12), lazy.prefix(12));
    }

    #[test]
    fn lasso_enumeration_counts() {
        // total length 1: 2 lassos; length 2: 2 splits × 4 words.
        assert_eq!(all_lassos(2, 2).len(), 2 + 8);
    }
}
