//! Decidable binary relations, liftings to argument tuples, and
//! well-foundedness on finite carriers.
//!
//! On a finite carrier a relation is well-founded exactly when its graph is
//! acyclic, so [`is_wellfounded_finite`] answers with either a verdict of
//! acyclicity or a witness cycle `x0 ≻ x1 ≻ … ≻ x0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::term::{enumerate_ground_terms, Signature, Term, TermError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("relation carrier is not finite")]
    CarrierNotFinite,
    #[error("tuple lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown carrier element {0}")]
    UnknownElement(String),
    #[error("duplicate carrier element {0}")]
    DuplicateElement(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

pub type Holds<T> = Arc<dyn Fn(&T, &T) -> bool + Send + Sync>;

#[derive(Clone, Debug)]
pub enum Carrier<T> {
    Finite(Vec<T>),
    Abstract,
}

/// A decidable relation together with a description of its carrier.
#[derive(Clone)]
pub struct RelationSpec<T> {
    carrier: Carrier<T>,
    holds: Holds<T>,
}

impl<T: fmt::Debug> fmt::Debug for RelationSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelationSpec")
            .field("carrier", &self.carrier)
            .finish_non_exhaustive()
    }
}

impl<T> RelationSpec<T> {
    pub fn finite(carrier: Vec<T>, holds: impl Fn(&T, &T) -> bool + Send + Sync + 'static) -> Self {
        RelationSpec {
            carrier: Carrier::Finite(carrier),
            holds: Arc::new(holds),
        }
    }

    pub fn unbounded(holds: impl Fn(&T, &T) -> bool + Send + Sync + 'static) -> Self {
        RelationSpec {
            carrier: Carrier::Abstract,
            holds: Arc::new(holds),
        }
    }

    pub fn holds(&self, x: &T, y: &T) -> bool {
        (self.holds)(x, y)
    }

    pub fn carrier(&self) -> Option<&[T]> {
        match &self.carrier {
            Carrier::Finite(xs) => Some(xs),
            Carrier::Abstract => None,
        }
    }

    /// The edge set over carrier indices.
    pub fn materialize(&self) -> Result<FiniteRelation, RelationError> {
        let xs = self.carrier().ok_or(RelationError::CarrierNotFinite)?;
        Ok(FiniteRelation::from_fn(xs.len(), |i, j| self.holds(&xs[i], &xs[j])))
    }
}

impl<T: PartialEq + Clone + Send + Sync + 'static> RelationSpec<T> {
    pub fn from_edges(carrier: Vec<T>, edges: Vec<(T, T)>) -> Self {
        RelationSpec::finite(carrier, move |x, y| edges.iter().any(|(a, b)| a == x && b == y))
    }
}

impl RelationSpec<Term> {
    /// A relation on the ground terms of height at most `depth`.
    pub fn on_ground_terms(
        sig: &Signature,
        depth: usize,
        holds: impl Fn(&Term, &Term) -> bool + Send + Sync + 'static,
    ) -> Result<Self, RelationError> {
        Ok(RelationSpec::finite(enumerate_ground_terms(sig, depth)?, holds))
    }
}

/// `>` on an initial segment `{0, .., n-1}` of the naturals.
pub fn nat_gt(n: u64) -> RelationSpec<u64> {
    RelationSpec::finite((0..n).collect(), |a, b| a > b)
}

/// A relation over `{0, .., n-1}` stored as an adjacency matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteRelation {
    n: usize,
    adj: Vec<bool>,
}

impl fmt::Debug for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteRelation")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl FiniteRelation {
    pub fn empty(n: usize) -> Self {
        FiniteRelation {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.adj[i * n + j] = f(i, j);
            }
        }
        r
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (i, j) in edges {
            r.insert(i, j);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn holds(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.adj[i * self.n + j] = true;
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.adj[i * self.n + j] = false;
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.holds(i, j))
    }

    pub fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.holds(i, j))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.successors(i).map(move |j| (i, j)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count()
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.n).all(|i| !self.holds(i, i))
    }

    /// A triple `(a, b, c)` with `a R b`, `b R c` but not `a R c`, if any.
    pub fn transitivity_violation(&self) -> Option<(usize, usize, usize)> {
        for a in 0..self.n {
            for b in self.successors(a) {
                for c in self.successors(b) {
                    if !self.holds(a, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn transitive_closure(&self) -> FiniteRelation {
        let mut r = self.clone();
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                if r.holds(i, k) {
                    for j in 0..n {
                        if r.holds(k, j) {
                            r.insert(i, j);
                        }
                    }
                }
            }
        }
        r
    }

    /// The relation restricted to a subset of the carrier (edges leaving or
    /// entering the complement are dropped).
    pub fn restrict(&self, keep: &[bool]) -> FiniteRelation {
        FiniteRelation::from_fn(self.n, |i, j| keep[i] && keep[j] && self.holds(i, j))
    }

    /// For each element, whether no infinite descending chain starts there.
    ///
    /// Computed by peeling sinks: an element is well-founded once all of its
    /// successors are.
    pub fn wellfounded_elements(&self) -> Vec<bool> {
        let n = self.n;
        let mut wf = vec![false; n];
        let mut pending: Vec<usize> = (0..n).map(|i| self.successors(i).count()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
        while let Some(x) = queue.pop() {
            wf[x] = true;
            for p in self.predecessors(x) {
                pending[p] -= 1;
                if pending[p] == 0 {
                    queue.push(p);
                }
            }
        }
        wf
    }

    /// From a non-well-founded `x`, the walk `x, x1, .., xk` that always
    /// steps to the first non-well-founded successor, stopped at the first
    /// repeated element (which is included). `None` if `x` is well-founded.
    pub fn descending_walk(&self, x: usize, wf: &[bool]) -> Option<Vec<usize>> {
        if wf[x] {
            return None;
        }
        let mut path = vec![x];
        let mut seen = vec![false; self.n];
        seen[x] = true;
        let mut cur = x;
        loop {
            let next = self
                .successors(cur)
                .find(|&y| !wf[y])
                .expect("a non-well-founded element has a non-well-founded successor");
            path.push(next);
            if seen[next] {
                return Some(path);
            }
            seen[next] = true;
            cur = next;
        }
    }

    /// Some cycle `x0, x1, .., x0`, if the relation has one.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let wf = self.wellfounded_elements();
        let start = (0..self.n).find(|&i| !wf[i])?;
        let walk = self.descending_walk(start, &wf)?;
        let last = *walk.last().unwrap();
        let first = walk.iter().position(|&v| v == last).unwrap();
        Some(walk[first..].to_vec())
    }

    pub fn is_acyclic(&self) -> bool {
        self.wellfounded_elements().iter().all(|&b| b)
    }
}

/// Outcome of a well-foundedness check on a finite carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WellFoundedness<T> {
    WellFounded,
    /// `x0 ≻ x1 ≻ … ≻ x0`; first and last entries coincide.
    Cycle(Vec<T>),
}

impl<T> WellFoundedness<T> {
    pub fn is_wellfounded(&self) -> bool {
        matches!(self, WellFoundedness::WellFounded)
    }
}

pub fn is_wellfounded_finite<T: Clone>(r: &RelationSpec<T>) -> Result<WellFoundedness<T>, RelationError> {
    let xs = r.carrier().ok_or(RelationError::CarrierNotFinite)?;
    Ok(match r.materialize()?.find_cycle() {
        None => WellFoundedness::WellFounded,
        Some(c) => WellFoundedness::Cycle(c.into_iter().map(|i| xs[i].clone()).collect()),
    })
}

/// Witness for one Dershowitz–Manna step: `ys = (xs - removed) + added`,
/// with `xs[dominators[k]] ≻ ys[added[k]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultisetWitness {
    pub removed: Vec<usize>,
    pub added: Vec<usize>,
    pub dominators: Vec<usize>,
}

/// Above this many common elements only the maximal common sub-multiset is
/// tried, which is complete whenever the base relation is transitive.
const MAX_EXHAUSTIVE_KEEP: usize = 16;

/// Multiset extension with an explicit witness.
///
/// Searches over the common sub-multisets `K` of `xs` and `ys` (largest
/// first): with `X = xs - K` nonempty and `Y = ys - K`, every element of `Y`
/// must be below some element of `X`.
pub fn multiset_witness_by<T>(
    base: impl Fn(&T, &T) -> bool,
    eq: impl Fn(&T, &T) -> bool,
    xs: &[T],
    ys: &[T],
) -> Option<MultisetWitness> {
    let (m, k) = (xs.len(), ys.len());
    let mut gt = vec![false; m * k];
    for i in 0..m {
        for j in 0..k {
            gt[i * k + j] = base(&xs[i], &ys[j]);
        }
    }
    // greedy maximal matching of equal elements
    let mut used = vec![false; k];
    let mut pairs = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        if let Some(j) = (0..k).find(|&j| !used[j] && eq(x, &ys[j])) {
            used[j] = true;
            pairs.push((i, j));
        }
    }
    let full: u64 = if pairs.len() >= 64 { u64::MAX } else { (1u64 << pairs.len()) - 1 };
    let masks: Box<dyn Iterator<Item = u64>> = if pairs.len() > MAX_EXHAUSTIVE_KEEP {
        Box::new(std::iter::once(full))
    } else {
        Box::new((0..=full).rev())
    };
    for mask in masks {
        let mut keep_x = vec![false; m];
        let mut keep_y = vec![false; k];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                keep_x[i] = true;
                keep_y[j] = true;
            }
        }
        let removed: Vec<usize> = (0..m).filter(|&i| !keep_x[i]).collect();
        if removed.is_empty() {
            continue;
        }
        let added: Vec<usize> = (0..k).filter(|&j| !keep_y[j]).collect();
        let dominators: Option<Vec<usize>> = added
            .iter()
            .map(|&j| removed.iter().copied().find(|&i| gt[i * k + j]))
            .collect();
        if let Some(dominators) = dominators {
            return Some(MultisetWitness {
                removed,
                added,
                dominators,
            });
        }
    }
    None
}

pub fn multiset_ext_by<T>(
    base: impl Fn(&T, &T) -> bool,
    eq: impl Fn(&T, &T) -> bool,
    xs: &[T],
    ys: &[T],
) -> bool {
    multiset_witness_by(base, eq, xs, ys).is_some()
}

/// Dershowitz–Manna multiset extension of `base`, with syntactic equality.
pub fn multiset_ext<T: PartialEq>(base: &RelationSpec<T>, xs: &[T], ys: &[T]) -> bool {
    multiset_ext_by(|a, b| base.holds(a, b), |a, b| a == b, xs, ys)
}

/// Index of the first position where `xs` and `ys` differ, if `xs` is
/// lexicographically greater there.
pub fn lex_witness_by<T>(
    base: impl Fn(&T, &T) -> bool,
    eq: impl Fn(&T, &T) -> bool,
    xs: &[T],
    ys: &[T],
) -> Result<Option<usize>, RelationError> {
    if xs.len() != ys.len() {
        return Err(RelationError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        if !eq(x, y) {
            return Ok(base(x, y).then_some(i));
        }
    }
    Ok(None)
}

/// Left-to-right lexicographic extension at fixed arity.
pub fn lex_ext<T>(
    base: &RelationSpec<T>,
    eq: impl Fn(&T, &T) -> bool,
    xs: &[T],
    ys: &[T],
) -> Result<bool, RelationError> {
    Ok(lex_witness_by(|a, b| base.holds(a, b), eq, xs, ys)?.is_some())
}

/// An extension of a relation on elements to a relation on tuples.
pub trait TupleExtension {
    fn extends<T>(&self, base: &dyn Fn(&T, &T) -> bool, eq: &dyn Fn(&T, &T) -> bool, xs: &[T], ys: &[T]) -> bool;
}

/// The per-symbol lifting used by the recursive path order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lifting {
    #[serde(rename = "lex")]
    Lexicographic,
    #[serde(rename = "mul")]
    Multiset,
}

impl Lifting {
    pub fn as_str(self) -> &'static str {
        match self {
            Lifting::Lexicographic => "lex",
            Lifting::Multiset => "mul",
        }
    }
}

impl fmt::Display for Lifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl TupleExtension for Lifting {
    fn extends<T>(&self, base: &dyn Fn(&T, &T) -> bool, eq: &dyn Fn(&T, &T) -> bool, xs: &[T], ys: &[T]) -> bool {
        match self {
            Lifting::Multiset => multiset_ext_by(base, eq, xs, ys),
            Lifting::Lexicographic => matches!(lex_witness_by(base, eq, xs, ys), Ok(Some(_))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LiftingOutcome<T> {
    Pass,
    /// The base relation has a cycle, so the law's premise fails.
    Skipped { base_cycle: Vec<T> },
    Violation { cycle: Vec<Vec<T>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftingReport<T> {
    pub arity: usize,
    pub entries: Vec<LiftingOutcome<T>>,
}

impl<T> LiftingReport<T> {
    pub fn violations(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, LiftingOutcome::Violation { .. }))
            .count()
    }
}

/// Samples the lifting law: an acyclic base on `A` must give an acyclic
/// extension on `A^n`.
pub fn check_lifting_law<L: TupleExtension, T: Clone + PartialEq>(
    lift: &L,
    arity: usize,
    samples: &[RelationSpec<T>],
) -> Result<LiftingReport<T>, RelationError> {
    let mut entries = Vec::new();
    for sample in samples {
        let xs = sample.carrier().ok_or(RelationError::CarrierNotFinite)?;
        let base = sample.materialize()?;
        if let Some(c) = base.find_cycle() {
            entries.push(LiftingOutcome::Skipped {
                base_cycle: c.into_iter().map(|i| xs[i].clone()).collect(),
            });
            continue;
        }
        let tuples = product(xs.len(), arity);
        let lifted = FiniteRelation::from_fn(tuples.len(), |a, b| {
            lift.extends(&|x: &usize, y: &usize| base.holds(*x, *y), &|x, y| x == y, &tuples[a], &tuples[b])
        });
        entries.push(match lifted.find_cycle() {
            None => LiftingOutcome::Pass,
            Some(c) => LiftingOutcome::Violation {
                cycle: c
                    .into_iter()
                    .map(|t| tuples[t].iter().map(|&i| xs[i].clone()).collect())
                    .collect(),
            },
        });
    }
    Ok(LiftingReport { arity, entries })
}

/// All `arity`-tuples over `{0..n}` in lexicographic order.
pub fn product(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Which decomposition law a pair violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecompositionLaw {
    /// `x ≻ y → (∃u ⊲ x. u ⪰ y) ∨ x ≻₀ y`
    #[serde(rename = "a")]
    A,
    /// `x ≻₀ y → ∀u ⊲ y. x ≻ u`
    #[serde(rename = "b")]
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionViolation<T> {
    pub law: DecompositionLaw,
    pub x: T,
    pub y: T,
    /// For law (b), the subterm of `y` that `x` fails to dominate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport<T> {
    pub pairs_checked: usize,
    pub violations: Vec<DecompositionViolation<T>>,
}

impl<T> DecompositionReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn law_violations(&self, law: DecompositionLaw) -> usize {
        self.violations.iter().filter(|v| v.law == law).count()
    }
}

/// Checks both decomposition laws for `succ0` against `succ` over every
/// pair of the carrier. `children(x)` lists the `u` with `x ⊳ u`.
pub fn check_decomposition<T: Clone + PartialEq>(
    carrier: &[T],
    succ: impl Fn(&T, &T) -> bool,
    succ0: impl Fn(&T, &T) -> bool,
    children: impl Fn(&T) -> Vec<T>,
) -> DecompositionReport<T> {
    let mut violations = Vec::new();
    let kids: Vec<Vec<T>> = carrier.iter().map(&children).collect();
    for (i, x) in carrier.iter().enumerate() {
        for (j, y) in carrier.iter().enumerate() {
            let gt = succ(x, y);
            let gt0 = succ0(x, y);
            if gt && !gt0 && !kids[i].iter().any(|u| u == y || succ(u, y)) {
                violations.push(DecompositionViolation {
                    law: DecompositionLaw::A,
                    x: x.clone(),
                    y: y.clone(),
                    u: None,
                });
            }
            if gt0 {
                if let Some(u) = kids[j].iter().find(|u| !succ(x, u)) {
                    violations.push(DecompositionViolation {
                        law: DecompositionLaw::B,
                        x: x.clone(),
                        y: y.clone(),
                        u: Some(u.clone()),
                    });
                }
            }
        }
    }
    DecompositionReport {
        pairs_checked: carrier.len() * carrier.len(),
        violations,
    }
}

/// The JSON edge-list document `{"carrier": [...], "edges": [[x, y], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeList {
    pub carrier: Vec<Value>,
    pub edges: Vec<(Value, Value)>,
}

/// Resolves JSON carrier labels to indices.
pub(crate) fn index_of(carrier: &[Value], v: &Value) -> Result<usize, RelationError> {
    carrier
        .iter()
        .position(|c| c == v)
        .ok_or_else(|| RelationError::UnknownElement(v.to_string()))
}

pub(crate) fn check_distinct(carrier: &[Value]) -> Result<(), RelationError> {
    for (i, v) in carrier.iter().enumerate() {
        if carrier[..i].contains(v) {
            return Err(RelationError::DuplicateElement(v.to_string()));
        }
    }
    Ok(())
}

pub(crate) fn relation_from_pairs(carrier: &[Value], pairs: &[(Value, Value)]) -> Result<FiniteRelation, RelationError> {
    let edges = pairs
        .iter()
        .map(|(x, y)| Ok((index_of(carrier, x)?, index_of(carrier, y)?)))
        .collect::<Result<Vec<_>, RelationError>>()?;
    Ok(FiniteRelation::from_edges(carrier.len(), edges))
}

pub(crate) fn relation_to_pairs(carrier: &[Value], r: &FiniteRelation) -> Vec<(Value, Value)> {
    r.edges()
        .into_iter()
        .map(|(i, j)| (carrier[i].clone(), carrier[j].clone()))
        .collect()
}

impl EdgeList {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_finite(&self) -> Result<FiniteRelation, RelationError> {
        check_distinct(&self.carrier)?;
        relation_from_pairs(&self.carrier, &self.edges)
    }

    pub fn to_relation(&self) -> Result<RelationSpec<Value>, RelationError> {
        let r = self.to_finite()?;
        let carrier = self.carrier.clone();
        let labels = carrier.clone();
        Ok(RelationSpec::finite(carrier, move |x, y| {
            match (labels.iter().position(|c| c == x), labels.iter().position(|c| c == y)) {
                (Some(i), Some(j)) => r.holds(i, j),
                _ => false,
            }
        }))
    }
}
