//! The reduction from open induction to the termination principle: an
//! open predicate `U(α) = ∃n B(ᾱn)` becomes a relation `≻` on finite
//! sequences, `⊳` is lifted to `⊳*`, and minimal chains are diagonalised.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::instance::PrincipleInstance;
use crate::relations::FiniteRelation;
use crate::sequence::LazySequence;

type Kernel = Arc<dyn Fn(&[usize]) -> bool + Send + Sync>;

/// The kernel `B` of an open predicate `U(α) :≡ ∃n B(ᾱn)`.
#[derive(Clone)]
pub struct OpenPredicate {
    kernel: Kernel,
}

impl fmt::Debug for OpenPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OpenPredicate")
    }
}

impl OpenPredicate {
    pub fn new(kernel: impl Fn(&[usize]) -> bool + Send + Sync + 'static) -> Self {
        OpenPredicate {
            kernel: Arc::new(kernel),
        }
    }

    pub fn never() -> Self {
        Self::new(|_| false)
    }

    pub fn holds(&self, c: &[usize]) -> bool {
        (self.kernel)(c)
    }

    /// The least `n ≤ fuel` with `B(ᾱn)`, if any. Once some prefix
    /// satisfies `B`, `U(α)` holds whatever is probed later.
    pub fn witness(&self, alpha: &LazySequence<usize>, fuel: usize) -> Option<usize> {
        let prefix = alpha.prefix(fuel);
        (0..=fuel).find(|&n| self.holds(&prefix[..n]))
    }

    /// `∃c ◀ b. B(c)`.
    pub fn some_prefix(&self, b: &[usize]) -> bool {
        (0..=b.len()).any(|k| self.holds(&b[..k]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Lemma34Error {
    #[error("sequence length cap must be at least 2, got {0}")]
    CapTooSmall(usize),
    #[error("diagonal precondition fails at chain index {index}: {reason}")]
    Incoherent { index: usize, reason: String },
}

/// `a ◀ b`: `a` is a (not necessarily strict) prefix of `b`.
pub fn is_prefix(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && a == &b[..a.len()]
}

/// The transformed relations, over all finite sequences.
#[derive(Clone, Debug)]
pub struct Lemma34 {
    pub predicate: OpenPredicate,
    pub sub: FiniteRelation,
}

impl Lemma34 {
    pub fn new(predicate: OpenPredicate, sub: FiniteRelation) -> Self {
        Lemma34 { predicate, sub }
    }

    /// `a ≻ b :≡ |b| = |a|+1 ∧ a ◀ b ∧ ∀c ◀ b ¬B(c)`.
    pub fn succ(&self, a: &[usize], b: &[usize]) -> bool {
        b.len() == a.len() + 1 && is_prefix(a, b) && !self.predicate.some_prefix(b)
    }

    /// `a ⊳* b :≡ |b| ≥ |a| ∧ ∃i<|a| (āi = b̄i ∧ aᵢ ⊳ bᵢ)`.
    pub fn sub_star(&self, a: &[usize], b: &[usize]) -> bool {
        b.len() >= a.len() && (0..a.len()).any(|i| a[..i] == b[..i] && self.sub.holds(a[i], b[i]))
    }

    /// The first index `k` with `γₖ ⊳* δₖ` and `γᵢ = δᵢ` before it.
    pub fn sub_star_lex(&self, gamma: &[Vec<usize>], delta: &[Vec<usize>]) -> Option<usize> {
        (0..gamma.len().min(delta.len()))
            .find(|&k| gamma[..k] == delta[..k] && self.sub_star(&gamma[k], &delta[k]))
    }

    /// The instance on all sequences over `0..n` of length at most `cap`.
    /// Sequences of length `cap` get no `≻`-successors.
    pub fn materialize(&self, cap: usize) -> Result<(Vec<Vec<usize>>, PrincipleInstance), Lemma34Error> {
        if cap < 2 {
            return Err(Lemma34Error::CapTooSmall(cap));
        }
        let n = self.sub.len();
        let seqs: Vec<Vec<usize>> = (0..=cap).flat_map(|k| crate::relations::product(n, k)).collect();
        let index: HashMap<&[usize], usize> = seqs.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let m = seqs.len();
        let mut succ = FiniteRelation::empty(m);
        for (i, a) in seqs.iter().enumerate().filter(|(_, a)| a.len() < cap) {
            for x in 0..n {
                let mut b = a.clone();
                b.push(x);
                if self.succ(a, &b) {
                    succ.insert(i, index[b.as_slice()]);
                }
            }
        }
        let sub = FiniteRelation::from_fn(m, |i, j| self.sub_star(&seqs[i], &seqs[j]));
        let labels = seqs.iter().map(|s| Value::from(s.clone())).collect();
        let inst = PrincipleInstance::new(labels, succ, sub, None, None).expect("⊳* is acyclic when ⊳ is");
        Ok((seqs, inst))
    }
}

/// The diagonal `γ̃` of a chain `γ` with `|γₘ| = N+m` and `γₘ ◀ γₘ₊₁`:
/// `γ̃ₙ = (γ₀)ₙ` for `n < N` and `γ̃_{N+m} = (γ_{m+1})_{N+m}`.
pub struct Diagonal {
    gamma: LazySequence<Vec<usize>>,
    n0: usize,
}

pub fn diagonal(gamma: LazySequence<Vec<usize>>, n0: usize) -> Diagonal {
    Diagonal { gamma, n0 }
}

impl Diagonal {
    /// Checks the chain precondition at index `m` (length of `γₘ` and
    /// `γₘ₊₁`, and `γₘ ◀ γₘ₊₁`).
    fn coherent_at(&self, m: usize) -> Result<(), Lemma34Error> {
        let (g, h) = (self.gamma.get(m), self.gamma.get(m + 1));
        let fail = |reason: String| Err(Lemma34Error::Incoherent { index: m, reason });
        if g.len() != self.n0 + m {
            return fail(format!("|γ_{m}| = {}, expected {}", g.len(), self.n0 + m));
        }
        if h.len() != self.n0 + m + 1 {
            return fail(format!("|γ_{}| = {}, expected {}", m + 1, h.len(), self.n0 + m + 1));
        }
        if !is_prefix(&g, &h) {
            return fail(format!("γ_{m} is not a prefix of γ_{}", m + 1));
        }
        Ok(())
    }

    pub fn get(&self, n: usize) -> Result<usize, Lemma34Error> {
        if n < self.n0 {
            self.coherent_at(0)?;
            Ok(self.gamma.get(0)[n])
        } else {
            let m = n - self.n0;
            self.coherent_at(m)?;
            Ok(self.gamma.get(m + 1)[n])
        }
    }

    pub fn prefix(&self, n: usize) -> Result<Vec<usize>, Lemma34Error> {
        (0..n).map(|i| self.get(i)).collect()
    }
}

/// What one trial of the proof bookkeeping checked, for reports.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lengths: usize,
    pub diagonal: usize,
    pub lex_transfers: usize,
    pub end_games: usize,
    pub violations: Vec<String>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Replays the bookkeeping of the construction on the coherent chain
/// `γₘ = ᾱ(N+m)`, with `β` diverging from `γ̃` at `diverge` to `y`
/// (`γ̃_diverge ⊳ y`) and continuing with `tail`, for indices below
/// `probes`.
pub fn check_identities(
    l: &Lemma34,
    alpha: &LazySequence<usize>,
    n0: usize,
    diverge: Option<(usize, usize)>,
    tail: &LazySequence<usize>,
    probes: usize,
) -> IdentityCheck {
    let mut out = IdentityCheck::default();
    let a = alpha.clone();
    let gamma = LazySequence::new(move |m| a.prefix(n0 + m));
    let chain: Vec<Vec<usize>> = (0..=probes + 1).map(|m| gamma.get(m)).collect();
    for (m, g) in chain.iter().enumerate() {
        out.lengths += 1;
        if g.len() != n0 + m {
            out.violations.push(format!("|γ_{m}| = {} ≠ N+m = {}", g.len(), n0 + m));
        }
    }
    let diag = diagonal(gamma, n0);
    let tilde = match diag.prefix(n0 + probes) {
        Ok(t) => t,
        Err(e) => {
            out.violations.push(e.to_string());
            return out;
        }
    };
    for (n, &v) in tilde.iter().enumerate() {
        out.diagonal += 1;
        if v != alpha.get(n) {
            out.violations.push(format!("γ̃_{n} = {v} but α_{n} = {}", alpha.get(n)));
        }
    }

    // γ̃ ⊳lex β implies γ ⊳*lex δ with δₙ = β̄(N+n), at the index the
    // proof names: 0 below N, otherwise k+1 for divergence at N+k.
    if let Some((m, y)) = diverge.filter(|&(m, y)| m < tilde.len() && l.sub.holds(tilde[m], y)) {
        let beta = LazySequence::extend(&tilde[..m], LazySequence::extend(&[y], tail.clone()));
        let delta: Vec<Vec<usize>> = (0..=probes + 1).map(|n| beta.prefix(n0 + n)).collect();
        out.lex_transfers += 1;
        for (n, (g, d)) in chain.iter().zip(&delta).enumerate() {
            if g.len() != d.len() {
                out.violations.push(format!("|γ_{n}| ≠ |δ_{n}|"));
            }
        }
        let expected = if m < n0 { 0 } else { m - n0 + 1 };
        match l.sub_star_lex(&chain, &delta) {
            Some(k) if k == expected => {}
            found => out.violations.push(format!(
                "γ̃ ⊳lex β at {m} should give γ ⊳*lex δ at {expected}, found {found:?}"
            )),
        }
        // the δ side: a non-descent δₙ ⊁ δₙ₊₁ means B(β̄k) for some k ≤ N+n+1
        for n in 0..probes {
            if !l.succ(&delta[n], &delta[n + 1]) {
                let bar = beta.prefix(n0 + n + 1);
                if !(0..=n0 + n + 1).any(|k| l.predicate.holds(&bar[..k])) {
                    out.violations.push(format!("δ_{n} ⊁ δ_{} without a B-prefix of β", n + 1));
                }
            }
        }
    }

    // end game: B(γ̃̄n) forces γ_{n∸N} ⊁ γ_{(n∸N)+1}
    for n in 0..tilde.len() {
        if l.predicate.holds(&tilde[..n]) {
            out.end_games += 1;
            let j = n.saturating_sub(n0);
            if j + 1 < chain.len() && l.succ(&chain[j], &chain[j + 1]) {
                out.violations.push(format!("B(γ̃̄{n}) but γ_{j} ≻ γ_{}", j + 1));
            }
        }
    }
    out
}

/// `B(c)`: `c` has a non-descent. Then `U(α)` is `sWF(α)`, and the
/// transformed `≻` relates `a` to `a ∗ x` exactly when `a ∗ x` descends.
pub fn non_descent_predicate(succ: FiniteRelation) -> OpenPredicate {
    OpenPredicate::new(move |c| c.windows(2).any(|w| !succ.holds(w[0], w[1])))
}

/// Runs [`check_identities`] on an instance, with `B` the non-descent
/// predicate of its `≻`: for every lasso `α` of total length at most 3,
/// every `N < cap`, and every divergence `(m, y)` below the probe bound,
/// with `α` itself as the tail after the divergence.
pub fn check_on_instance(inst: &PrincipleInstance, cap: usize) -> IdentityCheck {
    let l = Lemma34::new(non_descent_predicate(inst.succ.clone()), inst.sub.clone());
    let mut total = IdentityCheck::default();
    for alpha in crate::sequence::all_lassos(inst.len(), 3) {
        let seq = alpha.to_sequence();
        for n0 in 0..cap {
            let mut points = vec![None];
            points.extend((0..n0 + cap).flat_map(|m| l.sub.successors(alpha.get(m)).map(move |y| Some((m, y)))));
            for diverge in points {
                let c = check_identities(&l, &seq, n0, diverge, &seq, cap);
                total.lengths += c.lengths;
                total.diagonal += c.diagonal;
                total.lex_transfers += c.lex_transfers;
                total.end_games += c.end_games;
                total.violations.extend(c.violations);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::Lasso;

    fn gt(n: usize) -> FiniteRelation {
        FiniteRelation::from_fn(n, |a, b| a > b)
    }

    #[test]
    fn transform_examples() {
        let l = Lemma34::new(OpenPredicate::never(), gt(3));
        assert!(l.succ(&[1], &[1, 2]));
        assert!(!l.succ(&[1], &[0, 2]));
        assert!(!l.succ(&[1], &[1, 2, 0]));

        let l = Lemma34::new(OpenPredicate::new(|c| c.len() >= 2), gt(3));
        for a in [vec![0], vec![2, 1]] {
            for x in 0..3 {
                let mut b = a.clone();
                b.push(x);
                assert!(!l.succ(&a, &b));
            }
        }
        assert!(l.succ(&[], &[2]));

        let l = Lemma34::new(OpenPredicate::never(), gt(6));
        assert!(l.sub_star(&[1], &[0, 5]));
        assert!(!l.sub_star(&[1, 0], &[1]));
        assert!(!l.sub_star(&[0], &[1]));
    }

    #[test]
    fn materialized_instance() {
        let l = Lemma34::new(OpenPredicate::never(), gt(2));
        assert_eq!(l.materialize(1).unwrap_err(), Lemma34Error::CapTooSmall(1));
        let (seqs, inst) = l.materialize(2).unwrap();
        assert_eq!(seqs.len(), 1 + 2 + 4);
        // only extensions by one element, none from the cap
        assert_eq!(inst.succ.edge_count(), 2 + 4);
        assert!(inst.sub.is_acyclic());
        assert!(inst.succ.is_acyclic());
    }

    #[test]
    fn diagonal_examples() {
        let alpha: Lasso<usize> = "3,1,4,1,5;9,2".parse().unwrap();
        let a = alpha.to_sequence();
        for n0 in [0, 2] {
            let a2 = a.clone();
            let gamma = LazySequence::new(move |m| a2.prefix(n0 + m));
            assert_eq!(diagonal(gamma, n0).prefix(12).unwrap(), alpha.take(12));
        }
        let broken = LazySequence::new(|m: usize| match m {
            2 => vec![7, 7],
            m => vec![0; m],
        });
        let d = diagonal(broken, 0);
        assert_eq!(d.get(0), Ok(0));
        assert!(matches!(d.get(1), Err(Lemma34Error::Incoherent { index: 1, .. })));
    }

    #[test]
    fn identities_hold_on_an_example() {
        let l = Lemma34::new(OpenPredicate::new(|c| c.ends_with(&[0, 0])), gt(3));
        let alpha: Lasso<usize> = "2,1;0".parse().unwrap();
        let tail: Lasso<usize> = ";1,0".parse().unwrap();
        for m in 0..5 {
            let check = check_identities(&l, &alpha.to_sequence(), 2, Some((m, 0)), &tail.to_sequence(), 6);
            assert!(check.passed(), "{:?}", check.violations);
        }
    }

    #[test]
    fn instance_check() {
        let inst = PrincipleInstance::unlabeled(gt(3), gt(3), None, None).unwrap();
        let c = check_on_instance(&inst, 3);
        assert!(c.passed(), "{:?}", c.violations.first());
        assert!(c.lex_transfers > 0 && c.end_games > 0);
        let b = non_descent_predicate(gt(3));
        assert!(!b.holds(&[2, 1]) && b.holds(&[2, 2]));
    }

    #[test]
    fn open_predicate_witness() {
        let b = OpenPredicate::new(|c| c.last() == Some(&3));
        let alpha: Lasso<usize> = "5,4,3;7".parse().unwrap();
        assert_eq!(b.witness(&alpha.to_sequence(), 10), Some(3));
        assert_eq!(b.witness(&LazySequence::constant(0), 10), None);
    }
}
