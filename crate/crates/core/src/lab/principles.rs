//! Sequence and element well-foundedness, and the two minimality notions.
//!
//! On a finite carrier, "some sequence through `x` descends forever" is the
//! same as "a `≻`-cycle is reachable from `x` along `≻`". Every check here
//! reduces to that graph question, and the witnesses it produces are
//! lassos, so the quantifiers over infinite sequences range over lassos.

use serde::{Deserialize, Serialize};

use super::instance::PrincipleInstance;
use crate::relations::FiniteRelation;
use crate::sequence::{all_lassos, Lasso, LazySequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "index", rename_all = "snake_case")]
pub enum Swf {
    /// The least `n` with `αₙ ⊁ αₙ₊₁`.
    Witness(usize),
    Unknown,
}

/// Looks for the first non-descent among the pairs at `0..=fuel`.
pub fn swf(succ: &FiniteRelation, alpha: &LazySequence<usize>, fuel: usize) -> Swf {
    let mut cur = alpha.get(0);
    for n in 0..=fuel {
        let next = alpha.get(n + 1);
        if !succ.holds(cur, next) {
            return Swf::Witness(n);
        }
        cur = next;
    }
    Swf::Unknown
}

/// Exact for lassos: after the prefix and one period the pairs repeat.
/// `None` means the lasso descends forever.
pub fn swf_lasso(succ: &FiniteRelation, alpha: &Lasso<usize>) -> Option<usize> {
    (0..alpha.period_end()).find(|&n| !succ.holds(alpha.get(n), alpha.get(n + 1)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "chain", rename_all = "snake_case")]
pub enum Ewf {
    Yes,
    /// A descending walk from `x` ending at its first repeated element.
    CounterChain(Vec<usize>),
}

pub fn ewf(inst: &PrincipleInstance, x: usize) -> Ewf {
    let wf = inst.ewf_table();
    match inst.succ.descending_walk(x, &wf) {
        None => Ewf::Yes,
        Some(chain) => Ewf::CounterChain(chain),
    }
}

/// The bad sequence starting at `y` that follows [`FiniteRelation::descending_walk`].
pub fn bad_lasso_from(succ: &FiniteRelation, wf: &[bool], y: usize) -> Option<Lasso<usize>> {
    let walk = succ.descending_walk(y, wf)?;
    let last = *walk.last().unwrap();
    let j = walk.iter().position(|&v| v == last).unwrap();
    Some(Lasso::new(walk[..j].to_vec(), walk[j..walk.len() - 1].to_vec()).expect("nonempty cycle"))
}

/// Whether `prefix` extends to a bad (everywhere descending) sequence.
pub fn extends_to_bad(succ: &FiniteRelation, wf: &[bool], prefix: &[usize]) -> bool {
    match prefix.last() {
        None => wf.iter().any(|&b| !b),
        Some(&last) => prefix.windows(2).all(|w| succ.holds(w[0], w[1])) && !wf[last],
    }
}

/// How the tails of the sequences below `α` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// One tail per `(n, y)`: the bad sequence from `y` when there is one,
    /// otherwise the constant `y`. Decides MIN exactly.
    Canonical,
    /// Every lasso tail of total length up to `max_len`; an independent,
    /// exhaustive oracle.
    Lassos { max_len: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinResult {
    pub holds: bool,
    pub tested: usize,
    /// A sequence below `α` that descends forever.
    pub counterexample: Option<Lasso<usize>>,
}

/// The sequences `β` with `α ⊳lex β`: `β̄n = ᾱn`, `αₙ ⊳ βₙ`, any tail.
///
/// For a lasso `α` the situations at `n` repeat with its period, so
/// divergence points up to one past the period suffice.
pub fn min_check(inst: &PrincipleInstance, alpha: &Lasso<usize>, scope: TailMode) -> MinResult {
    let wf = inst.ewf_table();
    let candidates: Vec<Lasso<usize>> = match scope {
        TailMode::Canonical => canonical_below(inst, &wf, alpha).into_iter().map(|(_, _, b)| b).collect(),
        TailMode::Lassos { max_len } => {
            let tails = all_lassos(inst.len(), max_len);
            divergences(inst, alpha)
                .flat_map(|(n, y)| tails.iter().map(move |t| alpha.splice(n, y, t)))
                .collect()
        }
    };
    let mut tested = 0;
    for beta in candidates {
        tested += 1;
        if swf_lasso(&inst.succ, &beta).is_none() {
            return MinResult {
                holds: false,
                tested,
                counterexample: Some(beta),
            };
        }
    }
    MinResult {
        holds: true,
        tested,
        counterexample: None,
    }
}

/// The points `(n, y)` with `αₙ ⊳ y`, for `n` up to one past the period.
fn divergences<'a>(inst: &'a PrincipleInstance, alpha: &'a Lasso<usize>) -> impl Iterator<Item = (usize, usize)> + 'a {
    (0..=alpha.period_end()).flat_map(move |n| inst.sub.successors(alpha.get(n)).map(move |y| (n, y)))
}

/// One sequence per divergence point `(n, y)`: `ᾱn ∗ y` followed by the bad
/// sequence from `y` when there is one, otherwise by `y` forever.
pub(crate) fn canonical_below(
    inst: &PrincipleInstance,
    wf: &[bool],
    alpha: &Lasso<usize>,
) -> Vec<(usize, usize, Lasso<usize>)> {
    divergences(inst, alpha)
        .map(|(n, y)| {
            let from_y = bad_lasso_from(&inst.succ, wf, y).unwrap_or_else(|| Lasso::eventually_constant(vec![], y));
            (n, y, from_y.prepend(&alpha.take(n)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EminResult {
    pub holds: bool,
    /// `(n, y)` with `αₙ₋₁ ≻ y` (dropped at `n = 0`), `αₙ ⊳ y` and `y` not
    /// well-founded.
    pub witness: Option<(usize, usize)>,
}

/// Checks the eMIN body for `n ≤ fuel`.
pub fn emin_check(inst: &PrincipleInstance, alpha: &LazySequence<usize>, fuel: usize) -> EminResult {
    let wf = inst.ewf_table();
    emin_with(inst, &wf, |n| alpha.get(n), fuel)
}

/// eMIN for a lasso, exact: indices past one period repeat earlier ones.
pub fn emin_lasso(inst: &PrincipleInstance, alpha: &Lasso<usize>) -> EminResult {
    let wf = inst.ewf_table();
    emin_with(inst, &wf, |n| alpha.get(n), alpha.period_end())
}

pub(crate) fn emin_with(inst: &PrincipleInstance, wf: &[bool], at: impl Fn(usize) -> usize, fuel: usize) -> EminResult {
    for n in 0..=fuel {
        let here = at(n);
        let prev = n.checked_sub(1).map(&at);
        for y in inst.sub.successors(here) {
            let guarded = prev.is_none_or(|p| inst.succ.holds(p, y));
            if guarded && !wf[y] {
                return EminResult {
                    holds: false,
                    witness: Some((n, y)),
                };
            }
        }
    }
    EminResult {
        holds: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::Value;

    fn inst(n: usize, succ: &[(usize, usize)], sub: &[(usize, usize)]) -> PrincipleInstance {
        PrincipleInstance::unlabeled(
            FiniteRelation::from_edges(n, succ.iter().copied()),
            FiniteRelation::from_edges(n, sub.iter().copied()),
            None,
            None,
        )
        .unwrap()
    }

    fn nat_gt(n: usize) -> FiniteRelation {
        FiniteRelation::from_fn(n, |a, b| a > b)
    }

    #[test]
    fn swf_examples() {
        let gt = nat_gt(10);
        let desc: Lasso<usize> = "3,2,1;0".parse().unwrap();
        assert_eq!(swf(&gt, &desc.to_sequence(), 64), Swf::Witness(3));
        assert_eq!(swf_lasso(&gt, &desc), Some(3));
        assert_eq!(swf(&gt, &LazySequence::constant(4), 64), Swf::Witness(0));
        let cyc = FiniteRelation::from_edges(2, [(0, 1), (1, 0)]);
        let ab: Lasso<usize> = ";0,1".parse().unwrap();
        assert_eq!(swf(&cyc, &ab.to_sequence(), 1000), Swf::Unknown);
        assert_eq!(swf_lasso(&cyc, &ab), None);
    }

    #[test]
    fn ewf_examples() {
        let i = PrincipleInstance::unlabeled(nat_gt(10), FiniteRelation::empty(10), None, None).unwrap();
        assert_eq!(ewf(&i, 3), Ewf::Yes);
        assert_eq!(ewf(&i, 0), Ewf::Yes);
        let i = inst(2, &[(0, 1), (1, 0)], &[]);
        assert_eq!(ewf(&i, 0), Ewf::CounterChain(vec![0, 1, 0]));
    }

    #[test]
    fn min_examples() {
        // nothing below any element: empty scope
        let i = inst(2, &[(0, 1), (1, 0)], &[]);
        let r = min_check(&i, &";0,1".parse().unwrap(), TailMode::Canonical);
        assert!(r.holds && r.tested == 0);

        // (ℕ<6, >, ⊳ = >), α = 0,1,2,…: all splices descend only finitely
        let i = PrincipleInstance::unlabeled(nat_gt(6), nat_gt(6), None, None).unwrap();
        let up: Lasso<usize> = "0,1,2,3,4;5".parse().unwrap();
        assert!(min_check(&i, &up, TailMode::Canonical).holds);
        assert!(min_check(&i, &up, TailMode::Lassos { max_len: 3 }).holds);

        // 2 ⊳ 0 and 0 sits on the cycle 0 ≻ 1 ≻ 0
        let i = inst(3, &[(0, 1), (1, 0)], &[(2, 0)]);
        let r = min_check(&i, &";2".parse().unwrap(), TailMode::Canonical);
        assert!(!r.holds);
        assert_eq!(swf_lasso(&i.succ, r.counterexample.as_ref().unwrap()), None);
        assert!(!min_check(&i, &";2".parse().unwrap(), TailMode::Lassos { max_len: 2 }).holds);
    }

    #[test]
    fn emin_examples() {
        let i = inst(2, &[(0, 1), (1, 0)], &[]);
        assert!(emin_lasso(&i, &";0,1".parse().unwrap()).holds);

        // n = 0: 2 ⊳ 0 with 0 not well-founded, nothing before α₀
        let i = inst(3, &[(0, 1), (1, 0)], &[(2, 0)]);
        let r = emin_lasso(&i, &";2".parse().unwrap());
        assert_eq!(r.witness, Some((0, 0)));
        // at n = 1 the guard α₀ ≻ y fails, so it does not count
        assert!(emin_lasso(&i, &"0;2".parse().unwrap()).holds);

        let i = PrincipleInstance::unlabeled(nat_gt(5), nat_gt(5), None, None).unwrap();
        assert!(emin_check(&i, &LazySequence::new(|n| 4 - n.min(4)), 64).holds);
    }

    #[test]
    fn labels_default_to_numbers() {
        let i = inst(2, &[], &[]);
        assert_eq!(i.labels, vec![Value::from(0), Value::from(1)]);
    }

    fn arb_instance() -> impl Strategy<Value = PrincipleInstance> {
        (1usize..5).prop_flat_map(|n| {
            (
                prop::collection::vec(any::<bool>(), n * n),
                prop::collection::vec(prop::bool::weighted(0.3), n * n),
            )
                .prop_map(move |(s, t)| {
                    let succ = FiniteRelation::from_fn(n, |i, j| s[i * n + j]);
                    // sub only points to smaller indices, hence acyclic
                    let sub = FiniteRelation::from_fn(n, |i, j| j < i && t[i * n + j]);
                    PrincipleInstance::unlabeled(succ, sub, None, None).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn canonical_min_matches_lasso_oracle(i in arb_instance(), seed in 0usize..1000) {
            let lassos = all_lassos(i.len(), 3);
            let alpha = &lassos[seed % lassos.len()];
            let fast = min_check(&i, alpha, TailMode::Canonical).holds;
            let slow = min_check(&i, alpha, TailMode::Lassos { max_len: i.len() }).holds;
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn ewf_matches_lasso_search(i in arb_instance()) {
            let lassos = all_lassos(i.len(), i.len());
            for x in 0..i.len() {
                let bad_from_x = lassos.iter().any(|l| l.get(0) == x && swf_lasso(&i.succ, l).is_none());
                prop_assert_eq!(ewf(&i, x) == Ewf::Yes, !bad_from_x);
            }
        }

        #[test]
        fn swf_lazy_agrees_with_exact(i in arb_instance(), seed in 0usize..1000) {
            let lassos = all_lassos(i.len(), 3);
            let alpha = &lassos[seed % lassos.len()];
            let lazy = swf(&i.succ, &alpha.to_sequence(), 64);
            match swf_lasso(&i.succ, alpha) {
                Some(n) => prop_assert_eq!(lazy, Swf::Witness(n)),
                None => prop_assert_eq!(lazy, Swf::Unknown),
            }
        }
    }
}
