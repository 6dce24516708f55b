//! The equivalence of the two premises: `∀α (MIN(α) → sWF(α))` and
//! `∀α (eMIN(α) → sWF(α))`.
//!
//! Each direction is an adapter that decides one premise at a given `α`
//! using only a checker for the other premise plus the case analysis of
//! the equivalence argument. Running both adapters against the direct
//! checkers over every lasso up to a length bound tests the argument
//! extensionally.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::PrincipleInstance;
use super::principles::{bad_lasso_from, canonical_below, emin_lasso, min_check, swf_lasso, TailMode};
use crate::sequence::{all_lassos, Lasso};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// From a checker for the MIN premise to one for the eMIN premise.
    MinToEmin,
    /// From a checker for the eMIN premise to one for the MIN premise.
    EminToMin,
}

/// `MIN(α) → sWF(α)` at one `α`, decided directly.
pub fn tp_premise_at(inst: &PrincipleInstance, alpha: &Lasso<usize>) -> bool {
    !min_check(inst, alpha, TailMode::Canonical).holds || swf_lasso(&inst.succ, alpha).is_some()
}

/// `eMIN(α) → sWF(α)` at one `α`, decided directly.
pub fn etp_premise_at(inst: &PrincipleInstance, alpha: &Lasso<usize>) -> bool {
    !emin_lasso(inst, alpha).holds || swf_lasso(&inst.succ, alpha).is_some()
}

/// The outcome of running an adapter at one `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterOutcome {
    /// The target premise at `α` as derived through the source checker.
    pub holds: bool,
    /// Whether the source checker had to be consulted.
    pub consulted_source: bool,
    /// A step of the case analysis that did not go through.
    pub failure: Option<String>,
}

/// A premise checker, as the adapters consume it.
pub type PremiseSource<'a> = Box<dyn Fn(&Lasso<usize>) -> bool + Send + Sync + 'a>;

/// Decides the target premise at `α` from a source-premise checker.
pub struct PremiseAdapter<'a> {
    inst: &'a PrincipleInstance,
    wf: Vec<bool>,
    direction: Direction,
    source: PremiseSource<'a>,
}

/// Builds the adapter for `direction`, with the direct checker of the
/// source premise plugged in.
pub fn lemma44_translate(direction: Direction, inst: &PrincipleInstance) -> PremiseAdapter<'_> {
    let source: PremiseSource<'_> = match direction {
        Direction::MinToEmin => Box::new(move |a| tp_premise_at(inst, a)),
        Direction::EminToMin => Box::new(move |a| etp_premise_at(inst, a)),
    };
    PremiseAdapter::with_source(direction, inst, source)
}

impl<'a> PremiseAdapter<'a> {
    pub fn with_source(
        direction: Direction,
        inst: &'a PrincipleInstance,
        source: PremiseSource<'a>,
    ) -> Self {
        PremiseAdapter {
            inst,
            wf: inst.ewf_table(),
            direction,
            source,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn check(&self, alpha: &Lasso<usize>) -> AdapterOutcome {
        match self.direction {
            Direction::MinToEmin => self.min_to_emin(alpha),
            Direction::EminToMin => self.emin_to_min(alpha),
        }
    }

    /// Assuming eMIN(α), every `β` below `α` is well-founded: at the
    /// divergence `n` either `αₙ₋₁ = βₙ₋₁ ⊁ βₙ`, or `αₙ₋₁ ≻ βₙ` (or `n = 0`)
    /// and then `βₙ` is well-founded by eMIN. So MIN(α) holds and the
    /// source premise gives sWF(α).
    fn min_to_emin(&self, alpha: &Lasso<usize>) -> AdapterOutcome {
        let inst = self.inst;
        if !emin_lasso(inst, alpha).holds {
            return vacuous();
        }
        for (n, y, beta) in canonical_below(inst, &self.wf, alpha) {
            let guarded = n == 0 || inst.succ.holds(alpha.get(n - 1), y);
            let ok = if !guarded {
                swf_lasso(&inst.succ, &beta).is_some_and(|m| m < n)
            } else {
                self.wf[y] && swf_lasso(&inst.succ, &beta).is_some()
            };
            if !ok {
                return AdapterOutcome {
                    holds: false,
                    consulted_source: false,
                    failure: Some(format!("below {alpha} at ({n}, {y}): {beta} is not well-founded")),
                };
            }
        }
        consult(&self.source, alpha)
    }

    /// Assuming MIN(α) and, for contradiction, that `α` descends forever:
    /// any `y` with `αₙ₋₁ ≻ y` and `αₙ ⊳ y` that starts a bad sequence `β`
    /// makes `ᾱn ∗ β` a bad sequence below `α`. So eMIN(α) holds and the
    /// source premise gives sWF(α).
    fn emin_to_min(&self, alpha: &Lasso<usize>) -> AdapterOutcome {
        let inst = self.inst;
        if !min_check(inst, alpha, TailMode::Canonical).holds {
            return vacuous();
        }
        if swf_lasso(&inst.succ, alpha).is_some() {
            return AdapterOutcome {
                holds: true,
                consulted_source: false,
                failure: None,
            };
        }
        for n in 0..=alpha.period_end() {
            for y in inst.sub.successors(alpha.get(n)) {
                let guarded = n == 0 || inst.succ.holds(alpha.get(n - 1), y);
                if !guarded {
                    continue;
                }
                if let Some(beta) = bad_lasso_from(&inst.succ, &self.wf, y) {
                    let spliced = beta.prepend(&alpha.take(n));
                    let failure = if swf_lasso(&inst.succ, &spliced).is_none() {
                        format!("{spliced} is bad and below {alpha}, yet MIN({alpha}) was established")
                    } else {
                        format!("{spliced} should be bad: {alpha} descends and {} ≻ {y}", alpha.get(n.max(1) - 1))
                    };
                    return AdapterOutcome {
                        holds: false,
                        consulted_source: false,
                        failure: Some(failure),
                    };
                }
            }
        }
        consult(&self.source, alpha)
    }
}

fn vacuous() -> AdapterOutcome {
    AdapterOutcome {
        holds: true,
        consulted_source: false,
        failure: None,
    }
}

fn consult(source: &(dyn Fn(&Lasso<usize>) -> bool + Send + Sync + '_), alpha: &Lasso<usize>) -> AdapterOutcome {
    AdapterOutcome {
        holds: source(alpha),
        consulted_source: true,
        failure: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma44Report {
    pub max_len: usize,
    pub tested: usize,
    pub tp_premise: bool,
    pub etp_premise: bool,
    /// First `α` (in enumeration order) where the MIN premise fails.
    pub tp_witness: Option<Lasso<usize>>,
    pub etp_witness: Option<Lasso<usize>>,
    /// Every `α` where the two premises disagree.
    pub disagreements: Vec<Lasso<usize>>,
    /// Every `α` where an adapter's answer differs from the direct check of
    /// its target premise, or its case analysis broke down.
    pub adapter_failures: Vec<String>,
}

impl Lemma44Report {
    pub fn agree(&self) -> bool {
        self.tp_premise == self.etp_premise && self.tp_witness == self.etp_witness && self.disagreements.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.agree() && self.adapter_failures.is_empty()
    }
}

/// Compares both premises and both adapters on every lasso over the
/// carrier of total length at most `max_len`.
pub fn lemma44_check(inst: &PrincipleInstance, max_len: usize) -> Lemma44Report {
    let lassos = all_lassos(inst.len(), max_len);
    let to_emin = lemma44_translate(Direction::MinToEmin, inst);
    let to_min = lemma44_translate(Direction::EminToMin, inst);
    let rows: Vec<(bool, bool, Vec<String>)> = lassos
        .par_iter()
        .map(|alpha| {
            let tp = tp_premise_at(inst, alpha);
            let etp = etp_premise_at(inst, alpha);
            let mut failures = Vec::new();
            for (adapter, target) in [(&to_emin, etp), (&to_min, tp)] {
                let out = adapter.check(alpha);
                if let Some(f) = out.failure {
                    failures.push(f);
                } else if out.holds != target {
                    failures.push(format!("{:?} adapter says {} at {alpha}", adapter.direction(), out.holds));
                }
            }
            (tp, etp, failures)
        })
        .collect();
    let first_fail = |pick: fn(&(bool, bool, Vec<String>)) -> bool| {
        rows.iter().position(|r| !pick(r)).map(|i| lassos[i].clone())
    };
    let tp_witness = first_fail(|r| r.0);
    let etp_witness = first_fail(|r| r.1);
    Lemma44Report {
        max_len,
        tested: lassos.len(),
        tp_premise: tp_witness.is_none(),
        etp_premise: etp_witness.is_none(),
        tp_witness,
        etp_witness,
        disagreements: lassos
            .iter()
            .zip(&rows)
            .filter(|(_, r)| r.0 != r.1)
            .map(|(a, _)| a.clone())
            .collect(),
        adapter_failures: rows.into_iter().flat_map(|r| r.2).collect(),
    }
}
