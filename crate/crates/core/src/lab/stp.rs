//! The decomposition-based principle on finite carriers, and the abstract
//! path ordering consequence that reduces to it.
//!
//! With `≻₀` a decomposition of `≻`, `A = {x : ∀y ⊲ x. y well-founded}`,
//! and `≻₀` well-founded on `A` from every `x`, every element is
//! well-founded. The checker verifies the hypotheses exhaustively and,
//! when they hold, the conclusion; a failing conclusion under passing
//! hypotheses is reported as a falsification, which points at a bug here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::PrincipleInstance;
use crate::relations::{check_decomposition, DecompositionReport, FiniteRelation};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StpError {
    #[error("the instance has no {0} relation")]
    MissingRelation(&'static str),
}

/// An `x ∈ A` from which the given relation has an infinite descent inside `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedDescent {
    pub x: String,
    /// The descending walk from `x`, ending at its first repeated element.
    pub chain: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StpVerdict {
    /// Hypotheses hold and every element is well-founded.
    Pass,
    /// Some hypothesis fails, so nothing is concluded.
    HypothesesFail,
    /// Hypotheses hold but some element is not well-founded.
    Falsified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StpReport {
    pub decomposition: DecompositionReport<String>,
    /// The elements of `A`.
    pub a_set: Vec<String>,
    pub ewf_a_failures: Vec<RestrictedDescent>,
    pub hypotheses_hold: bool,
    /// Whether every element is well-founded, asserted only when the
    /// hypotheses hold.
    pub conclusion: Option<bool>,
    /// Elements that are not well-founded.
    pub non_wf: Vec<String>,
}

impl StpReport {
    pub fn verdict(&self) -> StpVerdict {
        match self.conclusion {
            None => StpVerdict::HypothesesFail,
            Some(true) => StpVerdict::Pass,
            Some(false) => StpVerdict::Falsified,
        }
    }

    /// No falsification: passing hypotheses came with the conclusion.
    pub fn sound(&self) -> bool {
        self.verdict() != StpVerdict::Falsified
    }
}

pub fn stp_check(inst: &PrincipleInstance) -> Result<StpReport, StpError> {
    let succ0 = inst.succ0.as_ref().ok_or(StpError::MissingRelation("succ0"))?;
    Ok(stp_check_with(inst, succ0))
}

/// [`stp_check`] with an explicit `≻₀`.
pub fn stp_check_with(inst: &PrincipleInstance, succ0: &FiniteRelation) -> StpReport {
    let n = inst.len();
    let ids: Vec<usize> = (0..n).collect();
    let raw = check_decomposition(
        &ids,
        |&x, &y| inst.succ.holds(x, y),
        |&x, &y| succ0.holds(x, y),
        |&x| inst.sub.successors(x).collect(),
    );
    let decomposition = DecompositionReport {
        pairs_checked: raw.pairs_checked,
        violations: raw
            .violations
            .into_iter()
            .map(|v| crate::relations::DecompositionViolation {
                law: v.law,
                x: inst.label(v.x),
                y: inst.label(v.y),
                u: v.u.map(|u| inst.label(u)),
            })
            .collect(),
    };
    let wf = inst.ewf_table();
    let a = inst.a_set(&wf);
    let ewf_a_failures = restricted_descents(inst, succ0, &a);
    let hypotheses_hold = decomposition.passed() && ewf_a_failures.is_empty();
    let non_wf: Vec<String> = (0..n).filter(|&x| !wf[x]).map(|x| inst.label(x)).collect();
    StpReport {
        decomposition,
        a_set: (0..n).filter(|&x| a[x]).map(|x| inst.label(x)).collect(),
        ewf_a_failures,
        hypotheses_hold,
        conclusion: hypotheses_hold.then_some(non_wf.is_empty()),
        non_wf,
    }
}

/// Every `x ∈ A` that starts an infinite `rel`-descent staying in `A`.
fn restricted_descents(inst: &PrincipleInstance, rel: &FiniteRelation, a: &[bool]) -> Vec<RestrictedDescent> {
    let inside = rel.restrict(a);
    let wf_inside = inside.wellfounded_elements();
    (0..inst.len())
        .filter(|&x| a[x] && !wf_inside[x])
        .map(|x| RestrictedDescent {
            x: inst.label(x),
            chain: inside
                .descending_walk(x, &wf_inside)
                .expect("non-well-founded element has a walk")
                .into_iter()
                .map(|v| inst.label(v))
                .collect(),
        })
        .collect()
}

/// `x ≻₀ y :≡ x ≫ y ∧ ∀u (y ⊳ u → x ≻ u)`.
pub fn induced_succ0(inst: &PrincipleInstance, gg: &FiniteRelation) -> FiniteRelation {
    FiniteRelation::from_fn(inst.len(), |x, y| {
        gg.holds(x, y) && inst.sub.successors(y).all(|u| inst.succ.holds(x, u))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlReport {
    /// Pairs `x ≻ y` covered by neither `x ⊳ u ⪰ y` nor the induced `≻₀`.
    pub uncovered: Vec<(String, String)>,
    pub sub_acyclic: bool,
    /// Elements of `A` that are not accessible in `≫` restricted to `A`.
    pub inaccessible: Vec<RestrictedDescent>,
    pub hypotheses_hold: bool,
    /// Every element well-founded, asserted only when the hypotheses hold.
    pub conclusion: Option<bool>,
    /// The decomposition check on the induced `≻₀`.
    pub stp: StpReport,
}

impl GlReport {
    /// The hypotheses hold but the decomposition check on the induced
    /// `≻₀` does not pass.
    pub fn discrepancy(&self) -> bool {
        self.hypotheses_hold && self.stp.verdict() != StpVerdict::Pass
    }

    pub fn sound(&self) -> bool {
        self.conclusion != Some(false) && !self.discrepancy()
    }
}

pub fn gl_check(inst: &PrincipleInstance) -> Result<GlReport, StpError> {
    let gg = inst.gg.as_ref().ok_or(StpError::MissingRelation("gg"))?;
    let n = inst.len();
    let succ0 = induced_succ0(inst, gg);
    let uncovered = inst
        .succ
        .edges()
        .into_iter()
        .filter(|&(x, y)| {
            let via_sub = inst.sub.successors(x).any(|u| u == y || inst.succ.holds(u, y));
            !via_sub && !succ0.holds(x, y)
        })
        .map(|(x, y)| (inst.label(x), inst.label(y)))
        .collect::<Vec<_>>();
    let sub_acyclic = inst.sub.is_acyclic();
    let wf = inst.ewf_table();
    let a = inst.a_set(&wf);
    let inaccessible = restricted_descents(inst, gg, &a);
    let hypotheses_hold = uncovered.is_empty() && sub_acyclic && inaccessible.is_empty();
    let all_wf = wf.iter().all(|&b| b);
    debug_assert_eq!(wf.len(), n);
    Ok(GlReport {
        uncovered,
        sub_acyclic,
        inaccessible,
        hypotheses_hold,
        conclusion: hypotheses_hold.then_some(all_wf),
        stp: stp_check_with(inst, &succ0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rpo::{PrecedenceStatus, RpoInstance};
    use crate::term::Signature;

    fn rel(n: usize, edges: &[(usize, usize)]) -> FiniteRelation {
        FiniteRelation::from_edges(n, edges.iter().copied())
    }

    fn ackermann_universe(depth: usize) -> PrincipleInstance {
        let sig = Signature::from_symbols([("0", 0), ("s", 1), ("ack", 2)]).unwrap();
        let prec = PrecedenceStatus::by_names(&sig, &[("ack", "s"), ("s", "0")], &[]).unwrap();
        PrincipleInstance::from_rpo(&RpoInstance::new(sig, prec), depth).unwrap()
    }

    #[test]
    fn rpo_instance_passes() {
        let inst = ackermann_universe(2);
        let r = stp_check(&inst).unwrap();
        assert!(r.decomposition.passed(), "{:?}", r.decomposition.violations);
        assert_eq!(r.verdict(), StpVerdict::Pass);
        assert!(r.a_set.len() == inst.len());
        assert!(inst.succ.is_acyclic());

        let g = gl_check(&inst).unwrap();
        assert!(g.hypotheses_hold && g.sound(), "{g:?}");
        assert_eq!(g.conclusion, Some(true));
    }

    #[test]
    fn law_b_failure_is_reported() {
        // 0 ≻ 1 and 1 ⊳ 2, but 0 ⊁ 2: with ≻₀ = ≻ law (b) fails at (0, 1, 2).
        let succ = rel(3, &[(0, 1)]);
        let inst = PrincipleInstance::unlabeled(succ.clone(), rel(3, &[(1, 2)]), Some(succ), None).unwrap();
        let r = stp_check(&inst).unwrap();
        assert_eq!(r.decomposition.law_violations(crate::relations::DecompositionLaw::B), 1);
        assert_eq!(r.verdict(), StpVerdict::HypothesesFail);
    }

    #[test]
    fn cycle_inside_a_blocks_the_conclusion() {
        let succ = rel(2, &[(0, 1), (1, 0)]);
        let inst = PrincipleInstance::unlabeled(succ.clone(), rel(2, &[]), Some(succ.clone()), Some(succ)).unwrap();
        let r = stp_check(&inst).unwrap();
        assert!(r.decomposition.passed());
        assert_eq!(r.ewf_a_failures.len(), 2);
        assert_eq!(r.ewf_a_failures[0].chain, vec!["0", "1", "0"]);
        assert_eq!(r.verdict(), StpVerdict::HypothesesFail);
        assert_eq!(r.non_wf.len(), 2);

        let g = gl_check(&inst).unwrap();
        assert!(!g.hypotheses_hold && g.conclusion.is_none());
        assert_eq!(g.inaccessible.len(), 2);
    }

    #[test]
    fn empty_succ_is_vacuous() {
        let inst = PrincipleInstance::unlabeled(rel(3, &[]), rel(3, &[(2, 1)]), Some(rel(3, &[])), Some(rel(3, &[]))).unwrap();
        assert_eq!(stp_check(&inst).unwrap().verdict(), StpVerdict::Pass);
        assert_eq!(gl_check(&inst).unwrap().conclusion, Some(true));
    }

    #[test]
    fn missing_relations() {
        let inst = PrincipleInstance::unlabeled(rel(1, &[]), rel(1, &[]), None, None).unwrap();
        assert_eq!(stp_check(&inst).unwrap_err(), StpError::MissingRelation("succ0"));
        assert_eq!(gl_check(&inst).unwrap_err(), StpError::MissingRelation("gg"));
    }
}
