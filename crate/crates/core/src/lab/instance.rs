use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::relations::{check_distinct, relation_from_pairs, relation_to_pairs, FiniteRelation, RelationError};
use crate::rpo::RpoInstance;
use crate::term::{enumerate_ground_terms, immediate_subterms, Term, TermError};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("sub relation is not well-founded: cycle {0}")]
    SubCyclic(String),
    #[error("relation {0} has size {1}, carrier has size {2}")]
    SizeMismatch(&'static str, usize, usize),
    #[error("invalid instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A finite carrier with `≻` (succ), `⊳` (sub) and optionally `≻₀` and `≫`.
///
/// Elements are the indices `0..len()`; `labels` only name them. `sub`
/// must be acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipleInstance {
    pub labels: Vec<Value>,
    pub succ: FiniteRelation,
    pub sub: FiniteRelation,
    pub succ0: Option<FiniteRelation>,
    pub gg: Option<FiniteRelation>,
}

/// The JSON form of a [`PrincipleInstance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub carrier: Vec<Value>,
    pub succ: Vec<(Value, Value)>,
    pub sub: Vec<(Value, Value)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub succ0: Option<Vec<(Value, Value)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gg: Option<Vec<(Value, Value)>>,
}

impl PrincipleInstance {
    pub fn new(
        labels: Vec<Value>,
        succ: FiniteRelation,
        sub: FiniteRelation,
        succ0: Option<FiniteRelation>,
        gg: Option<FiniteRelation>,
    ) -> Result<Self, InstanceError> {
        let n = labels.len();
        check_distinct(&labels)?;
        let named = [("succ", Some(&succ)), ("sub", Some(&sub)), ("succ0", succ0.as_ref()), ("gg", gg.as_ref())];
        for (name, rel) in named {
            if let Some(r) = rel {
                if r.len() != n {
                    return Err(InstanceError::SizeMismatch(name, r.len(), n));
                }
            }
        }
        if let Some(c) = sub.find_cycle() {
            let shown: Vec<String> = c.iter().map(|&i| labels[i].to_string()).collect();
            return Err(InstanceError::SubCyclic(shown.join(" ⊳ ")));
        }
        Ok(PrincipleInstance {
            labels,
            succ,
            sub,
            succ0,
            gg,
        })
    }

    /// Numbers `0..n` as labels.
    pub fn unlabeled(
        succ: FiniteRelation,
        sub: FiniteRelation,
        succ0: Option<FiniteRelation>,
        gg: Option<FiniteRelation>,
    ) -> Result<Self, InstanceError> {
        let labels = (0..succ.len()).map(Value::from).collect();
        Self::new(labels, succ, sub, succ0, gg)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels[i] {
            Value::String(s) => s.clone(),
            v => v.to_string(),
        }
    }

    pub fn from_doc(doc: &InstanceDoc) -> Result<Self, InstanceError> {
        let rel = |pairs: &[(Value, Value)]| relation_from_pairs(&doc.carrier, pairs);
        Self::new(
            doc.carrier.clone(),
            rel(&doc.succ)?,
            rel(&doc.sub)?,
            doc.succ0.as_deref().map(rel).transpose()?,
            doc.gg.as_deref().map(rel).transpose()?,
        )
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let pairs = |r: &FiniteRelation| relation_to_pairs(&self.labels, r);
        InstanceDoc {
            carrier: self.labels.clone(),
            succ: pairs(&self.succ),
            sub: pairs(&self.sub),
            succ0: self.succ0.as_ref().map(pairs),
            gg: self.gg.as_ref().map(pairs),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("instances serialize")
    }

    /// The RPO instance on the ground terms of height at most `depth`:
    /// `≻` is the order, `⊳` immediate subterm, and both `≻₀` and `≫` the
    /// decomposition.
    pub fn from_rpo(inst: &RpoInstance, depth: usize) -> Result<Self, InstanceError> {
        let universe = enumerate_ground_terms(inst.signature(), depth)?;
        Ok(Self::from_rpo_universe(inst, &universe))
    }

    pub fn from_rpo_universe(inst: &RpoInstance, universe: &[Term]) -> Self {
        let n = universe.len();
        let succ = inst.materialize(universe);
        let index = |t: &Term| universe.iter().position(|u| u == t);
        let mut sub = FiniteRelation::empty(n);
        for (i, t) in universe.iter().enumerate() {
            for u in immediate_subterms(t) {
                if let Some(j) = index(&u) {
                    sub.insert(i, j);
                }
            }
        }
        let decomp = FiniteRelation::from_fn(n, |i, j| inst.decomp_gt0(&universe[i], &universe[j]));
        let labels = universe.iter().map(|t| Value::from(inst.signature().show(t))).collect();
        PrincipleInstance {
            labels,
            succ,
            sub,
            succ0: Some(decomp.clone()),
            gg: Some(decomp),
        }
    }

    /// `x` is well-founded (no infinite descent from `x`), for every `x`.
    pub fn ewf_table(&self) -> Vec<bool> {
        self.succ.wellfounded_elements()
    }

    /// The set `A`: elements `x` such that every `y` with `x ⊳ y` is
    /// well-founded.
    pub fn a_set(&self, wf: &[bool]) -> Vec<bool> {
        (0..self.len()).map(|x| self.sub.successors(x).all(|y| wf[y])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rpo::PrecedenceStatus;
    use crate::term::Signature;

    #[test]
    fn json_round_trip() {
        let text = r#"{"carrier":["a","b","c"],"succ":[["a","b"],["b","a"]],"sub":[["c","a"]]}"#;
        let inst = PrincipleInstance::from_json(text).unwrap();
        assert_eq!(inst.len(), 3);
        assert!(inst.succ.holds(0, 1) && inst.sub.holds(2, 0));
        let back = PrincipleInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn cyclic_sub_is_rejected() {
        let text = r#"{"carrier":[1,2],"succ":[],"sub":[[1,2],[2,1]]}"#;
        assert!(matches!(PrincipleInstance::from_json(text), Err(InstanceError::SubCyclic(_))));
        let text = r#"{"carrier":[1,1],"succ":[],"sub":[]}"#;
        assert!(matches!(
            PrincipleInstance::from_json(text),
            Err(InstanceError::Relation(RelationError::DuplicateElement(_)))
        ));
        assert!(PrincipleInstance::from_json("{").is_err());
    }

    #[test]
    fn rpo_export() {
        let sig = Signature::from_symbols([("0", 0), ("s", 1)]).unwrap();
        let inst = RpoInstance::new(sig.clone(), PrecedenceStatus::by_names(&sig, &[], &[]).unwrap());
        let p = PrincipleInstance::from_rpo(&inst, 2).unwrap();
        assert_eq!(p.labels, vec![Value::from("0"), Value::from("s(0)"), Value::from("s(s(0))")]);
        assert_eq!(p.sub.edges(), vec![(1, 0), (2, 1)]);
        assert_eq!(p.succ.edges(), vec![(1, 0), (2, 0), (2, 1)]);
        assert_eq!(p.ewf_table(), vec![true; 3]);
    }
}
