//! The recursive path order with a precedence on symbols and a per-symbol
//! lifting, its decomposition `≻₀` (the order without the subterm clause),
//! certificates with clause traces, and precedence search.
//!
//! For `t = f(t1..tn)` the order is generated by three clauses:
//!
//! * (i) some `ti ⪰ s`;
//! * (ii) `s = g(s1..sm)`, `f ≻_F g` and `t ≻ sj` for every `j`;
//! * (iii) `s = f(s1..sn)`, `t ≻ sj` for every `j` and the argument tuples
//!   decrease under the lifting assigned to `f`.
//!
//! A variable dominates nothing, so `t ≻ x` holds exactly when `x` occurs
//! in `t` strictly below the root.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relations::{
    check_decomposition, lex_witness_by, multiset_witness_by, DecompositionReport, FiniteRelation, Lifting,
    MultisetWitness, TupleExtension,
};
use crate::syntax::parse_term;
use crate::term::{immediate_subterms, Signature, SymbolId, Term, TermError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RpoError {
    #[error("precedence is not irreflexive at {0}")]
    Reflexive(String),
    #[error("precedence is not transitive: {0} > {1} > {2} but not {0} > {2}")]
    NotTransitive(String, String, String),
    #[error("expected {expected} status entries, found {found}")]
    StatusCount { expected: usize, found: usize },
    #[error("unknown symbol {0} in precedence")]
    UnknownSymbol(String),
}

/// A strict order on symbol ids together with a lifting for every symbol.
#[derive(Clone, PartialEq, Eq)]
pub struct PrecedenceStatus {
    n: usize,
    gt: Vec<bool>,
    status: Vec<Lifting>,
}

impl fmt::Debug for PrecedenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecedenceStatus")
            .field("pairs", &self.pairs())
            .field("status", &self.status)
            .finish()
    }
}

impl PrecedenceStatus {
    /// Validates that `pairs` is already irreflexive and transitive.
    pub fn new(sig: &Signature, pairs: &[(SymbolId, SymbolId)], status: Vec<Lifting>) -> Result<Self, RpoError> {
        let n = sig.len();
        if status.len() != n {
            return Err(RpoError::StatusCount {
                expected: n,
                found: status.len(),
            });
        }
        let rel = FiniteRelation::from_edges(n, pairs.iter().map(|(a, b)| (a.0, b.0)));
        if let Some(i) = (0..n).find(|&i| rel.holds(i, i)) {
            return Err(RpoError::Reflexive(sig.name(SymbolId(i)).to_string()));
        }
        if let Some((a, b, c)) = rel.transitivity_violation() {
            let name = |i| sig.name(SymbolId(i)).to_string();
            return Err(RpoError::NotTransitive(name(a), name(b), name(c)));
        }
        Ok(Self::from_relation(&rel, status))
    }

    /// The transitive closure of `pairs`; fails if that closure is cyclic.
    pub fn generated(sig: &Signature, pairs: &[(SymbolId, SymbolId)], status: Vec<Lifting>) -> Result<Self, RpoError> {
        let closed = FiniteRelation::from_edges(sig.len(), pairs.iter().map(|(a, b)| (a.0, b.0))).transitive_closure();
        let closed: Vec<_> = closed.edges().into_iter().map(|(a, b)| (SymbolId(a), SymbolId(b))).collect();
        Self::new(sig, &closed, status)
    }

    /// Precedence and statuses by symbol name. Symbols without a status
    /// entry get the lexicographic lifting.
    pub fn by_names(sig: &Signature, pairs: &[(&str, &str)], statuses: &[(&str, Lifting)]) -> Result<Self, RpoError> {
        let id = |name: &str| sig.lookup(name).ok_or_else(|| RpoError::UnknownSymbol(name.to_string()));
        let pairs = pairs
            .iter()
            .map(|(a, b)| Ok((id(a)?, id(b)?)))
            .collect::<Result<Vec<_>, RpoError>>()?;
        let mut status = vec![Lifting::Lexicographic; sig.len()];
        for (name, lift) in statuses {
            status[id(name)?.0] = *lift;
        }
        Self::generated(sig, &pairs, status)
    }

    /// A total precedence: `order[0] ≻ order[1] ≻ …`.
    pub fn total(order: &[SymbolId], status: Vec<Lifting>) -> Self {
        let n = order.len();
        let mut rank = vec![0; n];
        for (r, s) in order.iter().enumerate() {
            rank[s.0] = r;
        }
        PrecedenceStatus {
            n,
            gt: (0..n * n).map(|k| rank[k / n] < rank[k % n]).collect(),
            status,
        }
    }

    fn from_relation(rel: &FiniteRelation, status: Vec<Lifting>) -> Self {
        let n = rel.len();
        PrecedenceStatus {
            n,
            gt: (0..n * n).map(|k| rel.holds(k / n, k % n)).collect(),
            status,
        }
    }

    pub fn gt(&self, f: SymbolId, g: SymbolId) -> bool {
        self.gt[f.0 * self.n + g.0]
    }

    pub fn status(&self, f: SymbolId) -> Lifting {
        self.status[f.0]
    }

    pub fn statuses(&self) -> &[Lifting] {
        &self.status
    }

    pub fn pairs(&self) -> Vec<(SymbolId, SymbolId)> {
        (0..self.n * self.n)
            .filter(|&k| self.gt[k])
            .map(|k| (SymbolId(k / self.n), SymbolId(k % self.n)))
            .collect()
    }

    /// The Hasse diagram of the precedence.
    pub fn covering_pairs(&self) -> Vec<(SymbolId, SymbolId)> {
        let n = self.n;
        self.pairs()
            .into_iter()
            .filter(|&(a, b)| !(0..n).any(|c| self.gt(a, SymbolId(c)) && self.gt(SymbolId(c), b)))
            .collect()
    }
}

/// Which clause of the order fired at a trace step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    #[serde(rename = "i")]
    Subterm,
    #[serde(rename = "ii")]
    Precedence,
    #[serde(rename = "iii")]
    Lifting,
}

/// One step of a clause trace: a proof of `lhs ≻ rhs`.
///
/// Premises are indices of later steps. For clause (i) there is at most one
/// premise, `t_arg ≻ rhs`; none when `t_arg = rhs`. For clauses (ii) and
/// (iii) the first premises prove `lhs ≻ s_j` for every argument `s_j` of
/// `rhs`, in order. Clause (iii) then adds the lifting premises: one for
/// `lex_index`, or one per added element of the multiset witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub lhs: String,
    pub rhs: String,
    pub clause: Clause,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifting: Option<Lifting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lex_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiset: Option<MultisetWitness>,
    pub premises: Vec<usize>,
}

/// An RPO instance: a signature plus precedence and statuses.
#[derive(Clone, Debug)]
pub struct RpoInstance {
    sig: Signature,
    prec: PrecedenceStatus,
}

impl RpoInstance {
    pub fn new(sig: Signature, prec: PrecedenceStatus) -> Self {
        RpoInstance { sig, prec }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn precedence(&self) -> &PrecedenceStatus {
        &self.prec
    }

    pub fn gt(&self, t: &Term, s: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::App(_, ts) => ts.iter().any(|ti| ti == s || self.gt(ti, s)) || self.decomp_gt0(t, s),
        }
    }

    pub fn ge(&self, t: &Term, s: &Term) -> bool {
        t == s || self.gt(t, s)
    }

    /// Clauses (ii) and (iii) only.
    pub fn decomp_gt0(&self, t: &Term, s: &Term) -> bool {
        let (Term::App(f, ts), Term::App(g, ss)) = (t, s) else {
            return false;
        };
        if self.prec.gt(*f, *g) {
            ss.iter().all(|sj| self.gt(t, sj))
        } else if f == g {
            ss.iter().all(|sj| self.gt(t, sj))
                && self
                    .prec
                    .status(*f)
                    .extends(&|a: &Term, b: &Term| self.gt(a, b), &|a, b| a == b, ts, ss)
        } else {
            false
        }
    }

    /// The materialized order over `universe`, indexed by position.
    pub fn materialize(&self, universe: &[Term]) -> FiniteRelation {
        let n = universe.len();
        let rows: Vec<Vec<bool>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| self.gt(&universe[i], &universe[j])).collect())
            .collect();
        FiniteRelation::from_fn(n, |i, j| rows[i][j])
    }

    /// A clause trace proving `t ≻ s`, or `None` if `t ⊁ s`.
    pub fn explain(&self, t: &Term, s: &Term) -> Option<Vec<TraceStep>> {
        if !self.gt(t, s) {
            return None;
        }
        let mut steps = Vec::new();
        self.explain_into(t, s, &mut steps);
        Some(steps)
    }

    fn explain_into(&self, t: &Term, s: &Term, steps: &mut Vec<TraceStep>) -> usize {
        let me = steps.len();
        let mut step = TraceStep {
            lhs: self.sig.show(t),
            rhs: self.sig.show(s),
            clause: Clause::Subterm,
            arg: None,
            lifting: None,
            lex_index: None,
            multiset: None,
            premises: Vec::new(),
        };
        steps.push(step.clone());
        let (Term::App(f, ts), rhs) = (t, s) else {
            unreachable!("explain is only called on true comparisons")
        };
        if let Some(i) = ts.iter().position(|ti| ti == s) {
            step.arg = Some(i);
        } else if let Some(i) = ts.iter().position(|ti| self.gt(ti, s)) {
            step.arg = Some(i);
            step.premises.push(self.explain_into(&ts[i], s, steps));
        } else {
            let Term::App(g, ss) = rhs else {
                unreachable!("a variable is only dominated through clause (i)")
            };
            step.clause = if f == g { Clause::Lifting } else { Clause::Precedence };
            for sj in ss {
                step.premises.push(self.explain_into(t, sj, steps));
            }
            if f == g {
                let lift = self.prec.status(*f);
                step.lifting = Some(lift);
                let gt = |a: &Term, b: &Term| self.gt(a, b);
                match lift {
                    Lifting::Lexicographic => {
                        let k = lex_witness_by(gt, |a, b| a == b, ts, ss)
                            .ok()
                            .flatten()
                            .expect("lexicographic decrease");
                        step.lex_index = Some(k);
                        step.premises.push(self.explain_into(&ts[k], &ss[k], steps));
                    }
                    Lifting::Multiset => {
                        let w = multiset_witness_by(gt, |a, b| a == b, ts, ss).expect("multiset decrease");
                        for (&d, &a) in w.dominators.iter().zip(&w.added) {
                            step.premises.push(self.explain_into(&ts[d], &ss[a], steps));
                        }
                        step.multiset = Some(w);
                    }
                }
            }
        }
        steps[me] = step;
        me
    }
}

/// Checks both decomposition laws of `(gt, decomp_gt0, ⊳)` on `universe`.
pub fn check_decomposition_laws(inst: &RpoInstance, universe: &[Term]) -> DecompositionReport<Term> {
    check_decomposition_laws_with(inst, universe, |t, s| inst.decomp_gt0(t, s))
}

/// As [`check_decomposition_laws`] with a caller-supplied `≻₀`, for
/// mutation testing.
pub fn check_decomposition_laws_with(
    inst: &RpoInstance,
    universe: &[Term],
    succ0: impl Fn(&Term, &Term) -> bool,
) -> DecompositionReport<Term> {
    let index: BTreeMap<&Term, usize> = universe.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let gt = inst.materialize(universe);
    let succ = |a: &Term, b: &Term| match (index.get(a), index.get(b)) {
        (Some(&i), Some(&j)) => gt.holds(i, j),
        _ => inst.gt(a, b),
    };
    check_decomposition(universe, succ, succ0, immediate_subterms)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatusMode {
    Lex,
    Mul,
    #[default]
    Auto,
}

impl std::str::FromStr for StatusMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lex" => Ok(StatusMode::Lex),
            "mul" => Ok(StatusMode::Mul),
            "auto" => Ok(StatusMode::Auto),
            other => Err(format!("unknown status mode {other:?}")),
        }
    }
}

pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub status: StatusMode,
    /// Maximum number of candidate instances examined.
    pub budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            status: StatusMode::Auto,
            budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OrientError {
    #[error("rule {rule}: variable {var} occurs on the right but not on the left")]
    UnboundVariable { rule: usize, var: String },
    #[error("search budget of {budget} candidates exceeded")]
    BudgetExceeded { budget: usize },
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateStatus {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO_INSTANCE")]
    NoInstance,
    #[serde(rename = "BUDGET")]
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedRule {
    pub lhs: String,
    pub rhs: String,
    pub clause_trace: Vec<TraceStep>,
}

/// A machine-checkable orientation record.
///
/// `precedence` lists only the symbol comparisons the traces rely on, as a
/// transitively reduced set of pairs; `statuses` covers every symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: CertificateStatus,
    pub precedence: Vec<(String, String)>,
    pub statuses: BTreeMap<String, Lifting>,
    pub oriented: Vec<OrientedRule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("certificate status is not YES")]
    NotYes,
    #[error("certificate covers {found} rules, expected {expected}")]
    RuleCount { expected: usize, found: usize },
    #[error("rule {rule}: {message}")]
    Rule { rule: usize, message: String },
    #[error("rule {rule}, step {step}: {message}")]
    Step { rule: usize, step: usize, message: String },
}

impl Certificate {
    pub fn without_instance(status: CertificateStatus) -> Self {
        Certificate {
            status,
            precedence: Vec::new(),
            statuses: BTreeMap::new(),
            oriented: Vec::new(),
        }
    }

    pub fn build(inst: &RpoInstance, rules: &[(Term, Term)]) -> Option<Self> {
        let sig = inst.signature();
        let mut oriented = Vec::new();
        let mut used = BTreeSet::new();
        for (l, r) in rules {
            let trace = inst.explain(l, r)?;
            for step in trace.iter().filter(|s| s.clause == Clause::Precedence) {
                let root = |text: &str| text.split('(').next().unwrap_or(text).to_string();
                used.insert((root(&step.lhs), root(&step.rhs)));
            }
            oriented.push(OrientedRule {
                lhs: sig.show(l),
                rhs: sig.show(r),
                clause_trace: trace,
            });
        }
        let id = |name: &String| sig.lookup(name).expect("trace symbols are declared").0;
        let closure =
            FiniteRelation::from_edges(sig.len(), used.iter().map(|(a, b)| (id(a), id(b)))).transitive_closure();
        let precedence = closure
            .edges()
            .into_iter()
            .filter(|&(a, b)| !(0..sig.len()).any(|c| closure.holds(a, c) && closure.holds(c, b)))
            .map(|(a, b)| (sig.name(SymbolId(a)).to_string(), sig.name(SymbolId(b)).to_string()))
            .collect();
        let statuses = sig
            .ids()
            .map(|f| (sig.name(f).to_string(), inst.precedence().status(f)))
            .collect();
        Some(Certificate {
            status: CertificateStatus::Yes,
            precedence,
            statuses,
            oriented,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Re-checks every trace step locally against the certificate's own
    /// precedence and statuses, without consulting the order itself.
    pub fn validate(&self, sig: &Signature, rules: &[(Term, Term)]) -> Result<(), CertificateError> {
        if self.status != CertificateStatus::Yes {
            return Err(CertificateError::NotYes);
        }
        if self.oriented.len() != rules.len() {
            return Err(CertificateError::RuleCount {
                expected: rules.len(),
                found: self.oriented.len(),
            });
        }
        let mut prec = FiniteRelation::empty(sig.len());
        for (a, b) in &self.precedence {
            let (Some(a), Some(b)) = (sig.lookup(a), sig.lookup(b)) else {
                return Err(CertificateError::Rule {
                    rule: 0,
                    message: format!("unknown symbol in precedence pair ({a}, {b})"),
                });
            };
            prec.insert(a.0, b.0);
        }
        let prec = prec.transitive_closure();
        if !prec.is_irreflexive() {
            return Err(CertificateError::Rule {
                rule: 0,
                message: "precedence is cyclic".into(),
            });
        }
        for (k, ((l, r), entry)) in rules.iter().zip(&self.oriented).enumerate() {
            if entry.lhs != sig.show(l) || entry.rhs != sig.show(r) {
                return Err(CertificateError::Rule {
                    rule: k,
                    message: format!("entry {} -> {} does not match the rule", entry.lhs, entry.rhs),
                });
            }
            let trace = &entry.clause_trace;
            match trace.first() {
                Some(root) if root.lhs == entry.lhs && root.rhs == entry.rhs => {}
                _ => {
                    return Err(CertificateError::Rule {
                        rule: k,
                        message: "trace does not start with the rule".into(),
                    })
                }
            }
            for (i, step) in trace.iter().enumerate() {
                validate_step(sig, &prec, &self.statuses, trace, i).map_err(|message| CertificateError::Step {
                    rule: k,
                    step: i,
                    message: format!("{} > {}: {message}", step.lhs, step.rhs),
                })?;
            }
        }
        Ok(())
    }
}

/// Parses a term from a trace, reading every undeclared bare name as a
/// variable.
fn parse_open(sig: &Signature, text: &str) -> Result<Term, String> {
    let vars: Vec<&str> = text
        .split(|c: char| c == '(' || c == ')' || c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty() && sig.lookup(w).is_none())
        .collect();
    parse_term(text, sig, &vars).map_err(|e| e.to_string())
}

fn validate_step(
    sig: &Signature,
    prec: &FiniteRelation,
    statuses: &BTreeMap<String, Lifting>,
    trace: &[TraceStep],
    i: usize,
) -> Result<(), String> {
    let step = &trace[i];
    let t = parse_open(sig, &step.lhs)?;
    let s = parse_open(sig, &step.rhs)?;
    let premise = |k: usize| -> Result<(Term, Term), String> {
        let p = *step.premises.get(k).ok_or("missing premise")?;
        if p <= i || p >= trace.len() {
            return Err(format!("premise index {p} out of range"));
        }
        Ok((parse_open(sig, &trace[p].lhs)?, parse_open(sig, &trace[p].rhs)?))
    };
    let expect = |k: usize, a: &Term, b: &Term| -> Result<(), String> {
        let (pa, pb) = premise(k)?;
        if &pa == a && &pb == b {
            Ok(())
        } else {
            Err(format!("premise {k} proves the wrong comparison"))
        }
    };
    let Term::App(f, ts) = &t else {
        return Err("a variable dominates nothing".into());
    };
    match step.clause {
        Clause::Subterm => {
            let a = step.arg.ok_or("clause (i) without argument index")?;
            let ta = ts.get(a).ok_or("argument index out of range")?;
            if ta == &s {
                if !step.premises.is_empty() {
                    return Err("unexpected premises".into());
                }
            } else {
                if step.premises.len() != 1 {
                    return Err("clause (i) needs exactly one premise".into());
                }
                expect(0, ta, &s)?;
            }
        }
        Clause::Precedence | Clause::Lifting => {
            let Term::App(g, ss) = &s else {
                return Err("clauses (ii) and (iii) need an application on the right".into());
            };
            for (j, sj) in ss.iter().enumerate() {
                expect(j, &t, sj)?;
            }
            let m = ss.len();
            if step.clause == Clause::Precedence {
                if !prec.holds(f.0, g.0) {
                    return Err("precedence pair not in certificate".into());
                }
                if step.premises.len() != m {
                    return Err("wrong number of premises".into());
                }
                return Ok(());
            }
            if f != g {
                return Err("clause (iii) needs equal roots".into());
            }
            let lift = step.lifting.ok_or("clause (iii) without lifting")?;
            if statuses.get(sig.name(*f)) != Some(&lift) {
                return Err("lifting disagrees with certificate status".into());
            }
            match lift {
                Lifting::Lexicographic => {
                    let k = step.lex_index.ok_or("missing lex index")?;
                    if k >= ts.len() || ts[..k] != ss[..k] {
                        return Err("lex index is not the first difference".into());
                    }
                    if step.premises.len() != m + 1 {
                        return Err("wrong number of premises".into());
                    }
                    expect(m, &ts[k], &ss[k])?;
                }
                Lifting::Multiset => {
                    let w = step.multiset.as_ref().ok_or("missing multiset witness")?;
                    if w.removed.is_empty() {
                        return Err("nothing removed".into());
                    }
                    let rest = |xs: &[Term], drop: &[usize]| -> Result<Vec<Term>, String> {
                        if drop.iter().any(|&i| i >= xs.len()) {
                            return Err("witness index out of range".into());
                        }
                        let mut v: Vec<Term> = (0..xs.len())
                            .filter(|i| !drop.contains(i))
                            .map(|i| xs[i].clone())
                            .collect();
                        v.sort();
                        Ok(v)
                    };
                    if rest(ts, &w.removed)? != rest(ss, &w.added)? {
                        return Err("kept parts differ".into());
                    }
                    if w.dominators.len() != w.added.len() || step.premises.len() != m + w.added.len() {
                        return Err("wrong number of premises".into());
                    }
                    for (k, (&d, &a)) in w.dominators.iter().zip(&w.added).enumerate() {
                        if !w.removed.contains(&d) {
                            return Err("dominator was not removed".into());
                        }
                        expect(m + k, &ts[d], &ss[a])?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Permutations of `0..n` in lexicographic order, starting at the identity.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The candidate statuses in search order: symbols of arity at least two
/// vary, lexicographic before multiset, the first such symbol most
/// significant. Lower-arity symbols keep the lexicographic lifting, which
/// coincides with the multiset lifting on them.
fn status_candidates(sig: &Signature, mode: StatusMode) -> Vec<Vec<Lifting>> {
    let base = match mode {
        StatusMode::Mul => Lifting::Multiset,
        _ => Lifting::Lexicographic,
    };
    let base: Vec<Lifting> = sig
        .ids()
        .map(|f| if sig.arity(f) >= 2 { base } else { Lifting::Lexicographic })
        .collect();
    if mode != StatusMode::Auto {
        return vec![base];
    }
    let varying: Vec<usize> = sig.ids().filter(|&f| sig.arity(f) >= 2).map(|f| f.0).collect();
    let k = varying.len();
    (0u64..1 << k)
        .map(|mask| {
            let mut st = base.clone();
            for (b, &f) in varying.iter().enumerate() {
                if mask >> (k - 1 - b) & 1 == 1 {
                    st[f] = Lifting::Multiset;
                }
            }
            st
        })
        .collect()
}

const BATCH: usize = 512;

/// Searches total precedences and statuses for an instance orienting every
/// rule. Returns the first success in search order, `Ok(None)` if the
/// space is exhausted.
pub fn orient_trs(
    sig: &Signature,
    rules: &[(Term, Term)],
    cfg: &SearchConfig,
) -> Result<Option<(PrecedenceStatus, Certificate)>, OrientError> {
    for (k, (l, r)) in rules.iter().enumerate() {
        sig.check(l)?;
        sig.check(r)?;
        let lv = l.vars();
        if let Some(v) = r.vars().into_iter().find(|v| !lv.contains(v)) {
            return Err(OrientError::UnboundVariable {
                rule: k,
                var: v.to_string(),
            });
        }
    }
    let statuses = status_candidates(sig, cfg.status);
    let mut perm: Vec<usize> = (0..sig.len()).collect();
    let mut explored = 0usize;
    let mut more = true;
    while more {
        let mut batch = Vec::with_capacity(BATCH);
        while more && batch.len() < BATCH {
            let order: Vec<SymbolId> = perm.iter().map(|&i| SymbolId(i)).collect();
            for st in &statuses {
                batch.push(PrecedenceStatus::total(&order, st.clone()));
            }
            more = next_permutation(&mut perm);
        }
        let hit = batch.par_iter().position_first(|prec| {
            let inst = RpoInstance::new(sig.clone(), prec.clone());
            rules.iter().all(|(l, r)| inst.gt(l, r))
        });
        match hit {
            Some(i) if explored + i < cfg.budget => {
                let prec = batch.swap_remove(i);
                let inst = RpoInstance::new(sig.clone(), prec.clone());
                let cert = Certificate::build(&inst, rules).expect("every rule is oriented");
                return Ok(Some((prec, cert)));
            }
            Some(_) => return Err(OrientError::BudgetExceeded { budget: cfg.budget }),
            None => {
                explored += batch.len();
                if explored > cfg.budget || (explored == cfg.budget && more) {
                    return Err(OrientError::BudgetExceeded { budget: cfg.budget });
                }
            }
        }
    }
    Ok(None)
}
