//! Rewrite systems, one-step rewriting, normalisation with loop detection,
//! and the empirical check that oriented systems terminate.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rpo::{CertificateStatus, RpoInstance, TraceStep};
use crate::syntax::TrsFile;
use crate::term::{enumerate_ground_terms, Position, Signature, Substitution, Term, TermError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error("rule {0}: left-hand side is a variable")]
    VariableLhs(usize),
    #[error("rule {rule}: variable {var} occurs on the right but not on the left")]
    UnboundVariable { rule: usize, var: String },
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A term rewrite system over a fixed signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trs {
    sig: Signature,
    rules: Vec<(Term, Term)>,
}

impl Trs {
    pub fn new(sig: Signature, rules: Vec<(Term, Term)>) -> Result<Self, TrsError> {
        for (k, (l, r)) in rules.iter().enumerate() {
            sig.check(l)?;
            sig.check(r)?;
            if l.is_var() {
                return Err(TrsError::VariableLhs(k));
            }
            let lv = l.vars();
            if let Some(v) = r.vars().into_iter().find(|v| !lv.contains(v)) {
                return Err(TrsError::UnboundVariable {
                    rule: k,
                    var: v.to_string(),
                });
            }
        }
        Ok(Trs { sig, rules })
    }

    /// The file's rules over its inferred signature. A signature without
    /// constants has no ground terms, so one is added in that case: `0`,
    /// or the first free name among `c`, `c1`, `c2`, ….
    pub fn from_file(file: TrsFile) -> Result<Self, TrsError> {
        let mut sig = file.signature;
        if !sig.ids().any(|f| sig.arity(f) == 0) {
            let name = std::iter::once("0".to_string())
                .chain(std::iter::once("c".to_string()))
                .chain((1..).map(|i| format!("c{i}")))
                .find(|n| sig.lookup(n).is_none() && !file.vars.contains(n))
                .expect("some name is free");
            sig.add(name, 0)?;
        }
        Trs::new(sig, file.rules)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rules(&self) -> &[(Term, Term)] {
        &self.rules
    }
}

/// Syntactic matching: the `σ` with `pattern σ = t`, if any.
pub fn match_term(pattern: &Term, t: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_into(pattern, t, &mut sigma).then_some(sigma)
}

fn match_into(pattern: &Term, t: &Term, sigma: &mut Substitution) -> bool {
    match (pattern, t) {
        (Term::Var(x), _) => match sigma.get(x) {
            Some(bound) => bound == t,
            None => {
                sigma.insert(x.clone(), t.clone());
                true
            }
        },
        (Term::App(f, ps), Term::App(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, u)| match_into(p, u, sigma))
        }
        _ => false,
    }
}

/// One rewrite step: the result, the rule used and the redex position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub term: Term,
    pub rule: usize,
    pub position: Position,
}

/// All one-step successors of `t`, outermost-leftmost first and rules in
/// declaration order at each position.
pub fn rewrite_once(trs: &Trs, t: &Term) -> Vec<Step> {
    let mut out = Vec::new();
    for pos in t.positions() {
        let redex = t.subterm_at(&pos).expect("position from positions()");
        for (k, (l, r)) in trs.rules.iter().enumerate() {
            if let Some(sigma) = match_term(l, redex) {
                out.push(Step {
                    term: t.replace_at(&pos, r.apply(&sigma)).expect("valid position"),
                    rule: k,
                    position: pos.clone(),
                });
            }
        }
    }
    out
}

/// The first successor in [`rewrite_once`] order, without building the rest.
pub fn rewrite_first(trs: &Trs, t: &Term) -> Option<Step> {
    for pos in t.positions() {
        let redex = t.subterm_at(&pos).expect("position from positions()");
        for (k, (l, r)) in trs.rules.iter().enumerate() {
            if let Some(sigma) = match_term(l, redex) {
                return Some(Step {
                    term: t.replace_at(&pos, r.apply(&sigma)).expect("valid position"),
                    rule: k,
                    position: pos,
                });
            }
        }
    }
    None
}

/// A derivation `start → t1 → t2 → …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTrace {
    pub start: Term,
    pub steps: Vec<Step>,
}

impl DerivationTrace {
    /// `start` followed by every intermediate term.
    pub fn terms(&self) -> Vec<&Term> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.term)).collect()
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map(|s| &s.term).unwrap_or(&self.start)
    }

    pub fn render(&self, sig: &Signature) -> Vec<TraceLine> {
        self.steps
            .iter()
            .map(|s| TraceLine {
                rule: s.rule,
                position: s.position.clone(),
                term: sig.show(&s.term),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLine {
    pub rule: usize,
    pub position: Position,
    pub term: String,
}

/// Outcome of [`normalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalization {
    Normal { term: Term, trace: DerivationTrace },
    FuelExhausted { trace: DerivationTrace },
    /// The last term contains the term at index `from` of the trace (at
    /// `position`), so the derivation can be pumped forever.
    LoopFound {
        trace: DerivationTrace,
        from: usize,
        position: Position,
    },
}

impl Normalization {
    pub fn trace(&self) -> &DerivationTrace {
        match self {
            Normalization::Normal { trace, .. }
            | Normalization::FuelExhausted { trace }
            | Normalization::LoopFound { trace, .. } => trace,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Normalization::Normal { .. } => "normal",
            Normalization::FuelExhausted { .. } => "fuel_exhausted",
            Normalization::LoopFound { .. } => "loop",
        }
    }
}

/// What counts as a loop during normalisation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopCheck {
    /// A term of the derivation repeats exactly.
    #[default]
    Exact,
    /// The newest term contains an earlier term as a subterm: `u →⁺ C[u]`
    /// repeats under the context forever. Exact repetition is the case of
    /// the empty context.
    Embedding,
}

impl std::str::FromStr for LoopCheck {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(LoopCheck::Exact),
            "embedding" => Ok(LoopCheck::Embedding),
            other => Err(format!("unknown loop check {other:?}")),
        }
    }
}

/// Rewrites with the first successor until a normal form, an exactly
/// repeated term, or `fuel` steps.
pub fn normalize(trs: &Trs, t: &Term, fuel: usize) -> Normalization {
    normalize_with(trs, t, fuel, LoopCheck::Exact)
}

pub fn normalize_with(trs: &Trs, t: &Term, fuel: usize, check: LoopCheck) -> Normalization {
    let mut trace = DerivationTrace {
        start: t.clone(),
        steps: Vec::new(),
    };
    let mut seen: HashMap<Term, usize> = HashMap::from([(t.clone(), 0)]);
    let mut cur = t.clone();
    while trace.steps.len() < fuel {
        let Some(step) = rewrite_first(trs, &cur) else {
            return Normalization::Normal { term: cur, trace };
        };
        cur = step.term.clone();
        trace.steps.push(step);
        let hit = match check {
            LoopCheck::Exact => seen.get(&cur).map(|&i| (i, Vec::new())),
            LoopCheck::Embedding => cur
                .positions()
                .into_iter()
                .filter_map(|p| seen.get(cur.subterm_at(&p).unwrap()).map(|&i| (i, p)))
                .min(),
        };
        if let Some((from, position)) = hit {
            return Normalization::LoopFound { trace, from, position };
        }
        seen.entry(cur.clone()).or_insert(trace.steps.len());
    }
    match rewrite_first(trs, &cur) {
        None => Normalization::Normal { term: cur, trace },
        Some(_) => Normalization::FuelExhausted { trace },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("step {step}: rule {rule} does not exist")]
    NoSuchRule { step: usize, rule: usize },
    #[error("step {step}: no redex at the recorded position")]
    BadPosition { step: usize },
    #[error("step {step}: rule {rule} does not match at the recorded position")]
    NoMatch { step: usize, rule: usize },
    #[error("step {step}: recorded result differs from the rewrite")]
    WrongResult { step: usize },
    #[error("loop witness does not embed the earlier term")]
    BadLoop,
}

/// Replays every step of a derivation.
pub fn validate_derivation(trs: &Trs, trace: &DerivationTrace) -> Result<(), DerivationError> {
    let mut cur = &trace.start;
    for (i, step) in trace.steps.iter().enumerate() {
        let (l, r) = trs.rules.get(step.rule).ok_or(DerivationError::NoSuchRule {
            step: i,
            rule: step.rule,
        })?;
        let redex = cur
            .subterm_at(&step.position)
            .ok_or(DerivationError::BadPosition { step: i })?;
        let sigma = match_term(l, redex).ok_or(DerivationError::NoMatch { step: i, rule: step.rule })?;
        let next = cur.replace_at(&step.position, r.apply(&sigma)).expect("checked position");
        if next != step.term {
            return Err(DerivationError::WrongResult { step: i });
        }
        cur = &step.term;
    }
    Ok(())
}

/// Replays the derivation and checks the embedding claimed by a loop.
pub fn validate_normalization(trs: &Trs, n: &Normalization) -> Result<(), DerivationError> {
    validate_derivation(trs, n.trace())?;
    match n {
        Normalization::LoopFound { trace, from, position } => {
            let terms = trace.terms();
            let ok = *from < terms.len() - 1
                && terms.last().unwrap().subterm_at(position) == terms.get(*from).copied();
            if ok {
                Ok(())
            } else {
                Err(DerivationError::BadLoop)
            }
        }
        Normalization::Normal { term, trace } => {
            if trace.last() == term && rewrite_first(trs, term).is_none() {
                Ok(())
            } else {
                Err(DerivationError::WrongResult { step: trace.steps.len() })
            }
        }
        Normalization::FuelExhausted { .. } => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleOrientation {
    pub rule: usize,
    pub lhs: String,
    pub rhs: String,
    pub oriented: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause_trace: Option<Vec<TraceStep>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationReport {
    pub verdict: CertificateStatus,
    pub rules: Vec<RuleOrientation>,
}

impl OrientationReport {
    pub fn all_oriented(&self) -> bool {
        self.verdict == CertificateStatus::Yes
    }
}

pub fn check_rule_orientation(trs: &Trs, inst: &RpoInstance) -> OrientationReport {
    let rules: Vec<RuleOrientation> = trs
        .rules
        .iter()
        .enumerate()
        .map(|(k, (l, r))| {
            let clause_trace = inst.explain(l, r);
            RuleOrientation {
                rule: k,
                lhs: trs.sig.show(l),
                rhs: trs.sig.show(r),
                oriented: clause_trace.is_some(),
                clause_trace,
            }
        })
        .collect();
    let verdict = if rules.iter().all(|r| r.oriented) {
        CertificateStatus::Yes
    } else {
        CertificateStatus::NoInstance
    };
    OrientationReport { verdict, rules }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub depth: usize,
    pub fuel: usize,
    pub terms: usize,
    pub normal: usize,
    pub loops: usize,
    pub fuel_exhausted: usize,
    pub longest_derivation: usize,
    /// Start terms whose derivation looped, sorted.
    pub loop_witnesses: Vec<String>,
    /// Start terms that ran out of fuel, sorted.
    pub exhausted_witnesses: Vec<String>,
}

/// Normalises every ground term of height at most `depth`, reporting
/// self-embedding derivations as loops.
pub fn empirical_termination(trs: &Trs, depth: usize, fuel: usize) -> Result<EmpiricalReport, TermError> {
    let universe = enumerate_ground_terms(&trs.sig, depth)?;
    let outcomes: Vec<(String, Normalization)> = universe
        .par_iter()
        .map(|t| (trs.sig.show(t), normalize_with(trs, t, fuel, LoopCheck::Embedding)))
        .collect();
    let mut report = EmpiricalReport {
        depth,
        fuel,
        terms: universe.len(),
        ..Default::default()
    };
    for (name, n) in outcomes {
        report.longest_derivation = report.longest_derivation.max(n.trace().steps.len());
        match n {
            Normalization::Normal { .. } => report.normal += 1,
            Normalization::LoopFound { .. } => {
                report.loops += 1;
                report.loop_witnesses.push(name);
            }
            Normalization::FuelExhausted { .. } => {
                report.fuel_exhausted += 1;
                report.exhausted_witnesses.push(name);
            }
        }
    }
    report.loop_witnesses.sort();
    report.exhausted_witnesses.sort();
    Ok(report)
}

/// Result of exploring the full successor graph of one term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exploration {
    /// Every derivation ends; `reachable` terms were visited.
    Terminating { reachable: usize },
    /// Some reachable term can rewrite back to itself.
    Cyclic { witness: Term },
    /// More than the node cap of terms are reachable.
    Capped,
}

/// Explores all derivations from `t` using every successor, not just the
/// first, up to `cap` distinct terms.
pub fn explore(trs: &Trs, t: &Term, cap: usize) -> Exploration {
    let mut succ: HashMap<Term, Vec<Term>> = HashMap::new();
    let mut stack = vec![t.clone()];
    while let Some(u) = stack.pop() {
        if succ.contains_key(&u) {
            continue;
        }
        if succ.len() >= cap {
            return Exploration::Capped;
        }
        let next: Vec<Term> = rewrite_once(trs, &u).into_iter().map(|s| s.term).collect();
        stack.extend(next.iter().filter(|v| !succ.contains_key(*v)).cloned());
        succ.insert(u, next);
    }
    // iterative DFS colouring for a cycle
    let mut done: HashSet<&Term> = HashSet::new();
    let mut on_path: HashSet<&Term> = HashSet::new();
    let mut work: Vec<(&Term, usize)> = vec![(t, 0)];
    on_path.insert(t);
    while let Some((u, i)) = work.pop() {
        let kids = &succ[u];
        if i < kids.len() {
            work.push((u, i + 1));
            let v = &kids[i];
            if on_path.contains(v) {
                return Exploration::Cyclic { witness: v.clone() };
            }
            if !done.contains(v) {
                on_path.insert(v);
                work.push((v, 0));
            }
        } else {
            on_path.remove(u);
            done.insert(u);
        }
    }
    Exploration::Terminating { reachable: succ.len() }
}
