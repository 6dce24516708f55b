//! An interpreter for open recursion over lazy sequences:
//!
//! ```text
//! Φ f α = f α (λn, y, β. if αₙ ⊳ y then Φ f (ᾱn ∗ y ∗ β) else 0)
//! ```
//!
//! A realizer `f` receives `α` and the functional `φ` and must return an
//! index `m` with `αₘ ⊁ αₘ₊₁`, provided `φ` itself answers with
//! non-descent points of the sequences it is asked about. Whether `Φ`
//! terminates is a semantic matter, so evaluation runs under a budget on
//! recursion depth and sequence probes and fails with the path of splice
//! choices when the budget runs out.

use std::cell::{Cell, RefCell};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lab::campaign::trial_rng;
use crate::lab::PrincipleInstance;
use crate::relations::RelationSpec;
use crate::sequence::{Lasso, LazySequence};

/// `≻` and `⊳` on the element domain.
#[derive(Clone, Debug)]
pub struct PhiEnv {
    pub succ: RelationSpec<usize>,
    pub sub: RelationSpec<usize>,
}

impl PhiEnv {
    /// The natural numbers with `>` for both relations.
    pub fn nat() -> Self {
        PhiEnv {
            succ: RelationSpec::unbounded(|a: &usize, b: &usize| a > b),
            sub: RelationSpec::unbounded(|a: &usize, b: &usize| a > b),
        }
    }

    pub fn from_instance(inst: &PrincipleInstance) -> Self {
        let (succ, sub) = (inst.succ.clone(), inst.sub.clone());
        let n = inst.len();
        PhiEnv {
            succ: RelationSpec::unbounded(move |&a, &b| a < n && b < n && succ.holds(a, b)),
            sub: RelationSpec::unbounded(move |&a, &b| a < n && b < n && sub.holds(a, b)),
        }
    }
}

/// Limits on one evaluation of `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiBudget {
    /// Nesting depth of recursive calls; the outermost call has depth 0.
    pub max_depth: usize,
    /// Element reads across all sequences, by the realizer and the guard.
    pub max_probes: usize,
}

impl Default for PhiBudget {
    fn default() -> Self {
        PhiBudget {
            max_depth: 64,
            max_probes: 1 << 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetKind {
    Depth,
    Probes,
}

/// Why an evaluation stopped early.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiAbort {
    pub kind: BudgetKind,
    /// The `(n, y)` splice choices leading to the call that ran out.
    pub path: Vec<(usize, usize)>,
}

impl fmt::Display for PhiAbort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            BudgetKind::Depth => "depth",
            BudgetKind::Probes => "probe",
        };
        write!(f, "{kind} budget exceeded after splices {:?}", self.path)
    }
}

/// Read access to a sequence, charged against the budget.
pub struct Probe<'a> {
    seq: &'a LazySequence<usize>,
    eval: &'a Evaluator<'a>,
}

impl Probe<'_> {
    pub fn get(&self, n: usize) -> Result<usize, PhiAbort> {
        self.eval.charge()?;
        Ok(self.seq.get(n))
    }

    pub fn sequence(&self) -> &LazySequence<usize> {
        self.seq
    }

    pub fn succ(&self, x: usize, y: usize) -> bool {
        self.eval.env.succ.holds(&x, &y)
    }

    pub fn sub(&self, x: usize, y: usize) -> bool {
        self.eval.env.sub.holds(&x, &y)
    }

    /// The first `m ≥ from` with `αₘ ⊁ αₘ₊₁`.
    pub fn scan_from(&self, from: usize) -> Result<usize, PhiAbort> {
        let mut m = from;
        let mut cur = self.get(m)?;
        loop {
            let next = self.get(m + 1)?;
            if !self.succ(cur, next) {
                return Ok(m);
            }
            cur = next;
            m += 1;
        }
    }
}

/// The `φ` handed to a realizer.
pub type Phi<'a> = dyn FnMut(usize, usize, LazySequence<usize>) -> Result<usize, PhiAbort> + 'a;

pub trait Realizer: Send + Sync {
    fn name(&self) -> &str;
    fn realize(&self, alpha: &Probe<'_>, phi: &mut Phi<'_>) -> Result<usize, PhiAbort>;
}

/// Ignores `φ` and scans `α` for its first non-descent.
#[derive(Clone, Copy, Debug, Default)]
pub struct Scan;

impl Realizer for Scan {
    fn name(&self) -> &str {
        "scan"
    }

    fn realize(&self, alpha: &Probe<'_>, _phi: &mut Phi<'_>) -> Result<usize, PhiAbort> {
        alpha.scan_from(0)
    }
}

/// Asks `φ` once, at `(0, α₁ ∸ 1, 0, 0, …)`, then scans `α` from the
/// answer.
#[derive(Clone, Copy, Debug, Default)]
pub struct Consult;

impl Realizer for Consult {
    fn name(&self) -> &str {
        "consult"
    }

    fn realize(&self, alpha: &Probe<'_>, phi: &mut Phi<'_>) -> Result<usize, PhiAbort> {
        let y = alpha.get(1)?.saturating_sub(1);
        let k = phi(0, y, LazySequence::constant(0))?;
        alpha.scan_from(k)
    }
}

/// Always answers 0; wrong whenever `α₀ ≻ α₁`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Constant(pub usize);

impl Realizer for Constant {
    fn name(&self) -> &str {
        "constant"
    }

    fn realize(&self, _alpha: &Probe<'_>, _phi: &mut Phi<'_>) -> Result<usize, PhiAbort> {
        Ok(self.0)
    }
}

/// Looks up a reference realizer by name: `scan`, `consult` or `constant`.
pub fn realizer_by_name(name: &str) -> Option<Box<dyn Realizer>> {
    match name {
        "scan" => Some(Box::new(Scan)),
        "consult" => Some(Box::new(Consult)),
        "constant" => Some(Box::new(Constant(0))),
        _ => None,
    }
}

/// Elements shown per sequence in a trace frame.
pub const TRACE_WINDOW: usize = 12;

/// One evaluation of `Φ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub depth: usize,
    pub parent: Option<usize>,
    /// The `n` of the splice that produced this call's argument.
    pub spliced_at: Option<usize>,
    pub y: Option<usize>,
    /// The realizer's answer, absent if the call was cut off.
    pub f_result: Option<usize>,
    /// Whether the answer is a non-descent point of this call's argument.
    pub non_descent: Option<bool>,
    /// The start of this call's argument.
    pub alpha: Vec<usize>,
    /// The start of the `β` passed to `φ`.
    pub beta: Vec<usize>,
    /// Queries `φ(n, y, β)` answered by the `else 0` branch.
    pub declined: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PhiResult {
    Index { index: usize },
    BudgetExceeded { abort: PhiAbort },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiOutcome {
    pub result: PhiResult,
    /// For an index `m`, whether `αₘ ⊁ αₘ₊₁`; a `false` here means the
    /// realizer broke its contract.
    pub assertion: Option<bool>,
    pub trace: Vec<Frame>,
    pub probes: usize,
    pub max_depth: usize,
}

impl PhiOutcome {
    pub fn index(&self) -> Option<usize> {
        match self.result {
            PhiResult::Index { index } => Some(index),
            PhiResult::BudgetExceeded { .. } => None,
        }
    }
}

struct Evaluator<'a> {
    env: &'a PhiEnv,
    f: &'a dyn Realizer,
    budget: PhiBudget,
    probes: Cell<usize>,
    path: RefCell<Vec<(usize, usize)>>,
    frames: RefCell<Vec<Frame>>,
    deepest: Cell<usize>,
}

impl<'a> Evaluator<'a> {
    fn abort(&self, kind: BudgetKind) -> PhiAbort {
        PhiAbort {
            kind,
            path: self.path.borrow().clone(),
        }
    }

    fn charge(&self) -> Result<(), PhiAbort> {
        let p = self.probes.get() + 1;
        self.probes.set(p);
        if p > self.budget.max_probes {
            return Err(self.abort(BudgetKind::Probes));
        }
        Ok(())
    }

    fn call(
        &'a self,
        alpha: &LazySequence<usize>,
        depth: usize,
        parent: Option<usize>,
        origin: Option<(usize, usize, Vec<usize>)>,
    ) -> Result<usize, PhiAbort> {
        if depth > self.budget.max_depth {
            return Err(self.abort(BudgetKind::Depth));
        }
        self.deepest.set(self.deepest.get().max(depth));
        let id = {
            let mut frames = self.frames.borrow_mut();
            let (spliced_at, y, beta) = match origin {
                Some((n, y, beta)) => (Some(n), Some(y), beta),
                None => (None, None, Vec::new()),
            };
            frames.push(Frame {
                depth,
                parent,
                spliced_at,
                y,
                f_result: None,
                non_descent: None,
                alpha: alpha.prefix(TRACE_WINDOW),
                beta,
                declined: Vec::new(),
            });
            frames.len() - 1
        };
        let probe = Probe { seq: alpha, eval: self };
        let mut phi = |n: usize, y: usize, beta: LazySequence<usize>| -> Result<usize, PhiAbort> {
            let an = probe.get(n)?;
            if self.env.sub.holds(&an, &y) {
                let spliced = alpha.splice(n, y, &beta);
                self.path.borrow_mut().push((n, y));
                let r = self.call(&spliced, depth + 1, Some(id), Some((n, y, beta.prefix(TRACE_WINDOW))));
                self.path.borrow_mut().pop();
                r
            } else {
                self.frames.borrow_mut()[id].declined.push((n, y));
                Ok(0)
            }
        };
        let m = self.f.realize(&probe, &mut phi)?;
        let ok = !self.env.succ.holds(&alpha.get(m), &alpha.get(m + 1));
        let mut frames = self.frames.borrow_mut();
        frames[id].f_result = Some(m);
        frames[id].non_descent = Some(ok);
        Ok(m)
    }
}

/// Evaluates `Φ f α`.
pub fn phi(env: &PhiEnv, f: &dyn Realizer, alpha: &LazySequence<usize>, budget: PhiBudget) -> PhiOutcome {
    let eval = Evaluator {
        env,
        f,
        budget,
        probes: Cell::new(0),
        path: RefCell::new(Vec::new()),
        frames: RefCell::new(Vec::new()),
        deepest: Cell::new(0),
    };
    let result = eval.call(alpha, 0, None, None);
    let (result, assertion) = match result {
        Ok(index) => (
            PhiResult::Index { index },
            Some(!env.succ.holds(&alpha.get(index), &alpha.get(index + 1))),
        ),
        Err(abort) => (PhiResult::BudgetExceeded { abort }, None),
    };
    PhiOutcome {
        result,
        assertion,
        probes: eval.probes.get(),
        max_depth: eval.deepest.get(),
        trace: eval.frames.into_inner(),
    }
}

/// Checks that every recursive call's argument is the splice of its
/// parent's argument, on the recorded windows. Returns the first frame
/// that does not replay.
pub fn replay_trace(trace: &[Frame]) -> Result<(), String> {
    for (i, fr) in trace.iter().enumerate() {
        let Some(p) = fr.parent else {
            if i != 0 || fr.depth != 0 {
                return Err(format!("frame {i} has no parent but is not the root"));
            }
            continue;
        };
        let parent = trace.get(p).ok_or_else(|| format!("frame {i}: parent {p} missing"))?;
        if p >= i || fr.depth != parent.depth + 1 {
            return Err(format!("frame {i}: bad parent link or depth"));
        }
        let (n, y) = fr.spliced_at.zip(fr.y).ok_or_else(|| format!("frame {i}: no splice recorded"))?;
        for (k, &v) in fr.alpha.iter().enumerate() {
            let expected = match k.cmp(&n) {
                std::cmp::Ordering::Less => parent.alpha.get(k).copied(),
                std::cmp::Ordering::Equal => Some(y),
                std::cmp::Ordering::Greater => fr.beta.get(k - n - 1).copied(),
            };
            if expected.is_some_and(|e| e != v) {
                return Err(format!("frame {i}: element {k} is {v}, splice gives {expected:?}"));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub seed: u64,
    pub count: usize,
    /// Elements are drawn from `0..domain`.
    pub domain: usize,
    /// Longest non-constant prefix.
    pub max_prefix: usize,
    pub budget: PhiBudget,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            seed: 0,
            count: 200,
            domain: 32,
            max_prefix: 8,
            budget: PhiBudget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizerViolation {
    pub alpha: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub realizer: String,
    pub tested: usize,
    pub violations: Vec<RealizerViolation>,
    pub budget_exceeded: usize,
    pub replay_failures: usize,
    pub deepest: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.budget_exceeded == 0 && self.replay_failures == 0
    }
}

/// A random eventually constant sequence over `0..domain`.
pub fn random_eventually_constant(rng: &mut impl Rng, domain: usize, max_prefix: usize) -> Lasso<usize> {
    let len = rng.gen_range(0..=max_prefix);
    let prefix = (0..len).map(|_| rng.gen_range(0..domain)).collect();
    Lasso::eventually_constant(prefix, rng.gen_range(0..domain))
}

/// Runs `f` through `Φ` on random eventually constant sequences and checks
/// each answer is a non-descent point.
pub fn validate_realizer(env: &PhiEnv, f: &dyn Realizer, cfg: &ValidationConfig) -> ValidationReport {
    let mut report = ValidationReport {
        realizer: f.name().to_string(),
        tested: 0,
        violations: Vec::new(),
        budget_exceeded: 0,
        replay_failures: 0,
        deepest: 0,
    };
    for i in 0..cfg.count {
        let alpha = random_eventually_constant(&mut trial_rng(cfg.seed, i), cfg.domain.max(1), cfg.max_prefix);
        let out = phi(env, f, &alpha.to_sequence(), cfg.budget);
        report.tested += 1;
        report.deepest = report.deepest.max(out.max_depth);
        if replay_trace(&out.trace).is_err() {
            report.replay_failures += 1;
        }
        match (out.index(), out.assertion) {
            (Some(index), Some(false)) => report.violations.push(RealizerViolation {
                alpha: alpha.to_string(),
                index,
            }),
            (None, _) => report.budget_exceeded += 1,
            _ => {}
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lasso(s: &str) -> LazySequence<usize> {
        s.parse::<Lasso<usize>>().unwrap().to_sequence()
    }

    #[test]
    fn scan_finds_the_first_non_descent() {
        let out = phi(&PhiEnv::nat(), &Scan, &lasso("5,4,3;7"), PhiBudget::default());
        assert_eq!(out.index(), Some(2));
        assert_eq!(out.assertion, Some(true));
        assert_eq!(out.trace.len(), 1);
        let out = phi(&PhiEnv::nat(), &Scan, &lasso(";0"), PhiBudget::default());
        assert_eq!(out.index(), Some(0));
    }

    #[test]
    fn consult_recurses_twice() {
        let out = phi(&PhiEnv::nat(), &Consult, &lasso("5,4,3;7"), PhiBudget::default());
        assert_eq!(out.index(), Some(2));
        assert_eq!(out.assertion, Some(true));
        assert_eq!(out.max_depth, 2);
        let depths: Vec<usize> = out.trace.iter().map(|f| f.depth).collect();
        assert_eq!(depths, vec![0, 1, 2]);
        assert_eq!(out.trace[1].alpha[..4], [3, 0, 0, 0]);
        assert_eq!(out.trace[2].declined, vec![(0, 0)]);
        replay_trace(&out.trace).unwrap();

        let cut = phi(
            &PhiEnv::nat(),
            &Consult,
            &lasso("5,4,3;7"),
            PhiBudget {
                max_depth: 1,
                max_probes: 1000,
            },
        );
        match cut.result {
            PhiResult::BudgetExceeded { abort } => {
                assert_eq!(abort.kind, BudgetKind::Depth);
                assert_eq!(abort.path, vec![(0, 3), (0, 0)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn else_branch_returns_zero() {
        struct Ask;
        impl Realizer for Ask {
            fn name(&self) -> &str {
                "ask"
            }
            fn realize(&self, _alpha: &Probe<'_>, phi: &mut Phi<'_>) -> Result<usize, PhiAbort> {
                phi(0, 9, LazySequence::constant(1))
            }
        }
        let out = phi(&PhiEnv::nat(), &Ask, &lasso("2;0"), PhiBudget::default());
        assert_eq!(out.index(), Some(0));
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].declined, vec![(0, 9)]);
    }

    #[test]
    fn bad_sequence_exhausts_probes() {
        let env = PhiEnv::from_instance(
            &PrincipleInstance::unlabeled(
                crate::relations::FiniteRelation::from_edges(2, [(0, 1), (1, 0)]),
                crate::relations::FiniteRelation::empty(2),
                None,
                None,
            )
            .unwrap(),
        );
        let budget = PhiBudget {
            max_depth: 4,
            max_probes: 50,
        };
        let out = phi(&env, &Scan, &lasso(";0,1"), budget);
        assert!(matches!(out.result, PhiResult::BudgetExceeded { abort } if abort.kind == BudgetKind::Probes));
    }

    #[test]
    fn replay_detects_tampering() {
        let mut out = phi(&PhiEnv::nat(), &Consult, &lasso("5,4,3;7"), PhiBudget::default());
        out.trace[1].alpha[0] = 9;
        assert!(replay_trace(&out.trace).is_err());
    }

    #[test]
    fn validation() {
        let env = PhiEnv::nat();
        let cfg = ValidationConfig::default();
        let scan = validate_realizer(&env, &Scan, &cfg);
        assert!(scan.passed(), "{scan:?}");
        let consult = validate_realizer(&env, &Consult, &cfg);
        assert!(consult.passed(), "{consult:?}");
        let broken = validate_realizer(&env, &Constant(0), &cfg);
        assert!(!broken.violations.is_empty());
        let c = phi(&env, &Constant(0), &lasso("5,4;4"), PhiBudget::default());
        assert_eq!(c.assertion, Some(false));
        let c = phi(&env, &Constant(0), &lasso(";3"), PhiBudget::default());
        assert_eq!(c.assertion, Some(true));
    }

    #[test]
    fn splice_identity() {
        let a = lasso("4,1,5;9,2");
        for n in 0..6 {
            let back = a.splice(n, a.get(n), &a.shift(n + 1));
            assert_eq!(back.prefix(20), a.prefix(20));
        }
    }
}
