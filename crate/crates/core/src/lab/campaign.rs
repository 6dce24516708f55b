//! Random instance generators and seeded property campaigns.
//!
//! Trial `i` of a campaign with seed `s` draws from a ChaCha8 stream
//! seeded with `s` and set to stream `i`, so any single trial replays
//! without rerunning the others, and results do not depend on how rayon
//! schedules the trials.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::bar::bar_induction_check;
use super::instance::PrincipleInstance;
use super::lemma34::{check_identities, Lemma34, OpenPredicate};
use super::lemma44::lemma44_check;
use super::mbs::{minimal_bad_sequence, wellfounded_by_walks, MinimalBad};
use super::stp::{gl_check, stp_check, StpVerdict};
use crate::relations::{is_wellfounded_finite, FiniteRelation, RelationSpec, WellFoundedness};
use crate::sequence::{Lasso, LazySequence};

/// The RNG for trial `index` of the campaign seeded with `seed`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Size and density knobs for the generators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub max_size: usize,
    pub density: f64,
    /// Probability of adding edges that may close cycles.
    pub cyclic: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_size: 6,
            density: 0.35,
            cyclic: 0.5,
        }
    }
}

impl GenConfig {
    pub fn with_max_size(self, max_size: usize) -> Self {
        GenConfig { max_size, ..self }
    }
}

/// Edges only from higher to lower rank under a random ranking.
pub fn random_dag(rng: &mut impl Rng, n: usize, p: f64) -> FiniteRelation {
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    FiniteRelation::from_fn(n, |i, j| rank[i] > rank[j] && rng.gen_bool(p))
}

/// A DAG plus, with probability `cfg.cyclic`, a few arbitrary edges.
pub fn random_order_like(rng: &mut impl Rng, n: usize, cfg: &GenConfig) -> FiniteRelation {
    let mut r = random_dag(rng, n, cfg.density);
    if n > 0 && rng.gen_bool(cfg.cyclic) {
        for _ in 0..rng.gen_range(1..=n.max(1)) {
            r.insert(rng.gen_range(0..n), rng.gen_range(0..n));
        }
    }
    r
}

/// Random `≻` and acyclic `⊳`, without `≻₀` or `≫`.
pub fn random_instance(rng: &mut impl Rng, cfg: &GenConfig) -> PrincipleInstance {
    let n = rng.gen_range(1..=cfg.max_size.max(1));
    let succ = random_order_like(rng, n, cfg);
    let sub = random_dag(rng, n, cfg.density);
    PrincipleInstance::unlabeled(succ, sub, None, None).expect("generated sub is acyclic")
}

/// Grows `succ` and `aux` until `aux` covers every `≻`-pair not covered
/// through `⊳` (law (a)) and `x ≻ u` whenever `aux(x, y)` and `y ⊳ u`
/// (law (b)). Both only grow, so this terminates.
pub fn repair_decomposition(succ: &mut FiniteRelation, sub: &FiniteRelation, aux: &mut FiniteRelation) {
    let n = succ.len();
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if succ.holds(x, y) && !aux.holds(x, y) && !sub.successors(x).any(|u| u == y || succ.holds(u, y)) {
                    aux.insert(x, y);
                    changed = true;
                }
                if aux.holds(x, y) {
                    let missing: Vec<usize> = sub.successors(y).filter(|&u| !succ.holds(x, u)).collect();
                    for u in missing {
                        succ.insert(x, u);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn random_with_aux(rng: &mut impl Rng, cfg: &GenConfig) -> (FiniteRelation, FiniteRelation, FiniteRelation) {
    let n = rng.gen_range(1..=cfg.max_size.max(1));
    let mut succ = random_order_like(rng, n, cfg);
    let sub = random_dag(rng, n, cfg.density);
    let mut aux = FiniteRelation::from_fn(n, |x, y| succ.holds(x, y) && rng.gen_bool(0.5));
    repair_decomposition(&mut succ, &sub, &mut aux);
    (succ, sub, aux)
}

/// An instance whose `≻₀` is a decomposition of `≻`.
pub fn random_stp_instance(rng: &mut impl Rng, cfg: &GenConfig) -> PrincipleInstance {
    let (succ, sub, succ0) = random_with_aux(rng, cfg);
    PrincipleInstance::unlabeled(succ, sub, Some(succ0), None).expect("generated sub is acyclic")
}

/// An instance whose `≫` satisfies the covering hypothesis.
pub fn random_gl_instance(rng: &mut impl Rng, cfg: &GenConfig) -> PrincipleInstance {
    let (succ, sub, mut gg) = random_with_aux(rng, cfg);
    if rng.gen_bool(0.3) {
        let n = succ.len();
        gg.insert(rng.gen_range(0..n), rng.gen_range(0..n));
    }
    PrincipleInstance::unlabeled(succ, sub, None, Some(gg)).expect("generated sub is acyclic")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignFailure {
    pub index: usize,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub kind: String,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    /// How many trials fell into each category.
    pub stats: BTreeMap<String, usize>,
    pub failures: Vec<CampaignFailure>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn stat(&self, key: &str) -> usize {
        self.stats.get(key).copied().unwrap_or(0)
    }
}

/// The result of one trial.
pub struct Trial {
    pub passed: bool,
    pub tags: Vec<&'static str>,
    pub detail: Value,
}

/// Runs `count` trials in parallel.
pub fn run_campaign(
    kind: &str,
    seed: u64,
    count: usize,
    trial: impl Fn(&mut ChaCha8Rng) -> Trial + Sync,
) -> CampaignReport {
    let results: Vec<Trial> = (0..count).into_par_iter().map(|i| trial(&mut trial_rng(seed, i))).collect();
    let mut stats = BTreeMap::new();
    let mut failures = Vec::new();
    for (index, t) in results.into_iter().enumerate() {
        for tag in t.tags {
            *stats.entry(tag.to_string()).or_insert(0) += 1;
        }
        if !t.passed {
            failures.push(CampaignFailure { index, detail: t.detail });
        }
    }
    CampaignReport {
        kind: kind.to_string(),
        seed,
        count,
        passed: count - failures.len(),
        stats,
        failures,
    }
}

fn doc(inst: &PrincipleInstance) -> Value {
    serde_json::to_value(inst.to_doc()).expect("instances serialize")
}

fn tag_if(tags: &mut Vec<&'static str>, cond: bool, tag: &'static str) {
    if cond {
        tags.push(tag);
    }
}

/// Passing hypotheses must come with every element well-founded; the
/// conclusion is cross-checked with a walk-counting oracle.
pub fn stp_campaign(seed: u64, count: usize, cfg: &GenConfig) -> CampaignReport {
    run_campaign("stp", seed, count, |rng| {
        let inst = random_stp_instance(rng, cfg);
        let r = stp_check(&inst).expect("generated with succ0");
        let oracle_wf = wellfounded_by_walks(&inst.succ).iter().all(|&b| b);
        let agrees = r.conclusion.is_none_or(|c| c == oracle_wf);
        let mut tags = vec![];
        tag_if(&mut tags, r.hypotheses_hold, "hypotheses_hold");
        tag_if(&mut tags, !r.decomposition.passed(), "decomposition_fails");
        tag_if(&mut tags, !oracle_wf, "not_wellfounded");
        tag_if(&mut tags, r.verdict() == StpVerdict::Falsified, "falsified");
        Trial {
            passed: r.sound() && agrees,
            tags,
            detail: json!({"instance": doc(&inst), "report": r}),
        }
    })
}

pub fn gl_campaign(seed: u64, count: usize, cfg: &GenConfig) -> CampaignReport {
    run_campaign("gl", seed, count, |rng| {
        let inst = random_gl_instance(rng, cfg);
        let r = gl_check(&inst).expect("generated with gg");
        let mut tags = vec![];
        tag_if(&mut tags, r.hypotheses_hold, "hypotheses_hold");
        tag_if(&mut tags, r.discrepancy(), "discrepancy");
        Trial {
            passed: r.sound(),
            tags,
            detail: json!({"instance": doc(&inst), "report": r}),
        }
    })
}

/// Random `B`: a hash of the sequence and a per-trial salt, true with
/// probability about `1/k`, and never on sequences shorter than `min_len`.
fn random_predicate(rng: &mut impl Rng) -> OpenPredicate {
    let salt: u64 = rng.gen();
    let k: u64 = rng.gen_range(2..=8);
    let min_len: usize = rng.gen_range(0..=3);
    OpenPredicate::new(move |c| {
        let mut h = salt;
        for &x in c {
            h = h.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(x as u64 + 1);
            h ^= h >> 29;
        }
        c.len() >= min_len && h.is_multiple_of(k)
    })
}

fn random_lasso(rng: &mut impl Rng, n: usize, max_len: usize) -> Lasso<usize> {
    let p = rng.gen_range(0..max_len);
    let c = rng.gen_range(1..=max_len - p);
    let prefix = (0..p).map(|_| rng.gen_range(0..n)).collect();
    let cycle = (0..c).map(|_| rng.gen_range(0..n)).collect();
    Lasso::new(prefix, cycle).expect("nonempty cycle")
}

/// Coherent chains `γₘ = ᾱ(N+m)` over carriers of size at most 4, with
/// `N` and the probe count bounded by `L ≤ 6`.
pub fn lemma34_campaign(seed: u64, count: usize) -> CampaignReport {
    run_campaign("lemma34", seed, count, |rng| {
        let n = rng.gen_range(1..=4);
        let cap = rng.gen_range(2..=6);
        let sub = random_dag(rng, n, 0.5);
        let l = Lemma34::new(random_predicate(rng), sub);
        let alpha = random_lasso(rng, n, 4);
        let n0 = rng.gen_range(0..cap);
        let probes = cap;
        let diverge = {
            let m = rng.gen_range(0..n0 + probes);
            let kids: Vec<usize> = l.sub.successors(alpha.get(m)).collect();
            kids.choose(rng).map(|&y| (m, y))
        };
        let tail = random_lasso(rng, n, 3);
        let check = check_identities(&l, &alpha.to_sequence(), n0, diverge, &tail.to_sequence(), probes);
        let mut tags = vec![];
        tag_if(&mut tags, check.lex_transfers > 0, "lex_transfer");
        tag_if(&mut tags, check.end_games > 0, "end_game");
        Trial {
            passed: check.passed(),
            tags,
            detail: json!({
                "alpha": alpha.to_string(), "n0": n0, "diverge": diverge,
                "tail": tail.to_string(), "violations": check.violations,
            }),
        }
    })
}

/// Both premises and both adapters over lassos of length at most 4.
pub fn lemma44_campaign(seed: u64, count: usize, cfg: &GenConfig) -> CampaignReport {
    let cfg = cfg.with_max_size(cfg.max_size.min(4));
    run_campaign("lemma44", seed, count, |rng| {
        let inst = random_instance(rng, &cfg);
        let r = lemma44_check(&inst, 4);
        let mut tags = vec![];
        tag_if(&mut tags, r.tp_premise, "premises_hold");
        tag_if(&mut tags, !r.tp_premise, "premises_fail");
        Trial {
            passed: r.passed(),
            tags,
            detail: json!({"instance": doc(&inst), "report": r}),
        }
    })
}

pub fn mbs_campaign(seed: u64, count: usize, cfg: &GenConfig) -> CampaignReport {
    run_campaign("mbs", seed, count, |rng| {
        let inst = random_instance(rng, cfg);
        let len = inst.len() + 2;
        let r = minimal_bad_sequence(&inst, len).expect("positive length");
        let spec = RelationSpec::from_edges((0..inst.len()).collect(), inst.succ.edges());
        let wf = matches!(is_wellfounded_finite(&spec), Ok(WellFoundedness::WellFounded));
        let (ok, tag) = match &r {
            MinimalBad::NoBad => (wf, "no_bad"),
            MinimalBad::MinimalBad { prefix, verification } => {
                (!wf && verification.passed() && prefix.len() == len, "minimal_bad")
            }
        };
        Trial {
            passed: ok,
            tags: vec![tag],
            detail: json!({"instance": doc(&inst), "result": r}),
        }
    })
}

/// Well-founded instances must pass all premises and derive `P(⟨⟩)`;
/// the others must fail a premise with a witness.
pub fn bar_campaign(seed: u64, count: usize, cfg: &GenConfig) -> CampaignReport {
    let cfg = cfg.with_max_size(cfg.max_size.min(4));
    run_campaign("bi", seed, count, |rng| {
        let inst = random_instance(rng, &cfg);
        let r = bar_induction_check(&inst, inst.len() + 1);
        let wf = wellfounded_by_walks(&inst.succ).iter().all(|&b| b);
        let expected = if wf {
            r.premises_hold() && r.derived == Some(true)
        } else {
            r.premise2_witness.is_some() || r.premise3_witness.is_some()
        };
        let mut tags = vec![if wf { "wellfounded" } else { "not_wellfounded" }];
        tag_if(&mut tags, r.premises_hold(), "premises_hold");
        Trial {
            passed: expected && r.sound(),
            tags,
            detail: json!({"instance": doc(&inst), "report": r}),
        }
    })
}

/// A lazily generated random sequence over `0..n`, for tests that need a
/// sequence that is not a lasso.
pub fn random_sequence(seed: u64, n: usize) -> LazySequence<usize> {
    LazySequence::new(move |i| trial_rng(seed, i).gen_range(0..n.max(1)))
}
