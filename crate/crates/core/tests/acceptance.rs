//! Acceptance checks, one per criterion, each printing a single PASS or
//! FAIL line. Runs without the libtest harness so the lines always show.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tpkit::lab::campaign::{
    bar_campaign, gl_campaign, lemma34_campaign, lemma44_campaign, mbs_campaign, stp_campaign, trial_rng,
    CampaignReport, GenConfig,
};
use tpkit::openrec::{phi, replay_trace, validate_realizer, Constant, PhiBudget, PhiEnv, Scan, ValidationConfig};
use tpkit::relations::{DecompositionLaw, Lifting};
use tpkit::rewriting::{empirical_termination, Trs};
use tpkit::rpo::{check_decomposition_laws, check_decomposition_laws_with, orient_trs, CertificateStatus, SearchConfig};
use tpkit::syntax::parse_trs;
use tpkit::term::{enumerate_ground_terms, Context, Signature, Substitution, Term};
use tpkit::{PrecedenceStatus, RpoInstance};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

fn load(name: &str) -> Trs {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    Trs::from_file(parse_trs(&text).expect("corpus parses")).expect("corpus is a TRS")
}

fn ackermann_instance() -> RpoInstance {
    let sig = Signature::from_symbols([("0", 0), ("s", 1), ("ack", 2)]).unwrap();
    let prec =
        PrecedenceStatus::by_names(&sig, &[("ack", "s"), ("s", "0")], &[("ack", Lifting::Lexicographic)]).unwrap();
    RpoInstance::new(sig, prec)
}

fn ackermann_orientation() -> Outcome {
    let trs = load("ackermann.trs");
    let start = Instant::now();
    let found = orient_trs(trs.signature(), trs.rules(), &SearchConfig::default());
    let elapsed = start.elapsed();
    let Ok(Some((_, cert))) = found else {
        return outcome(false, format!("no orientation found: {found:?}"));
    };
    let lex = cert.statuses.get("ack") == Some(&Lifting::Lexicographic);
    let traced = cert.oriented.len() == 3 && cert.oriented.iter().all(|r| !r.clause_trace.is_empty());
    let revalidated = cert.validate(trs.signature(), trs.rules());
    let reparsed = tpkit::Certificate::from_json(&cert.to_json()).map(|c| c == cert).unwrap_or(false);
    outcome(
        cert.status == CertificateStatus::Yes
            && lex
            && traced
            && revalidated.is_ok()
            && reparsed
            && elapsed < Duration::from_secs(1),
        format!(
            "YES with ack {}, {} traced rules, revalidation {:?}, {elapsed:.2?}",
            cert.statuses["ack"],
            cert.oriented.len(),
            revalidated.map(|_| "ok")
        ),
    )
}

/// A random term over the Ackermann signature plus the given variables.
fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, vars: &[&str], height: usize) -> Term {
    let leaf = height == 0 || rng.gen_bool(0.3);
    if leaf {
        if !vars.is_empty() && rng.gen_bool(0.5) {
            return Term::var(*vars.choose(rng).unwrap());
        }
        return sig.app("0", vec![]).unwrap();
    }
    if rng.gen_bool(0.5) {
        sig.app("s", vec![random_term(rng, sig, vars, height - 1)]).unwrap()
    } else {
        let a = random_term(rng, sig, vars, height - 1);
        let b = random_term(rng, sig, vars, height - 1);
        sig.app("ack", vec![a, b]).unwrap()
    }
}

fn rpo_order_laws() -> Outcome {
    let start = Instant::now();
    let inst = ackermann_instance();
    let sig = inst.signature().clone();
    let universe = enumerate_ground_terms(&sig, 3).unwrap();
    let gt = inst.materialize(&universe);
    let irreflexive = gt.is_irreflexive();
    let transitive = gt.transitivity_violation().is_none();
    let acyclic = gt.is_acyclic();

    let small = enumerate_ground_terms(&sig, 2).unwrap();
    let mut rng = trial_rng(SEED, 0);
    let mut substitution_failures = 0;
    let mut sampled = 0;
    while sampled < 100 {
        let t = random_term(&mut rng, &sig, &["x", "y"], 3);
        let s = random_term(&mut rng, &sig, &["x", "y"], 3);
        if !inst.gt(&t, &s) {
            continue;
        }
        sampled += 1;
        let mut sigma = Substitution::new();
        sigma.insert("x", small.choose(&mut rng).unwrap().clone());
        sigma.insert("y", small.choose(&mut rng).unwrap().clone());
        if !inst.gt(&t.apply(&sigma), &s.apply(&sigma)) {
            substitution_failures += 1;
        }
    }

    let edges = gt.edges();
    let mut context_failures = 0;
    for _ in 0..100 {
        let &(i, j) = edges.choose(&mut rng).unwrap();
        let skeleton = small.choose(&mut rng).unwrap().clone();
        let hole = skeleton.positions().choose(&mut rng).unwrap().clone();
        let ctx = Context::new(skeleton, hole).unwrap();
        if !inst.gt(&ctx.plug(universe[i].clone()), &ctx.plug(universe[j].clone())) {
            context_failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        irreflexive
            && transitive
            && acyclic
            && substitution_failures == 0
            && context_failures == 0
            && elapsed < Duration::from_secs(30),
        format!(
            "{} terms, {} pairs; irreflexive {irreflexive}, transitive {transitive}, acyclic {acyclic}; \
             substitution failures {substitution_failures}/100, context failures {context_failures}/100, {elapsed:.2?}",
            universe.len(),
            gt.edge_count()
        ),
    )
}

fn decomposition_laws() -> Outcome {
    let inst = ackermann_instance();
    let universe = enumerate_ground_terms(inst.signature(), 3).unwrap();
    let report = check_decomposition_laws(&inst, &universe);
    // keep only the precedence clause
    let mutated = check_decomposition_laws_with(&inst, &universe, |t, s| match (t, s) {
        (Term::App(f, _), Term::App(g, ss)) => inst.precedence().gt(*f, *g) && ss.iter().all(|sj| inst.gt(t, sj)),
        _ => false,
    });
    let detected = mutated.law_violations(DecompositionLaw::A);
    outcome(
        report.passed() && detected > 0,
        format!(
            "{} pairs, {} violations; without the lifting clause {detected} law (a) violations",
            report.pairs_checked,
            report.violations.len()
        ),
    )
}

fn campaign_line(r: &CampaignReport, start: Instant) -> String {
    let stats: Vec<String> = r.stats.iter().map(|(k, v)| format!("{k} {v}")).collect();
    format!(
        "{} {}/{} passed (seed {}; {}), {:.2?}",
        r.kind,
        r.passed,
        r.count,
        r.seed,
        stats.join(", "),
        start.elapsed()
    )
}

fn stp_soundness() -> Outcome {
    let start = Instant::now();
    let r = stp_campaign(SEED, 30_000, &GenConfig::default());
    let held = r.stat("hypotheses_hold");
    outcome(
        r.all_passed() && held >= 10_000 && r.stat("falsified") == 0 && start.elapsed() < Duration::from_secs(60),
        campaign_line(&r, start),
    )
}

fn gl_reduction() -> Outcome {
    let start = Instant::now();
    let r = gl_campaign(SEED, 1_000, &GenConfig::default());
    outcome(r.all_passed() && r.stat("discrepancy") == 0, campaign_line(&r, start))
}

fn lemma34_fidelity() -> Outcome {
    let start = Instant::now();
    let r = lemma34_campaign(SEED, 1_000);
    outcome(r.all_passed() && r.stat("lex_transfer") > 0 && r.stat("end_game") > 0, campaign_line(&r, start))
}

fn lemma44_agreement() -> Outcome {
    let start = Instant::now();
    let r = lemma44_campaign(SEED, 1_000, &GenConfig::default());
    outcome(r.all_passed() && r.stat("premises_fail") > 0, campaign_line(&r, start))
}

fn minimal_bad_sequences() -> Outcome {
    let start = Instant::now();
    let r = mbs_campaign(SEED, 1_000, &GenConfig::default());
    outcome(r.all_passed() && r.stat("minimal_bad") > 0 && r.stat("no_bad") > 0, campaign_line(&r, start))
}

fn bar_induction() -> Outcome {
    let start = Instant::now();
    let r = bar_campaign(SEED, 1_000, &GenConfig::default());
    outcome(
        r.all_passed() && r.stat("wellfounded") > 0 && r.stat("not_wellfounded") > 0,
        campaign_line(&r, start),
    )
}

fn phi_fidelity() -> Outcome {
    let env = PhiEnv::nat();
    let cfg = ValidationConfig {
        seed: SEED,
        count: 200,
        domain: 32,
        ..ValidationConfig::default()
    };
    let scan = validate_realizer(&env, &Scan, &cfg);
    let broken = validate_realizer(&env, &Constant(0), &cfg);
    let example = phi(
        &env,
        &tpkit::openrec::Consult,
        &"5,4,3;7".parse::<tpkit::Lasso<usize>>().unwrap().to_sequence(),
        PhiBudget::default(),
    );
    let replays = replay_trace(&example.trace).is_ok() && example.trace.len() > 1;
    outcome(
        scan.passed() && !broken.violations.is_empty() && replays,
        format!(
            "scan: {} sequences, {} violations, {} replay failures; consult trace of {} frames replays {replays}; \
             constant-0 flagged on {} sequences",
            scan.tested,
            scan.violations.len(),
            scan.replay_failures,
            example.trace.len(),
            broken.violations.len()
        ),
    )
}

fn empirical_link() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["ackermann.trs", "arithmetic.trs", "swap.trs", "selfembed.trs"] {
        let trs = load(name);
        let cert = orient_trs(trs.signature(), trs.rules(), &SearchConfig::default());
        let yes = matches!(cert, Ok(Some(_)));
        let report = empirical_termination(&trs, 2, 100_000).unwrap();
        if yes {
            ok &= report.loops == 0 && report.fuel_exhausted == 0;
        }
        if name == "selfembed.trs" {
            ok &= !yes && report.loops > 0;
        } else {
            ok &= yes;
        }
        lines.push(format!(
            "{name}: {} with {} loops over {} terms",
            if yes { "YES" } else { "MAYBE" },
            report.loops,
            report.terms
        ));
    }
    outcome(ok, lines.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("Ackermann orientation", ackermann_orientation),
        ("RPO order laws", rpo_order_laws),
        ("decomposition laws", decomposition_laws),
        ("decomposition principle soundness campaign", stp_soundness),
        ("abstract path ordering reduction", gl_reduction),
        ("open induction construction fidelity", lemma34_fidelity),
        ("premise adapters agree", lemma44_agreement),
        ("minimal bad sequences", minimal_bad_sequences),
        ("bar induction premises", bar_induction),
        ("open recursion fidelity", phi_fidelity),
        ("orientation implies termination on samples", empirical_link),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}  {name}: {}", i + 1, out.summary);
        failed += usize::from(!out.passed);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
