//! `tpkit`: termination checking with certificates, rewrite tracing,
//! principle-lab checks and campaigns, and open recursion demos.
//!
//! Exit codes: 0 success, 1 bad input, 2 no orientation found (MAYBE),
//! 3 search budget exhausted, 4 open recursion budget exhausted,
//! 10 a soundness property failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tpkit::lab::campaign::{
    bar_campaign, gl_campaign, lemma34_campaign, lemma44_campaign, mbs_campaign, stp_campaign, CampaignReport,
    GenConfig,
};
use tpkit::lab::{
    bar_induction_check, check_on_instance, gl_check, lemma44_check, minimal_bad_sequence, stp_check, MinimalBad,
    PrincipleInstance, StpVerdict,
};
use tpkit::openrec::{phi, realizer_by_name, replay_trace, PhiBudget, PhiEnv, PhiResult};
use tpkit::rewriting::{empirical_termination, normalize_with, LoopCheck, Normalization, Trs};
use tpkit::rpo::{orient_trs, Certificate, CertificateStatus, OrientError, SearchConfig, StatusMode};
use tpkit::syntax::parse_trs;
use tpkit::{Lasso, Position, RpoInstance};

const EXIT_PARSE: u8 = 1;
const EXIT_MAYBE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_PHI_BUDGET: u8 = 4;
const EXIT_SOUNDNESS: u8 = 10;

#[derive(Parser)]
#[command(name = "tpkit", version, about = "Recursive path orders and termination principles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a recursive path order orienting every rule.
    Check(CheckArgs),
    /// Rewrite a term to normal form, printing each step.
    Trace(TraceArgs),
    /// Run a principle checker on an instance file, or a random campaign.
    Lab(LabArgs),
    /// Evaluate the open recursion functional on a sequence.
    Phi(PhiArgs),
    /// Write the order on the ground terms of a TRS as an instance file.
    Export(ExportArgs),
}

#[derive(Args)]
struct CheckArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value_t = Status::Auto)]
    status: Status,
    /// Height of the ground terms normalised as a sanity check; 0 skips it.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, env = "TPKIT_FUEL", default_value_t = 10_000)]
    fuel: usize,
    /// Maximum number of precedence and status candidates examined.
    #[arg(long, env = "TPKIT_SEARCH_BUDGET", default_value_t = tpkit::rpo::DEFAULT_SEARCH_BUDGET)]
    budget: usize,
    /// Print the certificate as JSON.
    #[arg(long)]
    json: bool,
    /// Also write the certificate JSON to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Status {
    Lex,
    Mul,
    Auto,
}

impl From<Status> for StatusMode {
    fn from(s: Status) -> Self {
        match s {
            Status::Lex => StatusMode::Lex,
            Status::Mul => StatusMode::Mul,
            Status::Auto => StatusMode::Auto,
        }
    }
}

#[derive(Args)]
struct TraceArgs {
    path: PathBuf,
    term: String,
    #[arg(long, env = "TPKIT_FUEL", default_value_t = 10_000)]
    fuel: usize,
    /// `exact` stops on a repeated term, `embedding` on `u →⁺ C[u]`.
    #[arg(long, default_value = "exact")]
    loop_check: LoopCheck,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LabArgs {
    #[arg(value_enum)]
    kind: LabKind,
    /// Instance JSON file.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    path: Option<PathBuf>,
    /// Run a campaign over random instances instead.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Largest random carrier.
    #[arg(long, default_value_t = 6)]
    max_size: usize,
    /// Sequence length bound for the checks that take one.
    #[arg(long)]
    len: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabKind {
    Stp,
    Gl,
    Mbs,
    Bi,
    Lemma34,
    Lemma44,
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long, default_value = "scan")]
    realizer: String,
    /// The sequence: a comma list, then `;` and the repeating part.
    #[arg(long)]
    alpha: String,
    /// Maximum recursion depth.
    #[arg(long, env = "TPKIT_PHI_DEPTH", default_value_t = 64)]
    budget: usize,
    #[arg(long, default_value_t = 1 << 16)]
    probes: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    path: PathBuf,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, env = "TPKIT_SEARCH_BUDGET", default_value_t = tpkit::rpo::DEFAULT_SEARCH_BUDGET)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error carrying its exit code.
struct Failure(u8, anyhow::Error);

fn fail(code: u8, e: impl Into<anyhow::Error>) -> Failure {
    Failure(code, e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Lab(a) => cmd_lab(a),
        Command::Phi(a) => cmd_phi(a),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(|e| fail(EXIT_PARSE, e))
}

fn load_trs(path: &Path) -> Result<Trs, Failure> {
    let text = read(path)?;
    let file = parse_trs(&text).map_err(|e| fail(EXIT_PARSE, anyhow!("{}:{e}", path.display())))?;
    Trs::from_file(file).map_err(|e| fail(EXIT_PARSE, anyhow!("{}: {e}", path.display())))
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn show_position(p: &Position) -> String {
    if p.is_empty() {
        "ε".to_string()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

fn cmd_check(a: CheckArgs) -> Result<u8, Failure> {
    let trs = load_trs(&a.path)?;
    let cfg = SearchConfig {
        status: a.status.into(),
        budget: a.budget,
    };
    let found = match orient_trs(trs.signature(), trs.rules(), &cfg) {
        Ok(found) => found,
        Err(OrientError::BudgetExceeded { budget }) => {
            let cert = Certificate::without_instance(CertificateStatus::Budget);
            if a.json {
                println!("{}", cert.to_json());
            } else {
                println!("BUDGET: no orientation among the first {budget} candidates");
            }
            return Ok(EXIT_BUDGET);
        }
        Err(e) => return Err(fail(EXIT_PARSE, e)),
    };
    let Some((_, cert)) = found else {
        let cert = Certificate::without_instance(CertificateStatus::NoInstance);
        if a.json {
            println!("{}", cert.to_json());
        } else {
            println!("MAYBE: no precedence and status orient every rule");
        }
        return Ok(EXIT_MAYBE);
    };
    if let Some(out) = &a.out {
        std::fs::write(out, cert.to_json())
            .with_context(|| format!("cannot write {}", out.display()))
            .map_err(|e| fail(EXIT_PARSE, e))?;
    }
    if a.json {
        println!("{}", cert.to_json());
    } else {
        println!("YES");
        let prec: Vec<String> = cert.precedence.iter().map(|(f, g)| format!("{f} > {g}")).collect();
        println!("precedence: {}", if prec.is_empty() { "(none needed)".into() } else { prec.join(", ") });
        let statuses: Vec<String> = cert
            .statuses
            .iter()
            .filter(|(f, _)| trs.signature().lookup(f).is_some_and(|id| trs.signature().arity(id) >= 2))
            .map(|(f, l)| format!("{f} {l}"))
            .collect();
        if !statuses.is_empty() {
            println!("status: {}", statuses.join(", "));
        }
        for (k, r) in cert.oriented.iter().enumerate() {
            let clause = r.clause_trace.first().map(|s| format!("{:?}", s.clause)).unwrap_or_default();
            let steps = r.clause_trace.len();
            let plural = if steps == 1 { "" } else { "s" };
            println!("rule {k}: {} -> {} by {clause} ({steps} step{plural})", r.lhs, r.rhs);
        }
    }
    if a.depth > 0 {
        match empirical_termination(&trs, a.depth, a.fuel) {
            Ok(report) if report.loops > 0 => {
                eprintln!(
                    "internal error: certified terminating, yet {} loops among ground terms of height {}: {}",
                    report.loops,
                    a.depth,
                    report.loop_witnesses.join(", ")
                );
                return Ok(EXIT_SOUNDNESS);
            }
            Ok(report) => {
                if !a.json {
                    println!(
                        "sanity: {} ground terms of height ≤ {} normalised, {} out of fuel",
                        report.terms, a.depth, report.fuel_exhausted
                    );
                }
            }
            Err(e) => eprintln!("sanity check skipped: {e}"),
        }
    }
    Ok(0)
}

fn cmd_trace(a: TraceArgs) -> Result<u8, Failure> {
    let text = read(&a.path)?;
    let file = parse_trs(&text).map_err(|e| fail(EXIT_PARSE, anyhow!("{}:{e}", a.path.display())))?;
    let trs = Trs::from_file(file.clone()).map_err(|e| fail(EXIT_PARSE, e))?;
    let vars: Vec<&str> = Vec::new();
    let term = tpkit::syntax::parse_term(&a.term, trs.signature(), &vars)
        .map_err(|e| fail(EXIT_PARSE, anyhow!("term:{e}")))?;
    let sig = trs.signature();
    let result = normalize_with(&trs, &term, a.fuel, a.loop_check);
    let lines = result.trace().render(sig);
    if a.json {
        print_json(&serde_json::json!({
            "start": sig.show(&term),
            "outcome": result.kind(),
            "steps": lines,
        }));
        return Ok(0);
    }
    println!("start: {}", sig.show(&term));
    for (i, l) in lines.iter().enumerate() {
        println!("{:>4}. rule {} at {}: {}", i + 1, l.rule, show_position(&l.position), l.term);
    }
    match &result {
        Normalization::Normal { term, .. } => println!("normal form: {} after {} steps", sig.show(term), lines.len()),
        Normalization::FuelExhausted { .. } => println!("FuelExhausted after {} steps", lines.len()),
        Normalization::LoopFound { from, position, .. } => println!(
            "LoopFound: the last term contains term {from} at {}",
            show_position(position)
        ),
    }
    Ok(0)
}

fn load_instance(path: &Path) -> Result<PrincipleInstance, Failure> {
    let text = read(path)?;
    PrincipleInstance::from_json(&text).map_err(|e| fail(EXIT_PARSE, anyhow!("{}: {e}", path.display())))
}

fn cmd_lab(a: LabArgs) -> Result<u8, Failure> {
    if a.random {
        let cfg = GenConfig::default().with_max_size(a.max_size.max(1));
        let report = match a.kind {
            LabKind::Stp => stp_campaign(a.seed, a.count, &cfg),
            LabKind::Gl => gl_campaign(a.seed, a.count, &cfg),
            LabKind::Mbs => mbs_campaign(a.seed, a.count, &cfg),
            LabKind::Bi => bar_campaign(a.seed, a.count, &cfg),
            LabKind::Lemma34 => lemma34_campaign(a.seed, a.count),
            LabKind::Lemma44 => lemma44_campaign(a.seed, a.count, &cfg),
        };
        print_campaign(&report, a.json);
        return Ok(if report.all_passed() { 0 } else { EXIT_SOUNDNESS });
    }
    let path = a.path.as_deref().expect("clap requires a path without --random");
    let inst = load_instance(path)?;
    let sound = match a.kind {
        LabKind::Stp => {
            let r = stp_check(&inst).map_err(|e| fail(EXIT_PARSE, e))?;
            if a.json {
                print_json(&r);
            } else {
                println!("decomposition: {} pairs, {} violations", r.decomposition.pairs_checked, r.decomposition.violations.len());
                for v in &r.decomposition.violations {
                    println!("  law ({:?}) fails at x = {}, y = {}{}", v.law, v.x, v.y, v.u.as_ref().map(|u| format!(", u = {u}")).unwrap_or_default());
                }
                println!("A = {{{}}}", r.a_set.join(", "));
                for f in &r.ewf_a_failures {
                    println!("  descent inside A from {}: {}", f.x, f.chain.join(" ≻₀ "));
                }
                println!("verdict: {}", verdict_text(r.verdict()));
                if !r.non_wf.is_empty() {
                    println!("not well-founded: {}", r.non_wf.join(", "));
                }
            }
            r.sound()
        }
        LabKind::Gl => {
            let r = gl_check(&inst).map_err(|e| fail(EXIT_PARSE, e))?;
            if a.json {
                print_json(&r);
            } else {
                println!("uncovered pairs: {}", r.uncovered.len());
                for (x, y) in &r.uncovered {
                    println!("  {x} ≻ {y}");
                }
                println!("sub acyclic: {}", r.sub_acyclic);
                for f in &r.inaccessible {
                    println!("  not accessible in A: {} ({})", f.x, f.chain.join(" ≫ "));
                }
                let conclusion = match r.conclusion {
                    Some(true) => "every element is well-founded",
                    Some(false) => "FALSIFIED: some element is not well-founded",
                    None => "hypotheses fail, nothing concluded",
                };
                println!("verdict: {conclusion}");
                println!("induced decomposition check: {}", verdict_text(r.stp.verdict()));
                if r.discrepancy() {
                    println!("DISCREPANCY: hypotheses hold but the induced check does not pass");
                }
            }
            r.sound()
        }
        LabKind::Mbs => {
            let len = a.len.unwrap_or(8);
            let r = minimal_bad_sequence(&inst, len).map_err(|e| fail(EXIT_PARSE, e))?;
            if a.json {
                print_json(&r);
            }
            match &r {
                MinimalBad::NoBad => {
                    if !a.json {
                        println!("NoBad: no sequence descends forever");
                    }
                    inst.succ.is_acyclic()
                }
                MinimalBad::MinimalBad { prefix, verification } => {
                    if !a.json {
                        let shown: Vec<String> = prefix.iter().map(|&i| inst.label(i)).collect();
                        println!("MinimalBad: {}, …", shown.join(", "));
                        println!(
                            "verification: extends to a bad sequence {}, {} smaller alternatives checked, {} extend",
                            verification.extends_to_bad,
                            verification.alternatives_checked,
                            verification.violations.len()
                        );
                    }
                    verification.passed()
                }
            }
        }
        LabKind::Bi => {
            let len = a.len.unwrap_or((inst.len() + 1).min(8));
            let r = bar_induction_check(&inst, len);
            if a.json {
                print_json(&r);
            } else {
                println!("premise 1: {}", r.premise1);
                println!(
                    "premise 2: {}{}",
                    r.premise2,
                    r.premise2_witness.as_ref().map(|w| format!(" (witness {w})")).unwrap_or_default()
                );
                println!(
                    "premise 3: {}{}",
                    r.premise3,
                    r.premise3_witness.as_ref().map(|w| format!(" (witness {w:?})")).unwrap_or_default()
                );
                println!("termination principle premise: {}", r.tp_premise);
                match r.derived {
                    Some(d) => println!("P(⟨⟩) derived: {d}"),
                    None => println!("P(⟨⟩) not derived: a premise fails"),
                }
            }
            r.sound()
        }
        LabKind::Lemma34 => {
            let cap = a.len.unwrap_or(4);
            let c = check_on_instance(&inst, cap);
            if a.json {
                print_json(&c);
            } else {
                println!(
                    "lengths {}, diagonal {}, lex transfers {}, end games {}: {} violations",
                    c.lengths,
                    c.diagonal,
                    c.lex_transfers,
                    c.end_games,
                    c.violations.len()
                );
                for v in c.violations.iter().take(10) {
                    println!("  {v}");
                }
            }
            c.passed()
        }
        LabKind::Lemma44 => {
            let len = a.len.unwrap_or(4);
            let r = lemma44_check(&inst, len);
            if a.json {
                print_json(&r);
            } else {
                println!("{} sequences of total length ≤ {len}", r.tested);
                println!("MIN premise: {}{}", r.tp_premise, witness(&r.tp_witness));
                println!("eMIN premise: {}{}", r.etp_premise, witness(&r.etp_witness));
                println!("disagreements: {}, adapter failures: {}", r.disagreements.len(), r.adapter_failures.len());
            }
            r.passed()
        }
    };
    Ok(if sound { 0 } else { EXIT_SOUNDNESS })
}

fn witness(w: &Option<Lasso<usize>>) -> String {
    w.as_ref().map(|w| format!(" (fails at {w})")).unwrap_or_default()
}

fn verdict_text(v: StpVerdict) -> &'static str {
    match v {
        StpVerdict::Pass => "pass, every element is well-founded",
        StpVerdict::HypothesesFail => "hypotheses fail, nothing concluded",
        StpVerdict::Falsified => "FALSIFIED: hypotheses hold but some element is not well-founded",
    }
}

fn print_campaign(r: &CampaignReport, json: bool) {
    if json {
        print_json(r);
        return;
    }
    let stats: Vec<String> = r.stats.iter().map(|(k, v)| format!("{k} {v}")).collect();
    println!("{}: {}/{} pass (seed {})", r.kind, r.passed, r.count, r.seed);
    if !stats.is_empty() {
        println!("  {}", stats.join(", "));
    }
    for f in r.failures.iter().take(5) {
        println!("  trial {} failed: {}", f.index, f.detail);
    }
}

fn cmd_phi(a: PhiArgs) -> Result<u8, Failure> {
    let alpha: Lasso<usize> = a
        .alpha
        .parse()
        .map_err(|e| fail(EXIT_PARSE, anyhow!("--alpha {:?}: {e}", a.alpha)))?;
    let f = realizer_by_name(&a.realizer)
        .ok_or_else(|| fail(EXIT_PARSE, anyhow!("unknown realizer {:?}: use scan, consult or constant", a.realizer)))?;
    let budget = PhiBudget {
        max_depth: a.budget,
        max_probes: a.probes,
    };
    let seq = alpha.to_sequence();
    let out = phi(&PhiEnv::nat(), f.as_ref(), &seq, budget);
    if a.json {
        print_json(&out);
    } else {
        match &out.result {
            PhiResult::Index { index } => {
                println!("Index {index}");
                let (x, y) = (alpha.get(*index), alpha.get(index + 1));
                let holds = out.assertion == Some(true);
                println!(
                    "assertion: α_{index} = {x} ⊁ α_{} = {y} {}",
                    index + 1,
                    if holds { "holds" } else { "VIOLATED (the realizer broke its contract)" }
                );
            }
            PhiResult::BudgetExceeded { abort } => println!("BudgetExceeded: {abort}"),
        }
        println!("trace ({} frames, replay {}):", out.trace.len(), if replay_trace(&out.trace).is_ok() { "ok" } else { "FAILED" });
        for (i, fr) in out.trace.iter().enumerate() {
            let origin = match (fr.parent, fr.spliced_at, fr.y) {
                (Some(p), Some(n), Some(y)) => format!(" spliced from #{p} at n = {n}, y = {y}"),
                _ => String::new(),
            };
            let result = fr.f_result.map(|m| format!(" → {m}")).unwrap_or_else(|| " → (cut off)".into());
            let shown: Vec<String> = fr.alpha.iter().map(|v| v.to_string()).collect();
            println!("  #{i} depth {}{origin}: α = {}, …{result}", fr.depth, shown.join(","));
        }
    }
    Ok(match out.result {
        PhiResult::Index { .. } => 0,
        PhiResult::BudgetExceeded { .. } => EXIT_PHI_BUDGET,
    })
}

fn cmd_export(a: ExportArgs) -> Result<u8, Failure> {
    let trs = load_trs(&a.path)?;
    let cfg = SearchConfig {
        status: StatusMode::Auto,
        budget: a.budget,
    };
    let prec = match orient_trs(trs.signature(), trs.rules(), &cfg) {
        Ok(Some((prec, _))) => prec,
        Ok(None) => return Err(fail(EXIT_MAYBE, anyhow!("no orientation found, nothing to export"))),
        Err(OrientError::BudgetExceeded { budget }) => {
            return Err(fail(EXIT_BUDGET, anyhow!("search budget of {budget} exceeded")))
        }
        Err(e) => return Err(fail(EXIT_PARSE, e)),
    };
    let inst = RpoInstance::new(trs.signature().clone(), prec);
    let exported = PrincipleInstance::from_rpo(&inst, a.depth).map_err(|e| fail(EXIT_PARSE, e))?;
    let json = serde_json::to_string_pretty(&exported.to_doc()).expect("instances serialize");
    match &a.out {
        Some(out) => std::fs::write(out, json + "\n")
            .with_context(|| format!("cannot write {}", out.display()))
            .map_err(|e| fail(EXIT_PARSE, e))?,
        None => println!("{json}"),
    }
    Ok(0)
}
