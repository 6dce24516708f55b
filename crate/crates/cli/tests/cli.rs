use std::path::PathBuf;
use std::process::{Command, Output};

use tpkit::lab::{CampaignReport, PrincipleInstance, StpReport};
use tpkit::openrec::PhiOutcome;
use tpkit::rewriting::Trs;
use tpkit::rpo::Certificate;
use tpkit::syntax::parse_trs;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn tpkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpkit"))
        .args(args)
        .env_remove("TPKIT_SEARCH_BUDGET")
        .env_remove("TPKIT_FUEL")
        .env_remove("TPKIT_PHI_DEPTH")
        .output()
        .expect("the binary runs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = tpkit(args);
    (
        out.status.code().expect("exited normally"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn validates(cert: &Certificate, file: &str) -> bool {
    let trs = Trs::from_file(parse_trs(&std::fs::read_to_string(data(file)).unwrap()).unwrap()).unwrap();
    cert.validate(trs.signature(), trs.rules()).is_ok()
}

fn path(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

#[test]
fn check_ackermann_is_proven_with_lex_status() {
    let (code, out, _) = run(&["check", &path("ackermann.trs")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("YES"));
    assert!(out.contains("ack > s"));
    assert!(out.contains("ack lex"));
}

#[test]
fn check_json_certificate_verifies() {
    let (code, out, _) = run(&["check", &path("ackermann.trs"), "--json"]);
    assert_eq!(code, 0);
    let cert = Certificate::from_json(&out).unwrap();
    assert!(validates(&cert, "ackermann.trs"));
    assert_eq!(cert.oriented.len(), 3);
}

#[test]
fn check_writes_certificate_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let (code, stdout, _) = run(&["check", &path("swap.trs"), "--depth", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert!(!stdout.contains("sanity"));
    let cert = Certificate::from_json(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(validates(&cert, "swap.trs"));
}

#[test]
fn check_selfembed_is_maybe() {
    let (code, out, _) = run(&["check", &path("selfembed.trs")]);
    assert_eq!(code, 2);
    assert!(out.starts_with("MAYBE"));
}

#[test]
fn check_malformed_reports_position() {
    let (code, _, err) = run(&["check", &path("malformed.trs")]);
    assert_eq!(code, 1);
    assert!(err.contains("malformed.trs:3:8"), "{err}");
}

#[test]
fn check_missing_file_is_an_input_error() {
    let (code, _, err) = run(&["check", &path("no-such-file.trs")]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"));
}

#[test]
fn check_budget_exhaustion_exits_3() {
    let (code, out, _) = run(&["check", &path("ackermann.trs"), "--budget", "0"]);
    assert_eq!(code, 3, "{out}");
    assert!(out.starts_with("BUDGET"));
}

#[test]
fn check_budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_tpkit"))
        .args(["check", &path("ackermann.trs")])
        .env("TPKIT_SEARCH_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn trace_ackermann_reaches_three() {
    let (code, out, _) = run(&["trace", &path("ackermann.trs"), "ack(s(0),s(0))"]);
    assert_eq!(code, 0);
    let last_step = out.lines().rfind(|l| l.trim_start().starts_with(char::is_numeric)).unwrap();
    assert!(last_step.ends_with("s(s(s(0)))"), "{out}");
    assert!(out.contains("normal form: s(s(s(0)))"));
    assert!(out.contains(" at ε: "));
}

#[test]
fn trace_normal_form_is_empty() {
    let (code, out, _) = run(&["trace", &path("ackermann.trs"), "s(0)", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn trace_selfembed_runs_out_of_fuel() {
    let (code, out, _) = run(&["trace", &path("selfembed.trs"), "f(0)", "--fuel", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("FuelExhausted after 5 steps"), "{out}");
}

#[test]
fn trace_embedding_loop_check_stops_early() {
    let (code, out, _) = run(&["trace", &path("selfembed.trs"), "f(0)", "--loop-check", "embedding"]);
    assert_eq!(code, 0);
    assert!(out.contains("LoopFound"), "{out}");
}

#[test]
fn trace_bad_term_is_an_input_error() {
    let (code, _, err) = run(&["trace", &path("ackermann.trs"), "ack(0"]);
    assert_eq!(code, 1);
    assert!(err.contains("term:1:"), "{err}");
}

#[test]
fn lab_stp_campaign_seed_7() {
    let (code, out, _) = run(&["lab", "stp", "--random", "--seed", "7", "--count", "1000"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("stp: 1000/1000 pass (seed 7)"), "{out}");
}

#[test]
fn lab_campaigns_pass() {
    for kind in ["gl", "mbs", "bi", "lemma34", "lemma44"] {
        let (code, out, _) = run(&["lab", kind, "--random", "--seed", "3", "--count", "100"]);
        assert_eq!(code, 0, "{kind}: {out}");
        assert!(out.starts_with(&format!("{kind}: 100/100 pass")), "{out}");
    }
}

#[test]
fn lab_mbs_on_cycle() {
    let (code, out, _) = run(&["lab", "mbs", &path("cycle.json"), "--len", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("MinimalBad: a, b, a, b"), "{out}");
    assert!(out.contains("extends to a bad sequence true"));
}

#[test]
fn lab_checks_on_cycle() {
    for kind in ["stp", "gl", "bi", "lemma34", "lemma44"] {
        let (code, out, err) = run(&["lab", kind, &path("cycle.json"), "--len", "3"]);
        assert_eq!(code, 0, "{kind}: {out}{err}");
    }
    let (_, out, _) = run(&["lab", "stp", &path("cycle.json"), "--json"]);
    let report: StpReport = serde_json::from_str(&out).unwrap();
    assert_eq!(report.non_wf, vec!["a", "b", "c"]);
    assert!(!report.hypotheses_hold);
}

#[test]
fn lab_invalid_instance_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"carrier": ["a"], "succ": [], "sub": [["a", "a"]]}"#).unwrap();
    let (code, _, err) = run(&["lab", "mbs", bad.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");
    let (code, _, _) = run(&["lab", "stp", &path("ackermann.trs")]);
    assert_eq!(code, 1);
}

#[test]
fn export_then_gl_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ack.json");
    let (code, _, err) = run(&["export", &path("ackermann.trs"), "--depth", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let inst = PrincipleInstance::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(inst.len(), 13);
    let (code, text, _) = run(&["lab", "gl", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("verdict: every element is well-founded"), "{text}");
    assert!(!text.contains("DISCREPANCY"));
}

#[test]
fn export_unorientable_exits_2() {
    let (code, _, _) = run(&["export", &path("selfembed.trs")]);
    assert_eq!(code, 2);
}

#[test]
fn phi_scan_examples() {
    let (code, out, _) = run(&["phi", "--realizer", "scan", "--alpha", "5,4,3;7"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Index 2\n"));
    assert!(out.contains("holds"));
    let (code, out, _) = run(&["phi", "--alpha", ";0"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Index 0\n"));
}

#[test]
fn phi_budget_exhaustion_exits_4_with_trace() {
    let (code, out, _) = run(&["phi", "--realizer", "consult", "--alpha", "5,4,3;7", "--budget", "1"]);
    assert_eq!(code, 4);
    assert!(out.starts_with("BudgetExceeded"));
    assert!(out.contains("#1 depth 1"), "{out}");
    let (code, _, _) = run(&["phi", "--realizer", "consult", "--alpha", "5,4,3;7", "--budget", "2"]);
    assert_eq!(code, 0);
}

#[test]
fn phi_bad_input_exits_1() {
    assert_eq!(run(&["phi", "--alpha", "5,x"]).0, 1);
    assert_eq!(run(&["phi", "--alpha", "1;2", "--realizer", "oracle"]).0, 1);
}

#[test]
fn phi_broken_realizer_is_reported_not_fatal() {
    let (code, out, _) = run(&["phi", "--realizer", "constant", "--alpha", "1;0"]);
    assert_eq!(code, 0);
    assert!(out.contains("VIOLATED"), "{out}");
}

#[test]
fn json_output_is_byte_stable() {
    let cases: [&[&str]; 4] = [
        &["check", &path("ackermann.trs"), "--json"],
        &["lab", "stp", "--random", "--seed", "11", "--count", "50", "--json"],
        &["lab", "stp", &path("cycle.json"), "--json"],
        &["phi", "--realizer", "consult", "--alpha", "5,4,3;7", "--json"],
    ];
    for args in cases {
        let first = run(args).1;
        assert_eq!(first, run(args).1, "{args:?}");
    }
    let (_, out, _) = run(cases[0]);
    assert_eq!(Certificate::from_json(&out).unwrap().to_json() + "\n", out);
    let (_, out, _) = run(cases[1]);
    let report: CampaignReport = serde_json::from_str(&out).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", out);
    let (_, out, _) = run(cases[3]);
    let outcome: PhiOutcome = serde_json::from_str(&out).unwrap();
    assert_eq!(serde_json::to_string_pretty(&outcome).unwrap() + "\n", out);
}
