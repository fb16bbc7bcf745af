use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn atmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atmod")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn check_yale_reports_alive() {
    let o = atmod(&["check", &fixture("yale.at")]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["schema"], "atmod/1");
    assert_eq!(v["findings"][0]["formula"], "alive");
    assert_eq!(v["findings"][0]["witness"]["round"], 1);
    let ps =
        v["verdicts"].as_array().unwrap().iter().find(|r| r["postulate"] == "PS" && r["scope"] == "tease").unwrap();
    assert_eq!(ps["satisfied"], false);
    assert_eq!(ps["method"], "both");
    assert_eq!(ps["witnesses"][0], "alive");
    let pi =
        v["verdicts"].as_array().unwrap().iter().find(|r| r["postulate"] == "PI" && r["scope"] == "tease").unwrap();
    assert_eq!(pi["blockedBy"], "PS");
    assert_eq!(v["oracle"]["crosscheck"], "pass");
}

#[test]
fn check_empty_succeeds() {
    let o = atmod(&["check", &fixture("empty.at")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["findings"], serde_json::json!([]));
}

#[test]
fn requested_postulates_only() {
    let o = atmod(&["check", &fixture("empty.at"), "--postulates", "PX+"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verdicts"].as_array().unwrap().len(), 1);
    let o = atmod(&["check", &fixture("yale.at"), "--postulates", "PC,PX"]);
    assert_eq!(o.status.code(), Some(0));
    let o = atmod(&["check", &fixture("empty.at"), "--postulates", "PQ"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn query_coffee() {
    let o = atmod(&["query", &fixture("coffee.at"), "--kind", "box", "--expr", "sugar & salt => [drink] false"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["entailed"], true);
    let o = atmod(&["query", &fixture("coffee.at"), "--kind", "box", "--expr", "sugar => [drink] false"]);
    let v = json(&o);
    assert_eq!(v["entailed"], false);
    assert!(v["countermodel"]["worlds"].as_array().is_some());
    let o = atmod(&["query", &fixture("coffee.at"), "--kind", "diamond", "--expr", "sugar => [drink] false"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn query_plain_modal() {
    let f = fixture("shooting.at");
    let dep = atmod(&["query", &f, "--kind", "box", "--expr", "hasGun => [load] hasGun"]);
    assert_eq!(json(&dep)["entailed"], true);
    let pdl = atmod(&["query", &f, "--kind", "box", "--expr", "hasGun => [load] hasGun", "--pdl"]);
    assert_eq!(json(&pdl)["entailed"], false);
    let text = atmod(&["query", &f, "--kind", "classical", "--expr", "walking -> alive", "--format", "text"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("entailed: true"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.at");
    std::fs::write(&bad, "theory x {\n  fluents p;\n  actions a;\n  static { p & ; }\n}\n").unwrap();
    let o = atmod(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("4:"));
    let ill = dir.path().join("ill.at");
    std::fs::write(&ill, "theory x { fluents p; actions a; static { p & ~p; } }").unwrap();
    let o = atmod(&["check", ill.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = atmod(&["check", "/nonexistent.at"]);
    assert_eq!(o.status.code(), Some(2));
    let o = atmod(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resource_guard_exit_3() {
    let o = Command::new(env!("CARGO_BIN_EXE_atmod"))
        .args(["check", &fixture("yale.at")])
        .env("ATMOD_MAX_ATOMS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = atmod(&["crosscheck", &fixture("intline.at")]);
    assert_eq!(o.status.code(), Some(3));
    let o = atmod(&["check", &fixture("yale.at"), "--subset-cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical() {
    for f in ["yale.at", "blocked_inexec.at", "gun_precondition.at"] {
        for fmt in ["json", "text"] {
            let a = atmod(&["check", &fixture(f), "--format", fmt]);
            let b = atmod(&["check", &fixture(f), "--format", fmt]);
            assert_eq!(a.stdout, b.stdout);
        }
    }
}

#[test]
fn text_lists_repair_options_in_order() {
    let o = atmod(&["check", &fixture("yale_noexec.at"), "--format", "text"]);
    let s = String::from_utf8_lossy(&o.stdout);
    let add = s.find("option 1: AddInexecutability").unwrap();
    let dep = s.find("option 2: AddDependence").unwrap();
    let eff = s.find("option 3: WeakenEffect").unwrap();
    assert!(add < dep && dep < eff);
}

#[test]
fn emit_patched_previews_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = atmod(&["check", &fixture("yale.at"), "--emit-patched", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for f in &files {
        let t = atmod::parse_theory(&std::fs::read_to_string(f).unwrap()).unwrap();
        assert!(atmod::validate(&t).is_empty());
    }
    assert!(files.iter().any(|f| f.to_string_lossy().contains("WeakenExecutability")));
    // the source theory is untouched
    let again = atmod(&["check", &fixture("yale.at")]);
    assert_eq!(again.status.code(), Some(1));
}

#[test]
fn analyze_runs_one_search() {
    let o = atmod(&["analyze", &fixture("yale.at"), "--action", "tease", "--algorithm", "static"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["findings"][0]["formula"], "alive");
    let o = atmod(&["analyze", &fixture("coffee.at"), "--action", "drink", "--algorithm", "inexec"]);
    assert_eq!(json(&o)["findings"][0]["law"], "sugar & salt => [drink] false");
    let o = atmod(&["analyze", &fixture("coffee.at"), "--action", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = atmod(&["analyze", &fixture("yale.at"), "--action", "tease", "--newcons-base", "grow", "--format", "text"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("alive"));
}

#[test]
fn model_exports() {
    let o = atmod(&["model", &fixture("yale.at"), "--big"]);
    assert_eq!(json(&o)["worlds"].as_array().unwrap().len(), 6);
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("m.dot");
    let o = atmod(&["model", &fixture("yale.at"), "--pruned", "--dot", dot.to_str().unwrap()]);
    assert_eq!(json(&o)["worlds"].as_array().unwrap().len(), 4);
    assert!(std::fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn crosscheck_fixtures() {
    for f in ["yale.at", "coffee.at", "gun_precondition.at", "blocked_inexec.at"] {
        let o = atmod(&["crosscheck", &fixture(f), "--bound", "3"]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(json(&o)["oracle"]["crosscheck"], "pass");
    }
}

#[test]
fn in_process_runner() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code =
        atmod::cli::run(["atmod", "check", &fixture("gun_precondition.at"), "--format", "text"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().contains("impossible there"));
}
