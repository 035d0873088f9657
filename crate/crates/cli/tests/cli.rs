use std::path::PathBuf;
use std::process::{Command, Output};

use timcomp::report::MethodStatus;
use timcomp::Rational;
use timcomp_cli::{DemoDocument, EnumeratedTopology, ReportDocument, VerifyDocument};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timcomp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("timcomp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analyze_reports_the_interval() {
    let o = run(&["analyze", &fixture("fig5.topo")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("summary: 2/5 <= d_sym <= 1/2"), "{}", stdout(&o));
    let o = run(&["analyze", &fixture("wyner5.topo")]);
    assert!(stdout(&o).contains("summary: d_sym = 2/3 (tight)"));
    let o = run(&["analyze", &fixture("triangular4.topo")]);
    assert!(stdout(&o).contains("summary: d_sym = 1/4 (tight)"));
}

#[test]
fn analyze_json_round_trips() {
    let o = run(&["analyze", "--json", &fixture("fig5.topo")]);
    assert_eq!(o.status.code(), Some(0));
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    let again: ReportDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(doc, again);
    let raw: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(raw["summary"]["best_outer"], "1/2");
    for m in raw["methods"].as_array().unwrap() {
        if let Some(v) = m["value"].as_str() {
            v.parse::<Rational>().unwrap();
        }
    }
    let best = doc.methods.iter().filter(|e| !e.method.is_outer()).filter_map(|e| e.value).max().unwrap();
    assert_eq!(best, doc.summary.best_achievable);
    assert_eq!(doc.topology.rows.len(), 6);
}

#[test]
fn method_selection_and_override() {
    let o = run(&["analyze", "--json", "--methods", "generator,compound", &fixture("fig5.topo")]);
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.methods.len(), 2);
    assert_eq!(doc.summary.best_outer, Rational::new(1, 2));
    let o = run(&["analyze", "--methods", "hamiltonian", "--max-K-override", "3", &fixture("fig5.topo")]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["analyze", "--json", "--methods", "hamiltonian", "--max-K-override", "6", &fixture("fig5.topo")]);
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.methods[0].status, MethodStatus::Computed);
}

#[test]
fn input_errors_exit_with_two() {
    let bad = temp_file("bad.topo", "3\n101\n");
    assert_eq!(run(&["analyze", &bad]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/nonexistent/x.topo"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--methods", "simplex", &fixture("fig5.topo")]).status.code(), Some(2));
    assert_eq!(run(&["demo", "fig6"]).status.code(), Some(2));
    assert_eq!(run(&["demo", "wyner:x"]).status.code(), Some(2));
}

#[test]
fn demos() {
    let o = run(&["demo", "--json", "reg53"]);
    assert_eq!(o.status.code(), Some(0));
    let d: DemoDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(d.report.summary.best_achievable, Rational::new(1, 2));
    assert_eq!(d.report.value(timcomp::Method::Compound), Some(Rational::new(5, 8)));
    assert!(d.checks.iter().any(|c| c.quantity == "regular scheme" && c.matches));
    let o = run(&["demo", "ex9"]);
    assert!(stdout(&o).contains("d_sym = 1/4 (tight)"));
    let o = run(&["demo", "--json", "ex4-repetition"]);
    let d: DemoDocument = serde_json::from_slice(&o.stdout).unwrap();
    let decode = d.decode.unwrap();
    assert!(decode.ok && decode.rounds >= 2);
    for name in ["fig5", "ex7", "wyner:4", "triangular:5"] {
        let o = run(&["demo", "--json", name]);
        let d: DemoDocument = serde_json::from_slice(&o.stdout).unwrap();
        assert!(d.checks.iter().all(|c| c.matches), "{name}: {:?}", d.checks);
    }
}

#[test]
fn enumeration() {
    let o = run(&["enumerate", "1"]);
    assert!(stdout(&o).contains("d_sym = 1 (tight)"));
    assert!(stdout(&o).contains("1 non-isomorphic topologies"));
    let o = run(&["enumerate", "--json", "2"]);
    let items: Vec<EnumeratedTopology> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(items.len(), 3);
    assert!(items.iter().all(|i| i.report.as_ref().unwrap().summary.tight));
    let o = run(&["enumerate", "--json", "--check-orthogonal-optimal", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let items: Vec<EnumeratedTopology> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(items.len(), 17);
    assert!(items.iter().all(|i| i.orthogonal_violation == Some(false)));
    let values: Vec<Rational> = items.iter().map(|i| i.report.as_ref().unwrap().summary.best_outer).collect();
    assert!(values.contains(&Rational::new(2, 3)) && values.contains(&Rational::new(1, 2)));
    assert_eq!(run(&["enumerate", "6"]).status.code(), Some(3));
}

#[test]
fn verify_fixture_and_failures() {
    let o = run(&["verify", &fixture("reg53.topo"), &fixture("ex4_repetition.json"), "--seed", "7", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: VerifyDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc.verified && doc.combinatorial.rounds >= 2);
    assert_eq!((doc.seed, doc.trials), (7, 10));

    let clash = temp_file(
        "clash.json",
        r#"{"n":1,"coherence":1,"claimed_dof":"1","transmissions":[{"tx":1,"msg":1,"instance":1,"vec":1},{"tx":2,"msg":2,"instance":1,"vec":1}]}"#,
    );
    let full2 = temp_file("full2.topo", "2\n11\n11\n");
    let o = run(&["verify", &full2, &clash]);
    assert_eq!(o.status.code(), Some(1));
    let doc: VerifyDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!doc.verified && !doc.numeric);

    let garbage = temp_file("garbage.json", "{\"n\": }");
    assert_eq!(run(&["verify", &full2, &garbage]).status.code(), Some(2));
    assert_eq!(run(&["verify", &full2, &clash, "--trials", "0"]).status.code(), Some(2));
}
