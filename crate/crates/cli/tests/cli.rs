use std::path::PathBuf;
use std::process::{Command, Output};

use paracontact_cli::{load, parse_manifold, print_manifold};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paracontact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, Option<i32>) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = bin(&full);
    (serde_json::from_slice(&o.stdout).expect("json output"), o.status.code())
}

fn derived<'a>(doc: &'a Value, name: &str) -> Option<&'a str> {
    doc["derived"].as_array()?.iter().find(|d| d["name"] == name)?["value"].as_str()
}

fn manifold(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../manifolds")
        .join(name);
    root.to_str().unwrap().to_string()
}

fn temp_file(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("paracontact-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn curvature_of_the_chart_example() {
    let o = bin(&["curvature", "builtin:example_5_2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("  r = -18*z^4\n"));
    let (doc, _) = json(&["curvature", "builtin:flat_para_cosymplectic"]);
    assert_eq!(derived(&doc, "r"), Some("0"));
    let (doc, _) = json(&["curvature", "builtin:example_5_1?u=1"]);
    assert_eq!(derived(&doc, "r"), Some("-6"));
}

#[test]
fn soliton_verify_on_the_frame_example() {
    let o = bin(&[
        "soliton",
        "verify",
        "builtin:example_5_1?u=0",
        "--Z=xi",
        "--delta=-2",
        "--lambda=-2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (doc, code) = json(&[
        "soliton",
        "verify",
        "builtin:example_5_1?u=0",
        "--Z=xi",
        "--delta=-2",
        "--lambda=-2",
    ]);
    assert_eq!(code, Some(0));
    assert_eq!(doc["checks"][0]["status"], "pass");
    assert_eq!(derived(&doc, "classification"), Some("shrinking"));

    let (doc, code) = json(&[
        "soliton",
        "verify",
        "builtin:example_5_1?u=0",
        "--Z",
        "[1, 0, 0]",
        "--lambda",
        "1",
    ]);
    assert_eq!(code, Some(1));
    assert_eq!(doc["summary"]["status"], "fail");
}

#[test]
fn solve_lambda_recovers_r() {
    let (doc, code) = json(&[
        "soliton",
        "solve-lambda",
        "builtin:example_5_1",
        "--Z",
        "xi",
        "--delta",
        "-2",
    ]);
    assert_eq!(code, Some(0));
    assert_eq!(derived(&doc, "lambda"), derived(&doc, "r"));
    assert_eq!(derived(&doc, "lambda"), Some("-4*u - 2"));
}

#[test]
fn structure_reports() {
    let (doc, code) = json(&["structure", "builtin:flat_para_cosymplectic"]);
    assert_eq!(code, Some(0));
    let class = &doc["tables"][0]["entries"];
    let flag = |k: &str| class.as_array().unwrap().iter().find(|e| e["key"] == k).unwrap()["value"].clone();
    assert_eq!(flag("para_cosymplectic"), "yes");
    assert_eq!(flag("para_sasakian"), "no");

    let (doc, code) = json(&["structure", "builtin:example_5_2"]);
    assert_eq!(code, Some(1));
    let axioms = &doc["checks"][0];
    assert_eq!(axioms["id"], "axioms");
    assert_eq!(axioms["status"], "fail");
    let violated: Vec<_> = axioms["residuals"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["zero"] == false)
        .collect();
    assert_eq!(violated.len(), 2);
    assert!(doc["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().starts_with("axiom violated")));

    let (doc, _) = json(&["structure", "builtin:example_5_1"]);
    assert_eq!(derived(&doc, "k"), Some("-1"));
    assert_eq!(derived(&doc, "mu"), Some("indeterminate (h = 0)"));
}

#[test]
fn identity_runs() {
    let o = bin(&["identity", "all", &manifold("frame_example.manifold")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for id in ["L1a", "T2", "T3", "T4", "T5"] {
        assert!(text.contains(&format!("[pass] {id}\n")), "{id} in\n{text}");
    }
    assert!(text.contains("warning: T9: hypothesis not satisfied"));

    let (doc, code) = json(&["identity", "T9", &manifold("flat_euler.manifold")]);
    assert_eq!(code, Some(0));
    assert_eq!(doc["checks"][1]["id"], "T9");
    assert_eq!(doc["checks"][1]["status"], "pass");

    let (doc, code) = json(&["identity", "T6", &manifold("flat_euler.manifold"), "--Z", "grad:u"]);
    assert_eq!(code, Some(0));
    assert_eq!(doc["checks"][1]["status"], "hypothesis-not-satisfied");

    // A failing soliton equation stops before the identities.
    let (doc, code) = json(&["identity", "all", &manifold("flat_euler.manifold"), "--lambda", "1"]);
    assert_eq!(code, Some(1));
    assert_eq!(doc["checks"].as_array().unwrap().len(), 1);
}

#[test]
fn undeclared_flag_symbols_become_constants() {
    let (doc, code) = json(&[
        "soliton",
        "verify",
        "builtin:flat_para_cosymplectic",
        "--u",
        "(x^2 - y^2 + z^2)/2",
        "--lambda=-d",
        "--delta",
        "d",
    ]);
    assert_eq!(code, Some(0));
    assert_eq!(doc["warnings"][0], "`d` was not declared; treating it as a constant");
    assert_eq!(doc["checks"][1]["id"], "gradient_soliton");
}

#[test]
fn reports_are_deterministic() {
    let runs: &[&[&str]] = &[
        &["curvature", "builtin:example_5_2"],
        &["--format", "json", "structure", "builtin:example_5_1"],
        &[
            "identity",
            "all",
            "builtin:example_5_1?u=0",
            "--Z",
            "xi",
            "--lambda",
            "-2",
            "--delta",
            "-2",
        ],
        &["soliton", "verify", "manifolds/warped_general.manifold"],
    ];
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    for args in runs {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_paracontact"))
                .current_dir(&root)
                .args(*args)
                .output()
                .unwrap()
                .stdout
        };
        let first = run();
        assert!(!first.is_empty(), "{args:?}");
        assert_eq!(first, run(), "{args:?}");
    }
}

#[test]
fn print_round_trips_files_and_builtins() {
    for input in [
        manifold("flat_euler.manifold"),
        manifold("frame_example.manifold"),
        manifold("warped_general.manifold"),
        "builtin:example_5_1".to_string(),
        "builtin:example_5_1?u=0".to_string(),
        "builtin:example_5_2".to_string(),
        "builtin:flat_para_cosymplectic".to_string(),
    ] {
        let m = load(&input).unwrap();
        let text = print_manifold(&m);
        let again = parse_manifold(&text).unwrap_or_else(|e| panic!("{input}: {e}\n{text}"));
        assert_eq!(again.model.metric(), m.model.metric(), "{input}");
        assert_eq!(
            again.model.structure_functions(),
            m.model.structure_functions(),
            "{input}"
        );
        assert_eq!(
            again.structure.as_ref().map(|s| s.phi()),
            m.structure.as_ref().map(|s| s.phi()),
            "{input}"
        );
        assert_eq!(again.soliton, m.soliton, "{input}");
        assert_eq!(print_manifold(&again), text, "{input}");
    }
    // The printed builtin gives the same curvature report.
    let o = bin(&["print", "builtin:example_5_1?u=0"]);
    let path = temp_file("frame.manifold", &stdout(&o));
    let a = json(&["curvature", "builtin:example_5_1?u=0"]).0;
    let b = json(&["curvature", &path]).0;
    assert_eq!(a["tables"], b["tables"]);
    assert_eq!(a["derived"], b["derived"]);
}

#[test]
fn load_errors_exit_with_two() {
    let good = std::fs::read_to_string(manifold("flat_euler.manifold")).unwrap();

    let asym = temp_file("asym.manifold", &good.replace("0, -1, 0\n", "0, -1, 4\n"));
    let o = bin(&["curvature", &asym]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("[metric]"), "{err}");

    let syntax = temp_file("syntax.manifold", &good.replace("0, -1, 0\n", "0, -1 * , 0\n"));
    let o = bin(&["curvature", &syntax]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 12, column"), "{err}");

    let singular = temp_file(
        "singular.manifold",
        &good.replace("0, 0, 1\n\n[structure]", "0, 0, 0\n\n[structure]"),
    );
    let err = String::from_utf8(bin(&["curvature", &singular]).stderr).unwrap();
    assert!(err.contains("[metric]") && err.contains("determinant"), "{err}");

    assert_eq!(bin(&["curvature", "builtin:example_9_9"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bin(&["identity", "T42", "builtin:example_5_2", "--Z", "xi", "--lambda", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bin(&["soliton", "verify", "builtin:example_5_2"]).status.code(),
        Some(2)
    );
}

#[test]
fn reproduce_paper_passes_with_warnings() {
    let o = bin(&["reproduce-paper"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("warning: example_5_1 published connection table"));
    assert!(text.contains("warning: example_5_2 violates the axiom"));
    assert!(text.contains("warning: example_5_2 has h != 0"));
    assert!(text.ends_with("status: pass (13 passed, 0 vacuous, 0 failed)\n"));
}
