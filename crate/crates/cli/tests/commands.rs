//! The `extrucat` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn extrucat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extrucat"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const WRONG_ROW: &str = r#"id: wrong
question: What is the production (batch size) of a specific extruder model?
---
PREFIX : <http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/Extruder01#>
PREFIX om: <http://www.ontology-of-units-of-measure.org/resource/om-2/>
SELECT ?value WHERE {
    :E01.batchSizeMeasure om:hasNumericalValue ?value .
}
--- expected
[{"value": 499}]
"#;

#[test]
fn bundled_questions_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let out = extrucat(&["cq-suite"], tmp.path());
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("PASS CQ 1e"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn empty_directory_passes_with_a_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let out = extrucat(&["cq-suite", "--dir", "."], tmp.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("0 questions, 0 failed"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no .cq files"));
}

#[test]
fn wrong_expected_row_fails_with_a_diff() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("wrong.cq"), WRONG_ROW).unwrap();
    let out = extrucat(&["cq-suite", "--dir", "."], tmp.path());
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(1), "{text}");
    assert!(text.contains("FAIL CQ wrong"), "{text}");
    assert!(
        text.lines()
            .any(|l| l.trim_start().starts_with("- ") && l.contains("499")),
        "{text}"
    );
    assert!(
        text.lines()
            .any(|l| l.trim_start().starts_with("+ ") && l.contains("500")),
        "{text}"
    );
    assert!(text.contains("1 questions, 1 failed"), "{text}");
}

#[test]
fn malformed_file_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("bad.cq"),
        "id: bad\nquestion: ?\nSELECT * WHERE { ?s ?p ?o }\n",
    )
    .unwrap();
    let out = extrucat(&["cq-suite", "--dir", "."], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cq"));
}

#[test]
fn seed_load_and_export_share_a_store() {
    let tmp = tempfile::tempdir().unwrap();
    let out = extrucat(&["seed", "--data-dir", "var", "demo"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("seeded 3 extruders"));

    std::fs::write(
        tmp.path().join("extra.ttl"),
        "<http://example.org/a> <http://example.org/p> \"x\" .\n",
    )
    .unwrap();
    let out = extrucat(&["load", "--data-dir", "var", "extra.ttl"], tmp.path());
    assert!(stdout(&out).starts_with("loaded 1 triples"), "{}", stdout(&out));

    let out = extrucat(
        &["export-snapshot", "--data-dir", "var", "--out", "dump.ttl"],
        tmp.path(),
    );
    assert!(out.status.success());
    let dump = std::fs::read_to_string(tmp.path().join("dump.ttl")).unwrap();
    assert!(dump.contains("Blowmatic 1300") && dump.contains("http://example.org/a"));

    // The persisted store answers the questions too.
    let out = extrucat(&["cq-suite", "--data-dir", "var"], tmp.path());
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn missing_turtle_file_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let out = extrucat(&["load", "--data-dir", "var", "nope.ttl"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.ttl"));
}

#[test]
fn bench_reports_every_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let out = extrucat(&["bench", "--runs", "2", "--extruders", "8"], tmp.path());
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    for name in [
        "catalogue loading",
        "extruder insertion",
        "solutions loading",
        "CAD import",
    ] {
        assert!(text.contains(name), "{text}");
    }
}
