use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const KG3: &str = "\
Inception\tEntity\tNolan\tAttribute\tDirector
Inception\tEntity\tSciFi\tAttribute\tGenre
Interstellar\tEntity\tNolan\tAttribute\tDirector
Interstellar\tEntity\tSciFi\tAttribute\tGenre
Titanic\tEntity\tCameron\tAttribute\tDirector
Titanic\tEntity\tRomance\tAttribute\tGenre
";

const CORPUS: &str = r#"{"id":"a","turns":[{"speaker":"user","utterance":"Nolan, SciFi"},{"speaker":"bot","gold_intent":"Recommend","gold_items":["Inception"]}]}
{"id":"b","turns":[{"speaker":"user","utterance":"Cameron"},{"speaker":"bot","gold_intent":"Recommend","gold_items":["Titanic","Avatar"]}]}
"#;

fn crs(dir: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crs"))
        .current_dir(dir)
        .args(["eval", "--kg", "kg.tsv", "--corpus", "corpus.jsonl"])
        .args(extra)
        .output()
        .unwrap()
}

fn workspace(corpus: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("kg.tsv"), KG3).unwrap();
    fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    fs::write(dir.path().join("config.json"), r#"{"mode": "cautious"}"#).unwrap();
    dir
}

#[test]
fn writes_table_and_report() {
    let dir = workspace(CORPUS);
    let out = crs(
        dir.path(),
        &[
            "--config",
            "config.json",
            "--k",
            "1,2,3",
            "--seed",
            "7",
            "--out",
            "report.json",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("R@1(%)") && table.contains("Baseline"), "{table}");

    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["recall_at"]["1"], 100.0);
    assert_eq!(report["intent_accuracy"], 100.0);
    assert_eq!(report["counts"]["skipped_turns"], 1);
    assert_eq!(report["unresolved_items"], serde_json::json!(["Avatar"]));
    assert_eq!(report["baseline"]["recall_at"]["2"].as_f64().unwrap().round(), 67.0);
}

#[test]
fn corpus_errors_exit_nonzero() {
    let dir = workspace("{\"turns\": []}\n{\"turns\": [{\"speaker\": \"narrator\"}]}\n");
    let out = crs(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn bad_config_is_reported() {
    let dir = workspace(CORPUS);
    fs::write(dir.path().join("config.json"), r#"{"matching_threshold": 2}"#).unwrap();
    let out = crs(dir.path(), &["--config", "config.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OutOfRange"));
}
