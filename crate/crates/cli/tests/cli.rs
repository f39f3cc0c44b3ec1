use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn vprdf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vprdf"))
        .args(args)
        .env_remove("VPRDF_MODEL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Trains on the three fixture ontologies and returns the model path.
fn trained(dir: &TempDir) -> PathBuf {
    let model = dir.path().join("model.json");
    let o = vprdf(&[
        "train",
        s(&fixture("real_estate.json")),
        s(&fixture("real_estate_2.json")),
        s(&fixture("education.json")),
        "--out",
        s(&model),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    model
}

fn model_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn train_writes_counts() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let doc = model_json(&model);
    assert_eq!(doc["support"]["rich_tenant"]["finance"], 2);
    assert_eq!(doc["containment"]["rich_tenant"], 2);
    assert_eq!(doc["support"]["large_apartment"]["size"], 1);
    assert_eq!(doc["containment"].get("lives_in"), None);
}

#[test]
fn train_summary() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    let o = vprdf(&["train", s(&fixture("real_estate.json")), "--out", s(&model)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("ontologies: 1"), "{out}");
    assert!(out.contains("viewpoints: 2 (finance, size)"), "{out}");
}

#[test]
fn train_without_paths_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    let o = vprdf(&["train", "--out", s(&model)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!model.exists());
}

#[test]
fn duplicate_path_counts_twice_with_warning() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    let re = fixture("real_estate.json");
    let o = vprdf(&["train", s(&re), s(&re), "--out", s(&model)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("more than once"), "{}", stderr(&o));
    assert_eq!(model_json(&model)["containment"]["rich_tenant"], 2);
}

#[test]
fn train_error_codes() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    let invalid = dir.path().join("invalid.json");
    fs::write(
        &invalid,
        r#"{"format_version": "1", "domain": "d", "viewpoints": ["a", "a"]}"#,
    )
    .unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{ not json").unwrap();

    assert_eq!(
        vprdf(&["train", s(&invalid), "--out", s(&model)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        vprdf(&["train", s(&broken), "--out", s(&model)])
            .status
            .code(),
        Some(1)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        vprdf(&["train", s(&missing), "--out", s(&model)])
            .status
            .code(),
        Some(1)
    );
    let o = vprdf(&[
        "train",
        s(&fixture("real_estate.json")),
        "--theta",
        "1.5",
        "--out",
        s(&model),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!model.exists());
}

#[test]
fn convert_matches_golden_output() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let out = dir.path().join("out.nt");
    let o = vprdf(&[
        "convert",
        s(&fixture("use_cases.nt")),
        "--model",
        s(&model),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        fs::read_to_string(fixture("use_cases_vp.nt")).unwrap()
    );
    let report = stdout(&o);
    assert!(
        report
            .lines()
            .any(|l| l.starts_with("subject_linked ") && l.ends_with(" 1")),
        "{report}"
    );
    assert!(
        report.contains("unmatched labels (5): apartment3, constantine, is, john, lives_in"),
        "{report}"
    );
}

#[test]
fn convert_empty_input() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let input = dir.path().join("empty.nt");
    fs::write(&input, "").unwrap();
    let out = dir.path().join("out.nt");
    let o = vprdf(&["convert", s(&input), "--model", s(&model), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("total input") && l.ends_with(" 0")));
}

#[test]
fn convert_reports_bad_line_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let input = dir.path().join("bad.nt");
    fs::write(
        &input,
        "<http://ex.org/a> <http://ex.org/b> <http://ex.org/c> .\n\
         <http://ex.org/a> <http://ex.org/b> \"x\" .\n\
         <http://ex.org/a> <http://ex.org/b> <http://ex.org/c>\n",
    )
    .unwrap();
    let out = dir.path().join("out.nt");
    let o = vprdf(&["convert", s(&input), "--model", s(&model), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn model_flag_overrides_environment() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let out = dir.path().join("out.nt");
    let run = |env: &str, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_vprdf"));
        cmd.args(["predict", "rich_tenant"])
            .args(extra)
            .env("VPRDF_MODEL", env);
        cmd.output().unwrap()
    };
    let o = run(s(&model), &[]);
    assert_eq!(stdout(&o), "rich_tenant: finance 1.000\n");
    let o = run("/nonexistent/model.json", &["--model", s(&model)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run("/nonexistent/model.json", &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = vprdf(&["convert", s(&fixture("use_cases.nt")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2), "no model anywhere");
}

#[test]
fn emit_schema_under_custom_namespace() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let out = dir.path().join("out.nt");
    let o = vprdf(&[
        "convert",
        s(&fixture("use_cases.nt")),
        "--model",
        s(&model),
        "--out",
        s(&out),
        "--emit-schema",
        "--reified",
        "--namespace",
        "http://example.org/vp#",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains(
        "<http://example.org/vp#Viewpoint> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://www.w3.org/2000/01/rdf-schema#Resource> .\n"
    ));
    assert!(text.contains(
        "<http://example.org/vp#Object_Statement> <http://www.w3.org/2000/01/rdf-schema#range> <http://example.org/vp#Viewpoint> .\n"
    ));
    let q = vprdf(&[
        "query",
        s(&out),
        "--viewpoint",
        "finance",
        "--namespace",
        "http://example.org/vp#",
    ]);
    assert_eq!(stdout(&q).lines().count(), 3);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"model": "{}", "theta": 1.0, "min_support": 2}}"#,
            s(&model)
        ),
    )
    .unwrap();
    // min_support 2 from the file drops single-ontology labels
    let o = vprdf(&["--config", s(&cfg), "predict", "rich_tenant", "professor"]);
    assert_eq!(
        stdout(&o),
        "rich_tenant: finance 1.000\nprofessor: (none)\n"
    );
    let o = vprdf(&[
        "--config",
        s(&cfg),
        "predict",
        "professor",
        "--min-support",
        "1",
    ]);
    assert_eq!(stdout(&o), "professor: university_education 1.000\n");

    fs::write(&cfg, r#"{"colour": "red"}"#).unwrap();
    assert_eq!(
        vprdf(&["--config", s(&cfg), "predict", "x"]).status.code(),
        Some(1)
    );
}

#[test]
fn predict_lines_in_input_order() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let o = vprdf(&[
        "predict",
        "--model",
        s(&model),
        "Rich-Tenant",
        "unknown",
        "Apartment_N1",
        "rent",
    ]);
    assert_eq!(
        stdout(&o),
        "rich_tenant: finance 1.000\nunknown: (none)\napartment_n1: finance 1.000, size 1.000\nrent: finance 1.000\n"
    );
    let o = vprdf(&[
        "predict",
        "--model",
        s(&model),
        "--predicate",
        "professor",
        "rent",
    ]);
    assert_eq!(stdout(&o), "professor: (none)\nrent: finance 1.000\n");
}

#[test]
fn query_scopes() {
    let golden = fixture("use_cases_vp.nt");
    let o = vprdf(&["query", s(&golden), "--viewpoint", "finance"]);
    assert_eq!(
        stdout(&o),
        "<http://ex.org/John> <http://ex.org/rent> <http://ex.org/apartment3> .\n\
         <http://ex.org/Rich_Tenant> <http://ex.org/lives_in> <http://ex.org/Constantine> .\n\
         <http://ex.org/Rich_Tenant> <http://ex.org/lives_in> <http://ex.org/Large_Apartment> .\n"
    );
    let o = vprdf(&["query", s(&golden), "--viewpoint", "history"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), ""));
    let o = vprdf(&["query", s(&golden), "--consensual"]);
    assert_eq!(stdout(&o), "");
    assert_eq!(vprdf(&["query", s(&golden)]).status.code(), Some(2));
    assert_eq!(
        vprdf(&["query", s(&golden), "--viewpoint", "size", "--consensual"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_perfect_gold() {
    let dir = TempDir::new().unwrap();
    let gold = dir.path().join("gold.json");
    fs::write(
        &gold,
        r#"{
  "<http://ex.org/John> <http://ex.org/is> <http://ex.org/Professor> .": ["university_education"],
  "<http://ex.org/John> <http://ex.org/rent> <http://ex.org/apartment3> .": ["finance"],
  "<http://ex.org/Rich_Tenant> <http://ex.org/lives_in> <http://ex.org/Constantine> .": ["finance"],
  "<http://ex.org/Rich_Tenant> <http://ex.org/lives_in> <http://ex.org/Large_Apartment> .": ["finance", "size"]
}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let o = vprdf(&[
        "eval",
        s(&fixture("use_cases_vp.nt")),
        s(&gold),
        "--report",
        s(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("precision 100.0%").count(), 5, "{out}");
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["pooled"]["precision"], 1.0);
    assert_eq!(doc["scores"][0]["scope"], "finance");

    let o = vprdf(&[
        "eval",
        s(&fixture("use_cases_vp.nt")),
        s(&gold),
        "--viewpoint",
        "Finance",
    ]);
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("finance "));
}

#[test]
fn eval_rejects_gold_for_unknown_triples() {
    let dir = TempDir::new().unwrap();
    let gold = dir.path().join("gold.json");
    fs::write(
        &gold,
        r#"{"<http://ex.org/a> <http://ex.org/b> <http://ex.org/c> .": []}"#,
    )
    .unwrap();
    let o = vprdf(&["eval", s(&fixture("use_cases_vp.nt")), s(&gold)]);
    assert_eq!(o.status.code(), Some(2));
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn synth_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = vprdf(&[
            "synth",
            "--out-dir",
            s(d),
            "--seed",
            "9",
            "--triples",
            "300",
            "--noise",
            "0.2",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let ca = dir_contents(&a);
    assert_eq!(ca, dir_contents(&b));
    let names: Vec<&str> = ca.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "gold.json",
            "graph.nt",
            "ontology_00.json",
            "ontology_01.json",
            "ontology_02.json",
            "ontology_03.json",
            "ontology_04.json"
        ]
    );
    let o = vprdf(&["synth", "--out-dir", s(&a), "--noise", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn noiseless_pipeline_scores_full_marks() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus");
    assert_eq!(
        vprdf(&["synth", "--out-dir", s(&corpus), "--seed", "5"])
            .status
            .code(),
        Some(0)
    );
    let mut train: Vec<String> = vec!["train".into()];
    for i in 0..5 {
        train.push(s(&corpus.join(format!("ontology_{i:02}.json"))).into());
    }
    let model = dir.path().join("m.json");
    train.extend(["--out".into(), s(&model).into()]);
    let args: Vec<&str> = train.iter().map(String::as_str).collect();
    assert_eq!(vprdf(&args).status.code(), Some(0));
    let vp = dir.path().join("vp.nt");
    let o = vprdf(&[
        "convert",
        s(&corpus.join("graph.nt")),
        "--model",
        s(&model),
        "--out",
        s(&vp),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = vprdf(&["eval", s(&vp), s(&corpus.join("gold.json"))]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5, "{out}");
    assert!(
        out.lines()
            .all(|l| l.contains("precision 100.0%") && l.contains("recall 100.0%")),
        "{out}"
    );
}
