use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use style_seam_cli::DATASET_ENV;

const BIN: &str = env!("CARGO_BIN_EXE_style-seam");
const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/mini");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove(DATASET_ENV).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_doc(dir: &Path, id: u64, paragraphs: &[&str], changes: &[u8]) {
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join(format!("problem-{id}.txt")), paragraphs.join("\n")).unwrap();
    let truth = serde_json::json!({ "authors": 2, "changes": changes });
    fs::write(dir.join(format!("truth-problem-{id}.json")), truth.to_string()).unwrap();
}

#[test]
fn stats_on_two_document_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("easy/train");
    write_doc(&dir, 1, &["Alpha one.", "Beta two?", "Gamma three!"], &[1, 0]);
    write_doc(&dir, 2, &["Delta.", "Epsilon."], &[1]);
    let out = tmp.path().join("out");
    let o = run(&["--dataset-root", p(tmp.path()), "--difficulty", "easy", "--split", "train", "stats", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "easy/train: docs 2, pairs 3, zeros 1, ones 2");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(json[0]["pairs"], 3);
    assert_eq!(json[0]["ones"], 2);
}

#[test]
fn missing_and_empty_directories_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["--dataset-root", p(&tmp.path().join("absent")), "--difficulty", "easy", "stats"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not exist"));

    fs::create_dir_all(tmp.path().join("easy/train")).unwrap();
    let o = run(&["--dataset-root", p(tmp.path()), "--difficulty", "easy", "--split", "train", "stats"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no problem-"));
}

#[test]
fn dataset_root_from_environment() {
    let o = Command::new(BIN)
        .args(["--difficulty", "easy", "--split", "validation", "stats"])
        .env(DATASET_ENV, FIXTURE)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("docs 8, pairs 16"));

    let o = run(&["--difficulty", "easy", "stats"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(DATASET_ENV));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let dir = data.join("simple/validation");
    write_doc(&dir, 1, &["One.", "Two."], &[0]);
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, format!("[dataset]\nroot = {:?}\neasy = \"simple\"\n", p(&data))).unwrap();

    let o = run(&["--config", p(&cfg), "--difficulty", "easy", "--split", "validation", "stats"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("docs 1, pairs 1"));

    let o = run(&["--config", p(&cfg), "--dataset-root", p(&tmp.path().join("nowhere")), "--difficulty", "easy", "stats"]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&cfg, "[train]\nunknown = 1\n").unwrap();
    let o = run(&["--config", p(&cfg), "stats"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn training_on_test_split_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["--dataset-root", FIXTURE, "--difficulty", "easy", "--split", "test", "train", "--out", p(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no labels"));
}

#[test]
fn invalid_flag_values_exit_2() {
    for args in [
        &["--strategy", "middle", "stats"][..],
        &["--difficulty", "extreme", "stats"],
        &["--budget", "1", "--dataset-root", FIXTURE, "stats"],
        &["ensemble", "--mode", "median", "a.jsonl", "--out", "x"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn three_paragraph_document_yields_two_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_doc(&data.join("easy/train"), 1, &["Formal prose here.", "Formal prose again.", "lol what?"], &[0, 1]);
    write_doc(&data.join("easy/train"), 2, &["Formal text.", "yeah cool?"], &[1]);
    write_doc(&data.join("easy/validation"), 7, &["Formal prose.", "More formal prose.", "cool stuff?"], &[0, 1]);
    let common = ["--dataset-root", p(&data), "--difficulty", "easy"];
    let model = tmp.path().join("model");
    let pred = tmp.path().join("pred");

    let mut args = common.to_vec();
    args.extend(["train", "--out", p(&model)]);
    assert!(run(&args).status.success());
    let mut args = common.to_vec();
    args.extend(["predict", "--model", p(&model), "--out", p(&pred)]);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));

    let solution = fs::read_to_string(pred.join("easy/solution-problem-7.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&solution).unwrap();
    assert_eq!(parsed["changes"].as_array().unwrap().len(), 2);
    let lines = fs::read_to_string(pred.join("easy/predictions.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 2);

    // Predictions feed the evaluator as written.
    let mut args = common.to_vec();
    args.extend(["evaluate", "--predictions", p(&pred)]);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("easy"));
}

#[test]
fn dimension_mismatch_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let model = tmp.path().join("model");
    let o = run(&["--dataset-root", FIXTURE, "--difficulty", "easy", "train", "--out", p(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let vocab = model.join("easy/vocabulary.json");
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&vocab).unwrap()).unwrap();
    json["terms"].as_array_mut().unwrap().pop();
    fs::write(&vocab, json.to_string()).unwrap();

    let o = run(&["--dataset-root", FIXTURE, "--difficulty", "easy", "predict", "--model", p(&model), "--out", p(&tmp.path().join("p"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("features"), "{}", stderr(&o));
}

#[test]
fn coverage_gap_lists_missing_ids() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = tmp.path().join("truth");
    write_doc(&truth, 1, &["a", "b", "c"], &[1, 0]);
    write_doc(&truth, 2, &["a", "b"], &[1]);
    let pred = tmp.path().join("pred");
    fs::create_dir_all(&pred).unwrap();
    fs::write(pred.join("solution-problem-1.json"), r#"{"changes": [1]}"#).unwrap();

    let o = run(&["--difficulty", "easy", "evaluate", "--predictions", p(&pred), "--truth", p(&truth)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("document 1: missing pairs [1]"), "{err}");
    assert!(err.contains("document 2: no prediction"), "{err}");
}

#[test]
fn gold_as_predictions_scores_one() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = Path::new(FIXTURE).join("easy/validation");
    let pred = tmp.path().join("pred");
    fs::create_dir_all(&pred).unwrap();
    for entry in fs::read_dir(&truth).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if let Some(rest) = name.strip_prefix("truth-") {
            let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(truth.join(&name)).unwrap()).unwrap();
            let changes = serde_json::json!({ "changes": json["changes"] });
            fs::write(pred.join(format!("solution-{rest}")), changes.to_string()).unwrap();
        }
    }
    let out = tmp.path().join("report");
    let o = run(&["--dataset-root", FIXTURE, "--difficulty", "easy", "evaluate", "--predictions", p(&pred), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["easy"]["macro_f1"], 1.0);
}

#[test]
fn random_baseline_is_seeded() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<String> = ["a", "b", "c"]
        .iter()
        .zip(["5000", "5000", "6"])
        .map(|(name, seed)| {
            let out = tmp.path().join(name);
            let o = run(&["--dataset-root", FIXTURE, "--difficulty", "easy", "--seed", seed, "random-baseline", "--out", p(&out)]);
            assert!(o.status.success(), "{}", stderr(&o));
            fs::read_to_string(out.join("easy/predictions.jsonl")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_ne!(runs[0], runs[2]);
    assert!(runs[0].lines().all(|l| l.contains(r#""source":"random""#)));
}

#[test]
fn three_copies_majority_reproduce_input_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("m.jsonl");
    fs::write(
        &file,
        "{\"doc_id\":1,\"pair_index\":0,\"score\":0.8,\"source\":\"m\"}\n{\"doc_id\":1,\"pair_index\":1,\"score\":0.1,\"source\":\"m\"}\n",
    )
    .unwrap();
    let out = tmp.path().join("ens");
    let f = p(&file);
    let o = run(&["ensemble", "--mode", "majority", f, f, f, "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(out.join("solution-problem-1.json")).unwrap(), r#"{"changes": [1, 0]}"#);
}

#[test]
fn ensemble_coverage_mismatch_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.jsonl");
    let b = tmp.path().join("b.jsonl");
    fs::write(&a, "{\"doc_id\":1,\"pair_index\":0,\"score\":0.8,\"source\":\"a\"}\n").unwrap();
    fs::write(&b, "{\"doc_id\":2,\"pair_index\":0,\"score\":0.8,\"source\":\"b\"}\n").unwrap();
    let o = run(&["ensemble", "--mode", "softmax_mean", p(&a), p(&b), "--out", p(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("coverage"));
}

#[test]
fn commands_leave_the_dataset_untouched() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_doc(&data.join("easy/train"), 1, &["Formal.", "casual?"], &[1]);
    write_doc(&data.join("easy/train"), 2, &["Formal.", "Formal."], &[0]);
    write_doc(&data.join("easy/validation"), 3, &["Formal.", "casual?"], &[1]);
    let listing = |d: &Path| {
        let mut names: Vec<_> = walk(d);
        names.sort();
        names
    };
    let before = listing(&data);
    let root = p(&data);
    let m = tmp.path().join("m");
    let q = tmp.path().join("q");
    assert!(run(&["--dataset-root", root, "--difficulty", "easy", "stats"]).status.success());
    assert!(run(&["--dataset-root", root, "--difficulty", "easy", "train", "--out", p(&m)]).status.success());
    assert!(run(&["--dataset-root", root, "--difficulty", "easy", "predict", "--model", p(&m), "--out", p(&q)]).status.success());
    assert_eq!(listing(&data), before);
}

fn walk(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push((path.display().to_string(), fs::read(&path).unwrap()));
        }
    }
    out
}
