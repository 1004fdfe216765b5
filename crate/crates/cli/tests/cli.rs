use std::path::{Path, PathBuf};
use std::process::Command;

use repostlab_cli::manifest::RunManifest;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn repostlab(dir: &Path, args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_repostlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("REPOSTLAB_CACHE")
        .output()
        .expect("binary runs");
    Out {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = repostlab(dir, args);
    assert_eq!(out.code, 0, "{args:?}\n{}", out.stderr);
    out.stdout
}

const MODELS: &str = r#"
[[experiment.models]]
name = "DT-ALL"
schema = "ALL"
family = "gbdt"
params = { max_depth = 3, n_estimators = 15 }

[[experiment.models]]
name = "DT-U"
schema = "U"
family = "gbdt"
params = { max_depth = 3, n_estimators = 15 }

[[experiment.models]]
name = "DT-M"
schema = "M"
family = "gbdt"
params = { max_depth = 3, n_estimators = 15 }
"#;

fn write_config(dir: &Path, world: &str, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    let text = format!("[world]\n{world}\n[lda]\ntrain_iters = 20\ninfer_iters = 10\n\n[dataset]\nseed = 3\n\n{extra}\n{MODELS}");
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_WORLD: &str = "n_users = 200\nn_hashtags = 3\nposts_per_hashtag = 25\nspan_days = 3.0\nseed = 11\n";

fn artifacts(path: &Path) -> Vec<(String, String)> {
    RunManifest::load(path).unwrap().artifacts.into_iter().collect()
}

/// synth → build-dataset → featurize ALL → split → train → eval in `dir`.
fn pipeline(dir: &Path, jobs: &str) -> String {
    let c = ["--config", "run.toml", "--jobs", jobs];
    let with = |args: &[&str]| ok(dir, &[&c[..], args].concat());
    with(&["synth", "--out", "world"]);
    with(&["build-dataset", "--corpus", "world", "--out", "ds"]);
    with(&["featurize", "--corpus", "world", "--dataset", "ds", "--out", "features.csv"]);
    with(&["split", "--dataset", "ds", "--out", "split.json"]);
    with(&["train", "--features", "features.csv", "--split", "split.json", "--out", "models", "--full"]);
    with(&["importance", "--model", "models/DT-ALL/full.json", "--out", "importance.json"]);
    with(&["eval", "--models", "models", "--features", "features.csv", "--split", "split.json", "--out", "eval", "--importance", "importance.json"])
}

#[test]
fn full_pipeline_reports_all_three_models_and_reruns_identically() {
    let runs: Vec<_> = ["1", "2"]
        .iter()
        .map(|jobs| {
            let tmp = tempfile::tempdir().unwrap();
            write_config(tmp.path(), SMALL_WORLD, "[split]\nrepeats = 3\n");
            let table = pipeline(tmp.path(), jobs);
            (tmp, table)
        })
        .collect();
    let (dir, table) = (&runs[0].0, &runs[0].1);
    for name in ["DT-ALL", "DT-U", "DT-M"] {
        assert!(table.contains(name), "{table}");
    }
    assert!(table.lines().any(|l| l.starts_with("mixed ")), "{table}");
    assert!(table.contains("DT-ALL vs DT-M"));
    assert!(table.contains("top features:"));

    let printed = ok(dir.path(), &["report", "--report", "eval/report.json"]);
    assert_eq!(&printed, table);

    for manifest in [
        "world/manifest.json",
        "ds/manifest.json",
        "features.csv.manifest.json",
        "split.json.manifest.json",
        "models/manifest.json",
        "importance.json.manifest.json",
        "eval/manifest.json",
    ] {
        let a = artifacts(&runs[0].0.path().join(manifest));
        let b = artifacts(&runs[1].0.path().join(manifest));
        assert!(!a.is_empty(), "{manifest}");
        assert_eq!(a, b, "{manifest}");
    }
    let m = RunManifest::load(&dir.path().join("models/manifest.json")).unwrap();
    assert_eq!(m.command, "train");
    assert_eq!(m.artifacts.len(), 3 * 4);
    assert!(m.inputs.contains_key("features.csv"));
    assert!(m.inputs.contains_key("run.toml"));
    assert_eq!(m.config.world.seed, 11);
}

#[test]
fn synth_writes_corpus_and_hashes_are_stable() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), SMALL_WORLD, "");
    ok(tmp.path(), &["--config", "run.toml", "synth", "--out", "a"]);
    ok(tmp.path(), &["--config", "run.toml", "synth", "--out", "b"]);
    for f in ["posts.jsonl", "users.jsonl", "manifest.json"] {
        assert!(tmp.path().join("a").join(f).is_file(), "{f}");
    }
    let a = artifacts(&tmp.path().join("a/manifest.json"));
    assert_eq!(a, artifacts(&tmp.path().join("b/manifest.json")));
    assert_eq!(a.len(), 2);
    ok(tmp.path(), &["--config", "run.toml", "--seed", "12", "synth", "--out", "c"]);
    assert_ne!(a, artifacts(&tmp.path().join("c/manifest.json")));
    assert_eq!(RunManifest::load(&tmp.path().join("c/manifest.json")).unwrap().seeds["world"], 12);
}

#[test]
fn config_errors_exit_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = repostlab(tmp.path(), &["--config", "missing/world.toml", "synth", "--out", "w"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("missing/world.toml"), "{}", out.stderr);
    assert!(!tmp.path().join("w").exists());

    std::fs::write(tmp.path().join("bad.toml"), "[world]\nn_users = 0\n").unwrap();
    assert_eq!(repostlab(tmp.path(), &["--config", "bad.toml", "synth", "--out", "w"]).code, 2);
    std::fs::write(tmp.path().join("typo.toml"), "[wrold]\nn_users = 10\n").unwrap();
    assert_eq!(repostlab(tmp.path(), &["--config", "typo.toml", "synth", "--out", "w"]).code, 2);
    assert_eq!(repostlab(tmp.path(), &["synth"]).code, 2);
    assert_eq!(repostlab(tmp.path(), &["--jobs", "0", "synth", "--out", "w"]).code, 2);
}

#[test]
fn featurize_emits_schema_columns_and_header_only_for_no_instances() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_config(dir, SMALL_WORLD, "");
    let c = ["--config", "run.toml"];
    ok(dir, &[&c[..], &["synth", "--out", "world"]].concat());
    ok(dir, &[&c[..], &["build-dataset", "--corpus", "world", "--out", "ds"]].concat());
    for (schema, width) in [("ALL", 303), ("U", 225), ("M", 78), ("U-P", 30), ("U-HA", 38), ("U-HM", 157)] {
        let out = format!("{schema}.csv");
        ok(dir, &[&c[..], &["featurize", "--corpus", "world", "--dataset", "ds", "--schema", schema, "--out", &out]].concat());
        let text = std::fs::read_to_string(dir.join(&out)).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        assert_eq!(header.len(), width + 3, "{schema}");
        assert_eq!(&header[width..], &["label", "hashtag", "instance_id"]);
        assert!(text.lines().count() > 1);
    }
    assert_eq!(repostlab(dir, &[&c[..], &["featurize", "--corpus", "world", "--dataset", "ds", "--schema", "X", "--out", "x.csv"]].concat()).code, 2);

    // No repost at all: the dataset is empty and the CSV is a bare header.
    let quiet = tempfile::tempdir().unwrap();
    let q = quiet.path();
    write_config(q, &format!("{SMALL_WORLD}[world.weights]\nbase = -60.0\n"), "");
    ok(q, &[&c[..], &["synth", "--out", "world"]].concat());
    ok(q, &[&c[..], &["build-dataset", "--corpus", "world", "--out", "ds"]].concat());
    ok(q, &[&c[..], &["featurize", "--corpus", "world", "--dataset", "ds", "--schema", "M", "--out", "m.csv"]].concat());
    let text = std::fs::read_to_string(q.join("m.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 78 + 3);
}

#[test]
fn report_and_model_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("empty.json"), "").unwrap();
    let out = repostlab(dir, &["report", "--report", "empty.json"]);
    assert_eq!(out.code, 2, "{}", out.stderr);
    std::fs::write(dir.join("none.json"), r#"{"experiment":"e","protocol":"mixed-mc","models":[],"comparisons":[],"importance":[]}"#).unwrap();
    assert_eq!(repostlab(dir, &["report", "--report", "none.json"]).code, 2);
    assert_eq!(repostlab(dir, &["report", "--report", "absent.json"]).code, 2);

    write_config(dir, SMALL_WORLD, "[split]\nrepeats = 2\n");
    let c = ["--config", "run.toml"];
    ok(dir, &[&c[..], &["synth", "--out", "world"]].concat());
    ok(dir, &[&c[..], &["build-dataset", "--corpus", "world", "--out", "ds"]].concat());
    ok(dir, &[&c[..], &["featurize", "--corpus", "world", "--dataset", "ds", "--out", "all.csv"]].concat());
    ok(dir, &[&c[..], &["featurize", "--corpus", "world", "--dataset", "ds", "--schema", "U", "--out", "u.csv"]].concat());
    ok(dir, &[&c[..], &["split", "--dataset", "ds", "--out", "split.json"]].concat());
    ok(dir, &[&c[..], &["train", "--features", "all.csv", "--split", "split.json", "--out", "models"]].concat());

    // The ALL model cannot be scored from a U-only feature file.
    let out = repostlab(dir, &[&c[..], &["eval", "--models", "models", "--features", "u.csv", "--split", "split.json", "--out", "e"]].concat());
    assert_eq!(out.code, 1, "{}", out.stderr);
    assert!(out.stderr.contains("dictionary mismatch"), "{}", out.stderr);

    // Nor from a file whose columns were reordered.
    let text = std::fs::read_to_string(dir.join("all.csv")).unwrap();
    let swapped: String = text
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.swap(0, 1);
            f.join(",") + "\n"
        })
        .collect();
    std::fs::write(dir.join("swapped.csv"), swapped).unwrap();
    let out = repostlab(dir, &[&c[..], &["eval", "--models", "models", "--features", "swapped.csv", "--split", "split.json", "--out", "e"]].concat());
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("dictionary mismatch"), "{}", out.stderr);

    let out = repostlab(dir, &[&c[..], &["train", "--features", "u.csv", "--split", "split.json", "--out", "m2"]].concat());
    assert_ne!(out.code, 0);
    let out = repostlab(dir, &[&c[..], &["train", "--features", "all.csv", "--split", "split.json", "--out", "m3", "--model", "DT-X"]].concat());
    assert_eq!(out.code, 2);
    let out = repostlab(dir, &[&c[..], &["eval", "--models", "nowhere", "--features", "all.csv", "--split", "split.json", "--out", "e"]].concat());
    assert_eq!(out.code, 2);
    let out = repostlab(dir, &[&c[..], &["split", "--dataset", "ds", "--out", "s.json", "--protocol", "sideways"]].concat());
    assert_eq!(out.code, 2);
}

#[test]
fn ood_eval_prints_one_row_per_hashtag() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let world = "n_users = 400\nn_hashtags = 14\nposts_per_hashtag = 12\nspan_days = 2.0\nseed = 2\n";
    write_config(dir, world, "[split]\nprotocol = \"loho-ood\"\nsubsets = 2\n");
    let table = pipeline(dir, "1");
    let rows: Vec<&str> = table.lines().filter(|l| l.starts_with("topic")).collect();
    assert_eq!(rows.len(), 14, "{table}");
    assert!(table.lines().any(|l| l.starts_with("overall ")), "{table}");
    assert!(table.contains("(n = 14 groups)"), "{table}");
}

#[test]
fn cache_directory_does_not_change_features() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_config(dir, SMALL_WORLD, "");
    let c = ["--config", "run.toml"];
    ok(dir, &[&c[..], &["synth", "--out", "world"]].concat());
    ok(dir, &[&c[..], &["build-dataset", "--corpus", "world", "--out", "ds"]].concat());
    ok(dir, &[&c[..], &["featurize", "--corpus", "world", "--dataset", "ds", "--out", "plain.csv"]].concat());
    let cached = |out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_repostlab"))
            .args([&c[..], &["featurize", "--corpus", "world", "--dataset", "ds", "--out", out]].concat())
            .current_dir(dir)
            .env("REPOSTLAB_CACHE", dir.join("cache"))
            .output()
            .unwrap();
        assert!(status.status.success());
    };
    cached("cold.csv");
    assert_eq!(std::fs::read_dir(dir.join("cache")).unwrap().count(), 1);
    cached("warm.csv");
    let plain = std::fs::read(dir.join("plain.csv")).unwrap();
    assert_eq!(plain, std::fs::read(dir.join("cold.csv")).unwrap());
    assert_eq!(plain, std::fs::read(dir.join("warm.csv")).unwrap());
}
