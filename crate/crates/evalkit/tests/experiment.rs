use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repostlab_core::{feature_dictionary, FeatureTable, SchemaId};
use repostlab_datasets::{Fold, Protocol, SplitPlan};
use repostlab_evalkit::{build_report, run_experiment, EvalError, EvalReport, ExperimentSpec, ModelSpec, Pairing};
use repostlab_learners::GbdtParams;

const TAGS: [&str; 3] = ["alpha", "beta", "gamma"];

/// Label driven by the first U-P column; M columns are noise.
fn table(n: usize) -> FeatureTable {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut t = FeatureTable::with_schema(SchemaId::All);
    for i in 0..n {
        let mut row: Vec<f64> = (0..feature_dictionary(SchemaId::All).len()).map(|_| rng.random::<f64>()).collect();
        let y = u8::from(row[78] > 0.6);
        if rng.random::<f64>() < 0.05 {
            row[78] = 1.0 - row[78];
        }
        t.push(row, y, TAGS[i % 3], &format!("i{i:05}")).unwrap();
    }
    t
}

fn ids(t: &FeatureTable, rows: &[usize]) -> Vec<String> {
    rows.iter().map(|&r| t.instance_ids[r].clone()).collect()
}

fn mixed_plan(t: &FeatureTable) -> SplitPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let folds = (0..10)
        .map(|_| {
            let mut rows: Vec<usize> = (0..t.len()).collect();
            rows.shuffle(&mut rng);
            let (test, rest) = rows.split_at(t.len() * 3 / 10);
            let (val, train) = rest.split_at(t.len() / 10);
            Fold {
                group: None,
                train: ids(t, train),
                val: ids(t, val),
                test: ids(t, test),
                leakage_removed: 0,
            }
        })
        .collect();
    SplitPlan {
        protocol: Protocol::MixedMc,
        seed: 3,
        folds,
    }
}

fn ood_plan(t: &FeatureTable) -> SplitPlan {
    let mut folds = Vec::new();
    for tag in TAGS {
        let inside: Vec<usize> = (0..t.len()).filter(|&r| t.hashtags[r] == tag).collect();
        let outside: Vec<usize> = (0..t.len()).filter(|&r| t.hashtags[r] != tag).collect();
        for k in 0..2 {
            let test: Vec<usize> = inside.iter().copied().filter(|r| r % 2 == k).collect();
            let (val, train) = outside.split_at(20);
            folds.push(Fold {
                group: Some(tag.to_string()),
                train: ids(t, train),
                val: ids(t, val),
                test: ids(t, &test),
                leakage_removed: 0,
            });
        }
    }
    SplitPlan {
        protocol: Protocol::LohoOod,
        seed: 0,
        folds,
    }
}

fn spec() -> ExperimentSpec {
    let p = GbdtParams {
        n_estimators: 15,
        max_depth: 3,
        ..GbdtParams::default()
    };
    let mut s = ExperimentSpec::new("toy", vec![ModelSpec::gbdt("DT-U", SchemaId::U, p), ModelSpec::gbdt("DT-M", SchemaId::M, p)]);
    s.importance_model = Some("DT-U".into());
    s
}

#[test]
fn ten_fold_plan_gives_ten_scores_and_per_fold_pairing() {
    let t = table(300);
    let (report, preds) = run_experiment(&t, &mixed_plan(&t), &spec()).unwrap();
    assert_eq!(preds.len(), 20);
    for m in &report.models {
        assert_eq!(m.per_group.len(), 1);
        assert_eq!(m.per_group[0].group, "mixed");
        assert_eq!(m.per_group[0].folds.len(), 10);
        assert_eq!(m.overall.mu, m.per_group[0].mu);
    }
    let u = report.model("DT-U").unwrap().overall.mu;
    let m = report.model("DT-M").unwrap().overall.mu;
    assert!(u > 0.8 && u > m + 0.3, "{u} vs {m}");
    let c = report.comparison("DT-U", "DT-M").unwrap();
    assert_eq!((c.pairing, c.n), (Pairing::PerFold, 10));
    assert!(c.wilcoxon_p.unwrap() < 0.01);
    let total: f64 = report.importance.iter().map(|r| r.weight).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert_eq!(report.importance[0].feature, feature_dictionary(SchemaId::All)[78]);
}

#[test]
fn multi_group_plan_reports_each_group_and_aggregates() {
    let t = table(300);
    let (report, preds) = run_experiment(&t, &ood_plan(&t), &spec()).unwrap();
    let u = report.model("DT-U").unwrap();
    assert_eq!(u.per_group.iter().map(|g| g.group.as_str()).collect::<Vec<_>>(), TAGS);
    assert!(u.per_group.iter().all(|g| g.folds.len() == 2));
    let c = report.comparison("DT-U", "DT-M").unwrap();
    assert_eq!((c.pairing, c.n), (Pairing::PerGroup, 3));

    let rebuilt = build_report("toy", "loho-ood", &preds, &[("DT-U".into(), "DT-M".into())], report.importance.clone()).unwrap();
    assert_eq!(rebuilt.to_json().unwrap(), report.to_json().unwrap());
    let table_text = report.render_table();
    assert!(table_text.contains("gamma") && table_text.contains("overall") && table_text.contains(" ± "));
}

#[test]
fn report_json_round_trips_and_rejects_inconsistency() {
    let t = table(150);
    let (report, _) = run_experiment(&t, &mixed_plan(&t), &spec()).unwrap();
    let json = report.to_json().unwrap();
    let back = EvalReport::from_json(&json).unwrap();
    assert_eq!(back.to_json().unwrap(), json);
    let mut broken = report.clone();
    broken.models[0].per_group[0].mu += 0.1;
    assert!(EvalReport::from_json(&broken.to_json().unwrap()).is_err());
    let mut empty = report.clone();
    empty.models.clear();
    empty.comparisons.clear();
    assert!(empty.validate().is_err());
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["experiment", "models", "comparisons", "importance"] {
        assert!(value.get(key).is_some(), "{key}");
    }
    assert!(value["models"][0]["per_group"][0]["folds"].is_array());
    assert!(value["comparisons"][0]["t_p"].is_number() || value["comparisons"][0]["t_p"].is_null());
}

#[test]
fn errors_name_the_failing_fold() {
    let t = table(90);
    let mut plan = mixed_plan(&t);
    plan.folds[4].train.push("ghost".into());
    match run_experiment(&t, &plan, &spec()) {
        Err(EvalError::Fold { fold, .. }) => assert_eq!(fold, 4),
        other => panic!("{other:?}"),
    }
    let mut bad = spec();
    bad.comparisons.push(("DT-U".into(), "NN".into()));
    assert!(run_experiment(&t, &mixed_plan(&t), &bad).is_err());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let t = table(150);
    let plan = mixed_plan(&t);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = one.install(|| run_experiment(&t, &plan, &spec()).unwrap().0);
    let b = run_experiment(&t, &plan, &spec()).unwrap().0;
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}
