//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repostlab_cli::manifest::RunManifest;
use repostlab_cli::pipeline::Featurizers;
use repostlab_core::dictionary::feature_kinds;
use repostlab_core::{Corpus, FeatureKind, FeatureTable, Instance, SchemaId};
use repostlab_datasets::{
    build_dataset, split_loho_all, split_monte_carlo, split_perhash_mc, split_temporal_all, LabeledDataset, Protocol, RatioTag, SplitPlan,
};
use repostlab_evalkit::{aggregate, f1, paired_t_test, random_predictions, run_experiment, wilcoxon_exact, EvalReport, ExperimentSpec, FoldScores, ModelSpec};
use repostlab_learners::{feature_importance, gbdt_train, GbdtParams, Matrix, MlpNetwork, Node};
use repostlab_synthgen::{generate_cascades, generate_world, WorldConfig};
use repostlab_textfeat::{readability_scores, LdaConfig, Lexicons};

const DATASET_SEED: u64 = 1;
const SPLIT_SEED: u64 = 1;
const MC_FRACTIONS: (f64, f64, f64) = (0.63, 0.07, 0.3);
const MODELS: [&str; 3] = ["DT-ALL", "DT-U", "DT-M"];

fn world_config() -> WorldConfig {
    let mut cfg = WorldConfig {
        n_users: 2000,
        n_hashtags: 6,
        posts_per_hashtag: 80,
        span_days: 2.0,
        attachment: 5,
        author_exponent: 6.0,
        non_follower_exposure: 0.01,
        hashtag_polarity: vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
        ..WorldConfig::default()
    };
    cfg.weights.alpha_follow = 3.0;
    cfg.weights.alpha_interact = 2.0;
    cfg.weights.alpha_activity = 1.0;
    cfg.weights.beta_topic = 0.5;
    cfg.weights.beta_sentiment = 2.5;
    cfg.weights.base = -4.0;
    cfg
}

fn experiment() -> ExperimentSpec {
    let p = GbdtParams {
        max_depth: 5,
        learning_rate: 0.1,
        n_estimators: 100,
        ..GbdtParams::default()
    };
    ExperimentSpec::new(
        "acceptance",
        vec![ModelSpec::gbdt("DT-ALL", SchemaId::All, p), ModelSpec::gbdt("DT-U", SchemaId::U, p), ModelSpec::gbdt("DT-M", SchemaId::M, p)],
    )
}

/// The acceptance world with its 1:5 dataset and ALL feature table.
struct Lab {
    cfg: WorldConfig,
    vocabularies: Vec<Vec<String>>,
    corpus: Corpus,
    featurizers: Featurizers,
    dataset: LabeledDataset,
    table: FeatureTable,
    build_time: Duration,
}

impl Lab {
    fn dataset(&self, ratio: RatioTag) -> (LabeledDataset, FeatureTable) {
        let inst = self.featurizers.instance(&self.corpus).unwrap();
        let ds = build_dataset(&self.corpus, ratio, DATASET_SEED, |i| inst.features(i)).unwrap();
        let table = inst.featurize_all(&ds.instances).unwrap();
        (ds, table)
    }
}

fn lab() -> &'static Lab {
    static LAB: OnceLock<Lab> = OnceLock::new();
    LAB.get_or_init(|| {
        let t = Instant::now();
        let cfg = world_config();
        let world = generate_world(&cfg).unwrap();
        let cascades = generate_cascades(&world, &cfg);
        let corpus = world.corpus(&cascades).unwrap();
        let featurizers = Featurizers::fit(&corpus, &LdaConfig::default(), None).unwrap();
        let mut lab = Lab {
            vocabularies: world.vocabularies.clone(),
            cfg,
            corpus,
            featurizers,
            dataset: LabeledDataset {
                ratio: RatioTag::OneToFive,
                seed: DATASET_SEED,
                instances: Vec::new(),
                report: Default::default(),
            },
            table: FeatureTable::with_schema(SchemaId::All),
            build_time: Duration::ZERO,
        };
        let (ds, table) = lab.dataset(RatioTag::OneToFive);
        lab.dataset = ds;
        lab.table = table;
        lab.build_time = t.elapsed();
        eprintln!(
            "acceptance world: {} users, {} posts, {} instances ({} positive), built in {:.1?}",
            lab.corpus.users().len(),
            lab.corpus.posts().len(),
            lab.dataset.instances.len(),
            lab.dataset.positive_count(),
            lab.build_time
        );
        lab
    })
}

/// Mixed Monte Carlo report on `ratio`, cached per ratio.
fn mixed_report(ratio: RatioTag) -> &'static EvalReport {
    static REPORTS: OnceLock<std::sync::Mutex<HashMap<RatioTag, &'static EvalReport>>> = OnceLock::new();
    let cache = REPORTS.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&ratio) {
        return r;
    }
    let lab = lab();
    let owned;
    let (instances, table) = if ratio == RatioTag::OneToFive {
        (&lab.dataset.instances, &lab.table)
    } else {
        owned = lab.dataset(ratio);
        (&owned.0.instances, &owned.1)
    };
    let t = Instant::now();
    let plan = split_monte_carlo(instances, 10, MC_FRACTIONS, SPLIT_SEED).unwrap();
    let (report, _) = run_experiment(table, &plan, &experiment()).unwrap();
    eprintln!("{ratio} mixed-mc ({} instances, {:.1?}):\n{}", instances.len(), t.elapsed(), report.render_table());
    let report: &'static EvalReport = Box::leak(Box::new(report));
    cache.lock().unwrap().insert(ratio, report);
    report
}

fn overall(report: &EvalReport, model: &str) -> f64 {
    report.model(model).unwrap().overall.mu
}

fn criterion_1() -> String {
    let t = Instant::now();
    let lab = lab();
    let cfg = &lab.cfg;
    assert!(cfg.n_users >= 2000 && cfg.n_hashtags == 6);
    let w = &cfg.weights;
    assert!(w.alpha_follow + w.alpha_interact + w.alpha_activity > w.beta_topic.abs() + w.beta_sentiment.abs());
    for (a, va) in lab.vocabularies.iter().enumerate() {
        let va: HashSet<&String> = va.iter().collect();
        for vb in &lab.vocabularies[a + 1..] {
            assert!(vb.iter().all(|word| !va.contains(word)), "hashtag vocabularies overlap");
        }
    }
    assert_eq!(lab.dataset.hashtags().len(), 6);
    let plan = split_loho_all(&lab.dataset.instances, 3, SPLIT_SEED).unwrap();
    let (report, _) = run_experiment(&lab.table, &plan, &experiment()).unwrap();
    let elapsed = t.elapsed();
    eprintln!("loho-ood:\n{}", report.render_table());
    let (u, m) = (overall(&report, "DT-U"), overall(&report, "DT-M"));
    assert!(u - m >= 0.30, "F1 DT-U {u:.3} - DT-M {m:.3} = {:.3} < 0.30", u - m);
    assert!(m <= 0.25, "F1 DT-M {m:.3} > 0.25");
    assert!(elapsed <= Duration::from_secs(600), "took {elapsed:.1?}");
    format!("LOHO F1 DT-U {u:.3}, DT-M {m:.3}, gap {:.3}, {:.0?}", u - m, elapsed)
}

fn criterion_2() -> String {
    let report = mixed_report(RatioTag::OneToFive);
    let [all, u, m] = MODELS.map(|n| overall(report, n));
    assert!(all >= u, "DT-ALL {all:.3} < DT-U {u:.3}");
    assert!(all > m && u > m, "DT-M {m:.3} not below DT-ALL {all:.3} and DT-U {u:.3}");
    let mut ps = Vec::new();
    for (a, b) in [("DT-ALL", "DT-U"), ("DT-ALL", "DT-M"), ("DT-U", "DT-M")] {
        let c = report.comparison(a, b).unwrap_or_else(|| panic!("no comparison {a} vs {b}"));
        let p = c.wilcoxon_p.unwrap_or(1.0);
        assert!(c.n == 10 && c.mean_difference > 0.0 && p < 0.05, "{a} vs {b}: n {}, mean diff {:.4}, p {p}", c.n, c.mean_difference);
        ps.push(p);
    }
    format!("DT-ALL {all:.3}, DT-U {u:.3}, DT-M {m:.3}, Wilcoxon p {:.4}/{:.4}/{:.4}", ps[0], ps[1], ps[2])
}

fn criterion_3() -> String {
    let ratios = [RatioTag::OneToOne, RatioTag::OneToFive, RatioTag::OneToTen];
    let reports: Vec<&EvalReport> = ratios.iter().map(|&r| mixed_report(r)).collect();
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for name in MODELS {
        let f: Vec<f64> = reports.iter().map(|r| overall(r, name)).collect();
        lines.push(format!("{name} {:.4}/{:.4}/{:.4}", f[0], f[1], f[2]));
        if !(f[0] > f[1] && f[1] > f[2]) {
            failures.push(name);
        }
    }
    assert!(failures.is_empty(), "ordering broken for {failures:?}: {}", lines.join(", "));
    lines.join(", ")
}

fn criterion_4() -> String {
    let labels = &lab().table.labels;
    assert!(labels.len() >= 10_000, "{} instances", labels.len());
    let rate = labels.iter().filter(|&&l| l == 1).count() as f64 / labels.len() as f64;
    let scores: Vec<f64> = (0..20).map(|s| f1(labels, &random_predictions(labels.len(), rate, s)).unwrap()).collect();
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    assert!((mean - 0.167).abs() <= 0.01, "mean random F1 {mean:.4}");
    format!("{} instances, positive rate {rate:.4}, mean F1 over 20 seeds {mean:.4}", labels.len())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Mean and population deviation of the pool in which every group contributes
/// equally many copies of its folds.
fn pooled_oracle(groups: &[Vec<f64>]) -> (f64, f64) {
    let lcm = groups.iter().map(Vec::len).fold(1usize, |a, b| a / gcd(a, b) * b);
    let pool: Vec<f64> = groups.iter().flat_map(|g| g.iter().flat_map(move |&v| std::iter::repeat_n(v, lcm / g.len()))).collect();
    let n = pool.len() as f64;
    let mean = pool.iter().sum::<f64>() / n;
    (mean, (pool.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt())
}

fn criterion_5() -> String {
    let (mu, sigma) = aggregate(&[(0.8, 0.0), (0.6, 0.0)]);
    assert!((mu - 0.7).abs() < 1e-12 && (sigma - 0.1).abs() < 1e-12, "worked example gives ({mu}, {sigma})");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.random_range(1..15);
        let groups: Vec<Vec<f64>> = (0..k).map(|_| (0..rng.random_range(1..8)).map(|_| rng.random::<f64>()).collect()).collect();
        let summaries: Vec<(f64, f64)> = groups
            .iter()
            .map(|g| {
                let s = FoldScores {
                    group: String::new(),
                    folds: g.clone(),
                };
                (s.mu(), s.sigma())
            })
            .collect();
        let (mu, sigma) = aggregate(&summaries);
        let (om, os) = pooled_oracle(&groups);
        worst = worst.max((mu - om).abs()).max((sigma - os).abs());
    }
    assert!(worst <= 1e-12, "max deviation from the pooled oracle {worst:e}");
    format!("worked example (0.7, 0.1); 100 random sets within {worst:.1e}")
}

/// Exhaustive best midpoint split of a logistic stump at the base score.
fn oracle_threshold(x: &[f64], y: &[u8], lambda: f64) -> Option<(f64, f64)> {
    let p = y.iter().map(|&v| f64::from(v)).sum::<f64>() / y.len() as f64;
    let g: Vec<f64> = y.iter().map(|&v| p - f64::from(v)).collect();
    let h = p * (1.0 - p);
    let mut xs = x.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let score = |gs: f64, hs: f64| gs * gs / (hs + lambda);
    let mut best: Option<(f64, f64)> = None;
    for w in xs.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        let (mut gl, mut hl, mut gr, mut hr) = (0.0, 0.0, 0.0, 0.0);
        for (xi, gi) in x.iter().zip(&g) {
            if *xi < t {
                gl += gi;
                hl += h;
            } else {
                gr += gi;
                hr += h;
            }
        }
        let gain = 0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr));
        if gain > 0.0 && best.is_none_or(|b| gain > b.1) {
            best = Some((t, gain));
        }
    }
    best
}

fn names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("f{j}")).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (Matrix, Vec<u8>) {
    let data: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y = (0..n).map(|i| u8::from(data[i * d] + 0.5 * data[i * d + 1] + rng.random_range(-0.5..0.5) > 0.0)).collect();
    (Matrix::new(n, d, data).unwrap(), y)
}

fn max_gradient_error(net: &MlpNetwork, xs: &[Vec<f64>], ys: &[u8], coords: &[usize]) -> (f64, usize) {
    let h = 1e-5;
    let (_, grads) = net.loss_and_gradient(xs, ys);
    let analytic = MlpNetwork::flatten(&grads);
    let patterns: Vec<Vec<bool>> = xs.iter().map(|x| net.relu_pattern(x)).collect();
    let (mut worst, mut checked): (f64, usize) = (0.0, 0);
    for &k in coords {
        let mut plus = net.clone();
        plus.set_param(k, net.param(k) + h);
        let mut minus = net.clone();
        minus.set_param(k, net.param(k) - h);
        if !xs.iter().zip(&patterns).all(|(x, p)| &plus.relu_pattern(x) == p && &minus.relu_pattern(x) == p) {
            continue;
        }
        let numeric = (plus.loss(xs, ys) - minus.loss(xs, ys)) / (2.0 * h);
        let a = analytic[k];
        worst = worst.max((a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6));
        checked += 1;
    }
    (worst, checked)
}

fn criterion_6() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let stump = GbdtParams {
        max_depth: 1,
        n_estimators: 1,
        min_child_weight: 0.0,
        ..GbdtParams::default()
    };
    let mut datasets = 0;
    while datasets < 50 {
        let n = rng.random_range(12..80);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y: Vec<u8> = x.iter().map(|&v| u8::from(v + rng.random_range(-2.0..2.0) > 0.3)).collect();
        if y.iter().all(|&v| v == y[0]) {
            continue;
        }
        let model = gbdt_train(&Matrix::new(n, 1, x.clone()).unwrap(), &y, &stump, None, names(1)).unwrap();
        match (&model.trees[0].nodes[0], oracle_threshold(&x, &y, stump.reg_lambda)) {
            (Node::Split { threshold, .. }, Some((t, _))) => assert!((threshold - t).abs() < 1e-12, "dataset {datasets}: {threshold} vs {t}"),
            (Node::Leaf { .. }, None) => {}
            (node, want) => panic!("dataset {datasets}: {node:?} vs oracle {want:?}"),
        }
        datasets += 1;
    }

    let mut importance_sums = Vec::new();
    for _ in 0..5 {
        let (x, y) = random_matrix(&mut rng, 300, 6);
        let params = GbdtParams {
            n_estimators: 40,
            max_depth: 4,
            subsample: 1.0,
            early_stopping_rounds: None,
            ..GbdtParams::default()
        };
        let model = gbdt_train(&x, &y, &params, None, names(6)).unwrap();
        assert!(model.train_loss.windows(2).all(|w| w[1] <= w[0] + 1e-12), "training loss increased");
        importance_sums.push(feature_importance(&model).iter().map(|(_, w)| w).sum::<f64>());
    }
    assert!(importance_sums.iter().all(|s| (s - 1.0).abs() <= 1e-9), "importance sums {importance_sums:?}");

    let mut worst: f64 = 0.0;
    for batch in 0..20 {
        let d = 6;
        let net = MlpNetwork::random(d, &[128, 128, 64], batch);
        let xs: Vec<Vec<f64>> = (0..5).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let ys: Vec<u8> = (0..5).map(|_| rng.random_range(0..2)).collect();
        let np = net.param_count();
        let mut coords: Vec<usize> = (0..120).map(|_| rng.random_range(0..np)).collect();
        coords.extend(np - 130..np);
        let (err, checked) = max_gradient_error(&net, &xs, &ys, &coords);
        assert!(checked > 200, "batch {batch}: {checked} stable coordinates");
        worst = worst.max(err);
    }
    assert!(worst < 1e-4, "MLP gradient relative error {worst:e}");
    format!("50 stumps match the oracle; loss non-increasing; importances sum to 1; MLP gradient error {worst:.1e}")
}

fn check_plan(plan: &SplitPlan, instances: &[Instance]) {
    let by_id: HashMap<&str, &Instance> = instances.iter().map(|i| (i.instance_id.as_str(), i)).collect();
    let get = |ids: &[String]| ids.iter().map(|id| by_id[id.as_str()]).collect::<Vec<_>>();
    for (k, fold) in plan.folds.iter().enumerate() {
        let (train, val, test) = (get(&fold.train), get(&fold.val), get(&fold.test));
        assert!(!test.is_empty(), "fold {k}: empty test");
        let test_ids: HashSet<&str> = test.iter().map(|i| i.instance_id.as_str()).collect();
        assert!(train.iter().chain(&val).all(|i| !test_ids.contains(i.instance_id.as_str())), "fold {k}: instance overlap");
        let test_pairs: HashSet<(&str, &str)> = test.iter().map(|i| i.pair()).collect();
        assert!(train.iter().all(|i| !test_pairs.contains(&i.pair())), "fold {k}: pair overlap");
        match plan.protocol {
            Protocol::LohoOod => {
                let tags: HashSet<&str> = test.iter().map(|i| i.hashtag.as_str()).collect();
                assert!(train.iter().chain(&val).all(|i| !tags.contains(i.hashtag.as_str())), "fold {k}: test hashtag in training");
            }
            Protocol::Temporal => {
                let last = train.iter().chain(&val).map(|i| i.event_time).max().unwrap();
                let first = test.iter().map(|i| i.event_time).min().unwrap();
                assert!(last < first, "fold {k}: training time {last} not before test time {first}");
            }
            Protocol::MixedMc | Protocol::PerhashMc => {}
        }
    }
}

fn criterion_7() -> String {
    let cfg = WorldConfig {
        n_users: 400,
        n_hashtags: 3,
        posts_per_hashtag: 30,
        span_days: 3.0,
        seed: 7,
        ..WorldConfig::default()
    };
    let world = generate_world(&cfg).unwrap();
    let corpus = world.corpus(&generate_cascades(&world, &cfg)).unwrap();
    let featurizers = Featurizers::fit(&corpus, &LdaConfig { train_iters: 30, ..LdaConfig::default() }, None).unwrap();
    let inst = featurizers.instance(&corpus).unwrap();
    let ds = build_dataset(&corpus, RatioTag::OneToFive, 0, |i| inst.features(i)).unwrap();
    let instances = &ds.instances;
    let mut plans = 0;
    let mut folds = 0;
    for seed in 0..25 {
        for protocol in Protocol::ALL {
            let plan = match protocol {
                Protocol::MixedMc => split_monte_carlo(instances, 5, MC_FRACTIONS, seed),
                Protocol::PerhashMc => split_perhash_mc(instances, 3, MC_FRACTIONS, seed),
                Protocol::LohoOod => split_loho_all(instances, 3, seed),
                Protocol::Temporal => split_temporal_all(instances, 5, 3, seed),
            }
            .unwrap();
            assert_eq!(plan.protocol, protocol);
            check_plan(&plan, instances);
            plans += 1;
            folds += plan.folds.len();
        }
    }
    format!("{plans} plans, {folds} folds over {} instances", instances.len())
}

fn criterion_8() -> String {
    let sizes: Vec<usize> = SchemaId::ALL_SCHEMAS.iter().map(|s| repostlab_core::feature_dictionary(*s).len()).collect();
    assert_eq!(sizes, vec![78, 30, 38, 157, 225, 303]);
    for s in SchemaId::ALL_SCHEMAS {
        assert_eq!(feature_kinds(s).len(), s.len());
    }

    let table = &lab().table;
    let kinds = feature_kinds(SchemaId::All);
    assert_eq!(table.names, repostlab_core::feature_dictionary(SchemaId::All));
    // A simplex group is a contiguous run of columns sharing a tag; the same
    // tag recurs in the post block and in each user's history block.
    let mut groups: Vec<(&str, Vec<usize>)> = Vec::new();
    for (j, k) in kinds.iter().enumerate() {
        if let FeatureKind::Simplex(g) = k {
            match groups.last_mut() {
                Some((last, cols)) if last == g && cols.last() == Some(&(j - 1)) => cols.push(j),
                _ => groups.push((g, vec![j])),
            }
        }
    }
    for row in &table.rows {
        for (j, (v, k)) in row.iter().zip(&kinds).enumerate() {
            if v.is_nan() {
                continue;
            }
            if matches!(k, FeatureKind::Probability | FeatureKind::Simplex(_)) {
                assert!((0.0..=1.0).contains(v), "{} = {v}", table.names[j]);
            }
        }
        for (g, cols) in &groups {
            let vals: Vec<f64> = cols.iter().map(|&j| row[j]).collect();
            if vals.iter().all(|v| v.is_nan()) {
                continue;
            }
            let sum: f64 = vals.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "simplex {g} at {} sums to {sum}", table.names[cols[0]]);
        }
    }

    let familiar = Lexicons::builtin().familiar;
    let golden = include_str!("../../textfeat/tests/data/readability_golden.csv");
    let mut reader = csv::Reader::from_reader(golden.as_bytes());
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let got = readability_scores(&rec[0], &familiar).to_vec();
        for (i, (g, field)) in got.iter().zip(rec.iter().skip(1)).enumerate() {
            let e: f64 = field.parse().unwrap();
            assert!((g.is_nan() && e.is_nan()) || (g - e).abs() <= 1e-9, "{:?} r{}: {g} vs {e}", &rec[0], i + 1);
        }
        rows += 1;
    }
    assert_eq!(rows, 20);
    format!("schema sizes {sizes:?}; {} rows, {} simplex groups checked; {rows} readability rows", table.len(), groups.len())
}

fn repostlab(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_repostlab"))
        .args(["--config", "run.toml"])
        .args(args)
        .current_dir(dir)
        .env_remove("REPOSTLAB_CACHE")
        .output()
        .unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

const RUN_CONFIG: &str = r#"
[world]
n_users = 300
n_hashtags = 3
posts_per_hashtag = 30
span_days = 3.0
seed = 9

[lda]
train_iters = 30

[split]
repeats = 3

[[experiment.models]]
name = "DT-ALL"
schema = "ALL"
family = "gbdt"
params = { max_depth = 3, n_estimators = 20, subsample = 0.8 }

[[experiment.models]]
name = "MLP-U"
schema = "U"
family = "mlp"
config = { hidden = [16, 8], max_epochs = 5 }
"#;

/// Artifact hashes of the features, models and report of one pipeline run.
fn pipeline_hashes(dir: &Path) -> BTreeMap<String, String> {
    std::fs::write(dir.join("run.toml"), RUN_CONFIG).unwrap();
    repostlab(dir, &["synth", "--out", "world"]);
    repostlab(dir, &["build-dataset", "--corpus", "world", "--out", "ds"]);
    repostlab(dir, &["featurize", "--corpus", "world", "--dataset", "ds", "--out", "features.csv"]);
    repostlab(dir, &["split", "--dataset", "ds", "--out", "split.json"]);
    repostlab(dir, &["train", "--features", "features.csv", "--split", "split.json", "--out", "models"]);
    repostlab(dir, &["eval", "--models", "models", "--features", "features.csv", "--split", "split.json", "--out", "eval"]);
    let mut hashes = BTreeMap::new();
    for (stage, manifest) in [("features", "features.csv.manifest.json"), ("models", "models/manifest.json"), ("eval", "eval/manifest.json")] {
        let m = RunManifest::load(&dir.join(manifest)).unwrap();
        assert!(!m.artifacts.is_empty(), "{manifest} lists no artifacts");
        for (path, hash) in m.artifacts {
            assert_eq!(repostlab_core::hash::file_sha256(&dir.join(manifest).parent().unwrap().join(&path)).unwrap(), hash, "{path}");
            hashes.insert(format!("{stage}/{path}"), hash);
        }
    }
    hashes
}

fn criterion_9() -> String {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = pipeline_hashes(a.path());
    let second = pipeline_hashes(b.path());
    assert!(first.keys().any(|k| k.ends_with(".csv")) && first.keys().any(|k| k.ends_with("report.json")));
    assert!(first.keys().filter(|k| k.starts_with("models/")).count() >= 6);
    assert_eq!(first, second, "artifact hashes differ between reruns");
    format!("{} artifact hashes identical across two runs", first.len())
}

fn criterion_10() -> String {
    let a = [1.1, 2.3, 0.4, 3.2, 5.0];
    let w = wilcoxon_exact(&a, &[0.0; 5]).unwrap();
    // Only the all-positive and all-negative sign patterns are as extreme.
    let oracle = 2.0 / 32.0;
    assert!((w.p - oracle).abs() < 1e-12, "Wilcoxon p {}", w.p);
    let t = paired_t_test(&[1.0, 2.0, 3.0, 4.0], &[0.0; 4]).unwrap();
    // t = sqrt(15) on 3 degrees of freedom; with u = t/sqrt(3) the two-sided
    // tail is 1 - (2/pi)(atan u + u/(1+u^2)).
    let u = 15f64.sqrt() / 3f64.sqrt();
    let hand = 1.0 - 2.0 / std::f64::consts::PI * (u.atan() + u / (1.0 + u * u));
    assert!((hand - 0.0305).abs() < 1e-3);
    assert!((t.p - hand).abs() < 1e-3, "t-test p {} vs {hand}", t.p);
    format!("Wilcoxon p {:.4}; t-test p {:.4}", w.p, t.p)
}

fn main() {
    let criteria: [(&str, fn() -> String); 10] = [
        ("OOD gap", criterion_1),
        ("in-distribution ordering", criterion_2),
        ("imbalance degradation", criterion_3),
        ("random-guess baseline", criterion_4),
        ("aggregation exactness", criterion_5),
        ("learner oracles", criterion_6),
        ("protocol invariants", criterion_7),
        ("feature dictionary conformance", criterion_8),
        ("determinism", criterion_9),
        ("statistics oracles", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.1?}]", i + 1, t.elapsed()),
            Err(e) => {
                failed += 1;
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
                println!("FAIL {:>2} {name}: {msg} [{:.1?}]", i + 1, t.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
