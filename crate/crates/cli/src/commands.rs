use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use repostlab_core::hash::dictionary_hash;
use repostlab_core::{load_corpus, Corpus, FeatureTable, SchemaId};
use repostlab_datasets::{
    build_dataset, load_dataset, save_dataset, split_loho_all, split_monte_carlo, split_perhash_mc, split_temporal_all, LabeledDataset, Protocol,
    RatioTag, SplitPlan,
};
use repostlab_evalkit::{build_report, predict_fold, resolve_rows, EvalReport, FoldPrediction, ImportanceRow, ModelKind, ModelSpec};
use repostlab_learners::{feature_importance, Model, ModelFile};
use repostlab_synthgen::{generate_cascades, generate_world};

use crate::config::RunConfig;
use crate::manifest::{manifest_for_file, RunManifest, MANIFEST_FILE};
use crate::pipeline::{Featurizers, TopicArtifact};
use crate::UsageError;

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

macro_rules! emitln {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))
    };
}

pub const CACHE_ENV: &str = "REPOSTLAB_CACHE";
pub const TOPIC_FILE: &str = "topic_model.json";

#[derive(Debug, Parser)]
#[command(name = "repostlab", version, about = "Repost prediction experiments on corpora of posts and users")]
pub struct Cli {
    /// Overrides the seed of the step being run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// TOML run configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus from the [world] section.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Label positives and sample negatives; also fits the topic model.
    BuildDataset {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// 1:1, 1:5, 1:10 or general-1:5; overrides [dataset].ratio.
        #[arg(long)]
        ratio: Option<String>,
    },
    /// Write the feature CSV of a dataset for one schema.
    Featurize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// M, U-P, U-HA, U-HM, U or ALL.
        #[arg(long, default_value = "ALL")]
        schema: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a split plan over a dataset.
    Split(SplitArgs),
    /// Train the configured models on every fold of a split.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        split: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Restrict to these model names.
        #[arg(long = "model")]
        models: Vec<String>,
        /// Also train each model on every row of the feature file.
        #[arg(long)]
        full: bool,
    },
    /// Score trained fold models and write a report.
    Eval {
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        split: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Importance ranking to attach to the report.
        #[arg(long)]
        importance: Option<PathBuf>,
    },
    /// Gain importance of a trained tree model.
    Importance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a saved report.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// mixed-mc, perhash-mc, loho-ood or temporal; overrides [split].protocol.
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub subsets: Option<usize>,
    #[arg(long)]
    pub windows: Option<usize>,
    #[arg(long)]
    pub train_windows: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Json,
}

/// Settings shared by every command.
pub struct RunContext {
    pub config: RunConfig,
    pub config_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
}

impl RunContext {
    pub fn new(cli: &Cli) -> Result<Self> {
        Ok(RunContext {
            config: RunConfig::load(cli.config.as_deref())?,
            config_path: cli.config.clone(),
            seed: cli.seed,
            cache_dir: std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        })
    }

    fn manifest(&self, command: &str) -> Result<RunManifest> {
        let mut m = RunManifest::new(command, &self.config);
        if let Some(path) = &self.config_path {
            m.input(path)?;
        }
        Ok(m)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!(UsageError("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("configuring worker threads")?;
    }
    let mut ctx = RunContext::new(&cli)?;
    match cli.command {
        Command::Synth { out } => synth(&mut ctx, &out),
        Command::BuildDataset { corpus, out, ratio } => build(&mut ctx, &corpus, &out, ratio.as_deref()),
        Command::Featurize { corpus, dataset, schema, out } => featurize(&ctx, &corpus, &dataset, &schema, &out),
        Command::Split(args) => split(&mut ctx, &args),
        Command::Train { features, split, out, models, full } => train(&mut ctx, &features, &split, &out, &models, full),
        Command::Eval { models, features, split, out, importance } => eval(&ctx, &models, &features, &split, &out, importance.as_deref()),
        Command::Importance { model, out } => importance(&ctx, &model, &out),
        Command::Report { report, format } => print_report(&report, format),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn corpus_files(dir: &Path) -> (PathBuf, PathBuf) {
    (dir.join("posts.jsonl"), dir.join("users.jsonl"))
}

fn open_corpus(dir: &Path, manifest: &mut RunManifest) -> Result<Corpus> {
    let (posts, users) = corpus_files(dir);
    for p in [&posts, &users] {
        if !p.is_file() {
            bail!(UsageError(format!("corpus file {} not found", p.display())));
        }
        manifest.input(p)?;
    }
    let (corpus, report) = load_corpus(&posts, &users).with_context(|| format!("loading corpus {}", dir.display()))?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    Ok(corpus)
}

fn open_dataset(dir: &Path, manifest: &mut RunManifest) -> Result<LabeledDataset> {
    for name in ["dataset.json", "instances.jsonl"] {
        let p = dir.join(name);
        if !p.is_file() {
            bail!(UsageError(format!("dataset file {} not found", p.display())));
        }
        manifest.input(&p)?;
    }
    load_dataset(dir).with_context(|| format!("loading dataset {}", dir.display()))
}

fn open_features(path: &Path, manifest: &mut RunManifest) -> Result<FeatureTable> {
    manifest.input(path)?;
    FeatureTable::read_csv_file(path).with_context(|| format!("reading features {}", path.display()))
}

fn open_split(path: &Path, manifest: &mut RunManifest) -> Result<SplitPlan> {
    manifest.input(path)?;
    SplitPlan::load(path).with_context(|| format!("reading split {}", path.display()))
}

fn synth(ctx: &mut RunContext, out: &Path) -> Result<()> {
    if let Some(seed) = ctx.seed {
        ctx.config.world.seed = seed;
    }
    let cfg = &ctx.config.world;
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    let mut manifest = ctx.manifest("synth")?;
    manifest.seed("world", cfg.seed);
    let world = generate_world(cfg)?;
    let cascades = generate_cascades(&world, cfg);
    create_dir(out)?;
    let (posts, users) = world.write_corpus(&cascades, out)?;
    manifest.argument("out", out.display()).artifact(out, &posts)?.artifact(out, &users)?;
    manifest.save(&out.join(MANIFEST_FILE))?;
    emitln!(
        "{} users, {} posts, {} reposts from {} exposures written to {}",
        world.users.len(),
        world.posts.len(),
        cascades.reposts.len(),
        cascades.exposures.len(),
        out.display()
    );
    Ok(())
}

fn build(ctx: &mut RunContext, corpus_dir: &Path, out: &Path, ratio: Option<&str>) -> Result<()> {
    if let Some(r) = ratio {
        ctx.config.dataset.ratio = r.parse::<RatioTag>().map_err(|e| UsageError(e.to_string()))?;
    }
    if let Some(seed) = ctx.seed {
        ctx.config.dataset.seed = seed;
    }
    let mut manifest = ctx.manifest("build-dataset")?;
    let corpus = open_corpus(corpus_dir, &mut manifest)?;
    let (lda, section) = (ctx.config.lda, ctx.config.dataset.clone());
    let featurizers = Featurizers::fit(&corpus, &lda, ctx.cache_dir.as_deref())?;
    let inst = featurizers.instance(&corpus)?;
    let ds = build_dataset(&corpus, section.ratio, section.seed, |i| inst.features(i))?;
    create_dir(out)?;
    save_dataset(&ds, out)?;
    let topic = out.join(TOPIC_FILE);
    featurizers.topic_artifact(&lda).save(&topic)?;
    if let Some(dir) = &ctx.cache_dir {
        featurizers.save_cache(dir)?;
    }
    manifest
        .argument("corpus", corpus_dir.display())
        .argument("out", out.display())
        .argument("ratio", section.ratio)
        .seed("dataset", section.seed)
        .seed("lda", lda.seed);
    for name in ["dataset.json", "instances.jsonl", TOPIC_FILE] {
        manifest.artifact(out, &out.join(name))?;
    }
    manifest.save(&out.join(MANIFEST_FILE))?;
    emitln!(
        "{} instances ({} positives, {} excluded for small pools) written to {}",
        ds.instances.len(),
        ds.positive_count(),
        ds.report.excluded_small_pool,
        out.display()
    );
    Ok(())
}

fn featurize(ctx: &RunContext, corpus_dir: &Path, dataset_dir: &Path, schema: &str, out: &Path) -> Result<()> {
    let schema: SchemaId = schema.parse().map_err(|e: repostlab_core::CoreError| UsageError(e.to_string()))?;
    let mut manifest = ctx.manifest("featurize")?;
    let corpus = open_corpus(corpus_dir, &mut manifest)?;
    let ds = open_dataset(dataset_dir, &mut manifest)?;
    let topic_path = dataset_dir.join(TOPIC_FILE);
    manifest.input(&topic_path)?;
    let topic = TopicArtifact::load(&topic_path)?;
    let featurizers = Featurizers::from_model(&corpus, topic.model, &topic.lda, ctx.cache_dir.as_deref())?;
    let table = featurizers.table(&corpus, &ds.instances)?.select_schema(schema)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    table.write_csv_file(out)?;
    if let Some(dir) = &ctx.cache_dir {
        featurizers.save_cache(dir)?;
    }
    let base = out.parent().unwrap_or(Path::new(""));
    manifest
        .argument("corpus", corpus_dir.display())
        .argument("dataset", dataset_dir.display())
        .argument("schema", schema)
        .argument("out", out.display())
        .artifact(base, out)?;
    manifest.save(&manifest_for_file(out))?;
    emitln!("{} rows x {} {} features written to {}", table.len(), table.names.len(), schema, out.display());
    Ok(())
}

fn split(ctx: &mut RunContext, args: &SplitArgs) -> Result<()> {
    let s = &mut ctx.config.split;
    if let Some(p) = &args.protocol {
        s.protocol = p.parse::<Protocol>().map_err(|e| UsageError(e.to_string()))?;
    }
    s.repeats = args.repeats.unwrap_or(s.repeats);
    s.subsets = args.subsets.unwrap_or(s.subsets);
    s.windows = args.windows.unwrap_or(s.windows);
    s.train_windows = args.train_windows.unwrap_or(s.train_windows);
    if let Some(seed) = ctx.seed {
        s.seed = seed;
    }
    let s = s.clone();
    let mut manifest = ctx.manifest("split")?;
    let ds = open_dataset(&args.dataset, &mut manifest)?;
    let fractions = (s.fractions[0], s.fractions[1], s.fractions[2]);
    let plan = match s.protocol {
        Protocol::MixedMc => split_monte_carlo(&ds.instances, s.repeats, fractions, s.seed),
        Protocol::PerhashMc => split_perhash_mc(&ds.instances, s.repeats, fractions, s.seed),
        Protocol::LohoOod => split_loho_all(&ds.instances, s.subsets, s.seed),
        Protocol::Temporal => split_temporal_all(&ds.instances, s.windows, s.train_windows, s.seed),
    }
    .map_err(|e| UsageError(e.to_string()))?;
    plan.validate(&ds.instances)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    plan.save(&args.out)?;
    manifest
        .argument("dataset", args.dataset.display())
        .argument("protocol", s.protocol)
        .argument("out", args.out.display())
        .seed("split", s.seed)
        .artifact(args.out.parent().unwrap_or(Path::new("")), &args.out)?;
    manifest.save(&manifest_for_file(&args.out))?;
    emitln!("{} {} folds written to {}", plan.folds.len(), s.protocol, args.out.display());
    Ok(())
}

fn fold_file(dir: &Path, model: &str, fold: usize) -> PathBuf {
    dir.join(model).join(format!("fold-{fold:03}.json"))
}

fn full_file(dir: &Path, model: &str) -> PathBuf {
    dir.join(model).join("full.json")
}

fn with_seed(spec: &ModelSpec, seed: u64) -> ModelSpec {
    let mut spec = spec.clone();
    match &mut spec.kind {
        ModelKind::Gbdt { params, .. } => params.seed = seed,
        ModelKind::Mlp { config } => config.seed = seed,
    }
    spec
}

fn selected_models(ctx: &RunContext, names: &[String]) -> Result<Vec<ModelSpec>> {
    let declared = &ctx.config.experiment.models;
    for n in names {
        if !declared.iter().any(|m| &m.name == n) {
            bail!(UsageError(format!("model {n} is not declared in the configuration")));
        }
    }
    Ok(declared
        .iter()
        .filter(|m| names.is_empty() || names.contains(&m.name))
        .map(|m| ctx.seed.map_or_else(|| m.clone(), |s| with_seed(m, s)))
        .collect())
}

fn train(ctx: &mut RunContext, features: &Path, split_path: &Path, out: &Path, names: &[String], full: bool) -> Result<()> {
    let models = selected_models(ctx, names)?;
    ctx.config.experiment.models = ctx.config.experiment.models.iter().map(|m| models.iter().find(|s| s.name == m.name).unwrap_or(m).clone()).collect();
    let mut manifest = ctx.manifest("train")?;
    let table = open_features(features, &mut manifest)?;
    let plan = open_split(split_path, &mut manifest)?;
    let tables: Vec<FeatureTable> = models
        .iter()
        .map(|m| table.select_schema(m.schema).with_context(|| format!("feature file lacks the {} columns of {}", m.schema, m.name)))
        .collect::<Result<_>>()?;
    let index = table.row_index();
    let mut jobs: Vec<(usize, Option<usize>)> = Vec::new();
    for m in 0..models.len() {
        jobs.extend((0..plan.folds.len()).map(|f| (m, Some(f))));
        if full {
            jobs.push((m, None));
        }
    }
    let fitted: Vec<ModelFile> = jobs
        .par_iter()
        .map(|&(m, f)| -> Result<ModelFile> {
            let (train, val) = match f {
                Some(f) => {
                    let fold = &plan.folds[f];
                    (resolve_rows(&index, &fold.train)?, resolve_rows(&index, &fold.val)?)
                }
                None => ((0..table.len()).collect(), Vec::new()),
            };
            let file = models[m].fit(&tables[m], &train, &val);
            file.with_context(|| format!("training {} on {}", models[m].name, f.map_or("all rows".to_string(), |f| format!("fold {f}"))))
        })
        .collect::<Result<_>>()?;
    for spec in &models {
        create_dir(&out.join(&spec.name))?;
    }
    for (&(m, f), file) in jobs.iter().zip(&fitted) {
        let path = f.map_or_else(|| full_file(out, &models[m].name), |f| fold_file(out, &models[m].name, f));
        file.save(&path)?;
        manifest.artifact(out, &path)?;
    }
    for spec in &models {
        let seed = match &spec.kind {
            ModelKind::Gbdt { params, .. } => params.seed,
            ModelKind::Mlp { config } => config.seed,
        };
        manifest.seed(&spec.name, seed);
    }
    manifest
        .argument("features", features.display())
        .argument("split", split_path.display())
        .argument("out", out.display())
        .argument("full", full);
    manifest.save(&out.join(MANIFEST_FILE))?;
    emitln!("{} models trained on {} folds, written to {}", models.len(), plan.folds.len(), out.display());
    Ok(())
}

/// Columns of `table` restricted to the model's features, in file order; their
/// dictionary hash must equal the model's.
pub fn model_columns(file: &ModelFile, table: &FeatureTable) -> Result<FeatureTable> {
    let wanted: std::collections::HashSet<&String> = file.model.feature_names().iter().collect();
    let names: Vec<String> = table.names.iter().filter(|n| wanted.contains(n)).cloned().collect();
    let found = dictionary_hash(&names);
    if found != file.dictionary_hash {
        bail!(
            "feature dictionary mismatch for model {}: the model expects {} but the feature file provides {} ({} of {} columns)",
            file.name,
            file.dictionary_hash,
            found,
            names.len(),
            wanted.len()
        );
    }
    Ok(table.select_columns(&names)?)
}

fn eval(ctx: &RunContext, models_dir: &Path, features: &Path, split_path: &Path, out: &Path, importance: Option<&Path>) -> Result<()> {
    let mut manifest = ctx.manifest("eval")?;
    let table = open_features(features, &mut manifest)?;
    let plan = open_split(split_path, &mut manifest)?;
    let spec = ctx.config.experiment.spec();
    let mut files = Vec::new();
    for m in &spec.models {
        for k in 0..plan.folds.len() {
            let path = fold_file(models_dir, &m.name, k);
            if !path.is_file() {
                bail!(UsageError(format!("model file {} not found; run train first", path.display())));
            }
            manifest.input(&path)?;
            files.push((k, ModelFile::load(&path).with_context(|| format!("loading {}", path.display()))?));
        }
    }
    let predictions: Vec<FoldPrediction> = files
        .par_iter()
        .map(|(k, file)| -> Result<FoldPrediction> {
            let columns = model_columns(file, &table)?;
            Ok(predict_fold(file, &columns, &plan.folds[*k], *k, spec.threshold)?)
        })
        .collect::<Result<_>>()?;
    let ranking: Vec<ImportanceRow> = match importance {
        Some(p) => {
            manifest.input(p)?;
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => Vec::new(),
    };
    let report = build_report(&spec.name, plan.protocol.as_str(), &predictions, &spec.comparison_pairs(), ranking)?;
    create_dir(out)?;
    let (pred_path, report_path) = (out.join("predictions.jsonl"), out.join("report.json"));
    repostlab_core::corpus::write_jsonl(&pred_path, &predictions)?;
    report.save(&report_path)?;
    manifest
        .argument("models", models_dir.display())
        .argument("features", features.display())
        .argument("split", split_path.display())
        .argument("out", out.display())
        .artifact(out, &pred_path)?
        .artifact(out, &report_path)?;
    manifest.save(&out.join(MANIFEST_FILE))?;
    emit(&report.render_table());
    Ok(())
}

fn importance(ctx: &RunContext, model: &Path, out: &Path) -> Result<()> {
    let mut manifest = ctx.manifest("importance")?;
    manifest.input(model)?;
    let file = ModelFile::load(model).with_context(|| format!("loading {}", model.display()))?;
    let Model::Gbdt(tree) = &file.model else {
        bail!(UsageError(format!("{} is not a tree model", model.display())));
    };
    let rows: Vec<ImportanceRow> = feature_importance(tree).into_iter().map(|(feature, weight)| ImportanceRow { feature, weight }).collect();
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::write(out, serde_json::to_string_pretty(&rows)? + "\n").with_context(|| format!("writing {}", out.display()))?;
    manifest
        .argument("model", model.display())
        .argument("out", out.display())
        .artifact(out.parent().unwrap_or(Path::new("")), out)?;
    manifest.save(&manifest_for_file(out))?;
    for r in rows.iter().take(20) {
        emitln!("{:<28} {:.4}", r.feature, r.weight);
    }
    Ok(())
}

fn print_report(path: &Path, format: ReportFormat) -> Result<()> {
    let report = EvalReport::load(path).map_err(|e| UsageError(format!("{} is not a usable report: {e}", path.display())))?;
    match format {
        ReportFormat::Table => emit(&report.render_table()),
        ReportFormat::Json => emit(&report.to_json()?),
    }
    Ok(())
}
