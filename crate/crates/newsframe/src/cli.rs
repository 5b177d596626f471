//! Command-line front end.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use newsframe_core::concreteness::{stopword_set, ConcretenessOptions, NeTagger};
use newsframe_core::Task;
use serde::{Deserialize, Serialize};

use crate::concreteness::{
    corpus_frame_concreteness, correlation_report, draw_concreteness_chart, load_lexicon, train_concreteness, CaseLexiconTagger,
    ConcretenessConfig, GazetteerTagger,
};
use crate::dataset::{checksum, load_corpus, CorpusStore, SCHEMA_VERSION};
use crate::encoders::{EncoderSource, Precision, TextEncoder};
use crate::error::{exit, Error, Result};
use crate::evaluation::emit::{emit_report, ReportFormat};
use crate::evaluation::{assemble_report, prepare, with_frame_modality, EvalReport, ExperimentSpec, FoldParams, RunRecord, Subset};
use crate::fetch::{fetch_images, FetchOptions};
use crate::manifest::RunManifest;
use crate::models::{LossKind, TrainConfig};

/// Root for caches when `--cache` is not given.
pub const CACHE_ENV: &str = "NEWSFRAME_CACHE";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Parser)]
#[command(name = "newsframe", version, about = "Multimodal news frame classification experiments")]
pub struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Validate a corpus CSV and write a corpus store.
    Ingest(IngestArgs),
    /// Download lead images into the local cache.
    Fetch(FetchArgs),
    /// Cross-validated training and evaluation.
    Train(TrainArgs),
    /// Concreteness regressor and frame-level correlations.
    Concreteness(ConcretenessArgs),
    /// Tables, figures or JSON from finished training runs.
    Report(ReportArgs),
    #[command(hide = true)]
    TrainWorker(WorkerArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IngestArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = SCHEMA_VERSION)]
    pub schema_version: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FetchArgs {
    /// Corpus store directory.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Image cache; defaults to $NEWSFRAME_CACHE/images, then <corpus>/images.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 30)]
    pub timeout: u64,
    #[arg(long, default_value_t = 2)]
    pub retries: u32,
    #[arg(long, default_value_t = 8)]
    pub concurrency: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskArg {
    Frame,
    Relevance,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Frame => Task::Frame,
            TaskArg::Relevance => Task::Relevance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossArg {
    Ce,
    Focal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionArg {
    F32,
    F64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Canonical modality key, e.g. `headline+api` or `majority`.
    #[arg(long)]
    pub modality: String,
    #[arg(long, default_value = "all")]
    pub subset: String,
    #[arg(long, default_value_t = 4)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub fold_seed: u64,
    /// Number of seeds, run as 0..N.
    #[arg(long, default_value_t = 25)]
    pub seeds: u64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 4)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 2e-5)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.01)]
    pub weight_decay: f64,
    #[arg(long, value_enum, default_value = "ce")]
    pub loss: LossArg,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 5)]
    pub patience: usize,
    /// Keep fine-tuning the text encoder inside the fusion head.
    #[arg(long)]
    pub fusion_text_trainable: bool,
    /// `hub:<id>`, `dir:<path>`, a path, `scratch:tiny` or `scratch:full`.
    #[arg(long, default_value = "hub:bert-base-uncased")]
    pub text_encoder: String,
    #[arg(long, default_value = "scratch:full")]
    pub image_encoder: String,
    #[arg(long, value_enum, default_value = "f32")]
    pub precision: PrecisionArg,
    /// Single-threaded kernels so repeated runs match bit for bit.
    #[arg(long)]
    pub deterministic: bool,
    /// Parallel (fold, seed) runs, each in its own process.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Relevance task: append the gold frame name to the text input.
    #[arg(long)]
    pub with_frame_label: bool,
    #[arg(long)]
    pub allow_relevance_subset: bool,
    /// Image cache; defaults to $NEWSFRAME_CACHE/images, then <corpus>/images.
    #[arg(long)]
    pub images: Option<PathBuf>,
    #[arg(long)]
    pub save_models: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConcretenessArgs {
    /// Two-column `word,rating` CSV.
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = "hub:bert-base-uncased")]
    pub text_encoder: String,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    /// `case` (capitalized words outside the lexicon), `gazetteer:<file>` or `none`.
    #[arg(long, default_value = "case")]
    pub ne_tagger: String,
    #[arg(long)]
    pub exclude_stopwords: bool,
    /// Frame-task report (all articles) supplying per-frame F1.
    #[arg(long)]
    pub f1_all: Option<PathBuf>,
    /// Frame-task report (relevant subset) supplying per-frame F1.
    #[arg(long)]
    pub f1_relevant: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Run directories, or parents of run directories.
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long, default_value = "table")]
    pub format: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct WorkerArgs {
    #[arg(long)]
    pub job: PathBuf,
    #[arg(long)]
    pub fold: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// What a worker process needs to reproduce one (fold, seed) run.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct WorkerJob {
    spec: ExperimentSpec,
    corpus: PathBuf,
    images: PathBuf,
    models_dir: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, argv) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Cmd, argv: Vec<String>) -> Result<()> {
    match cmd {
        Cmd::Ingest(a) => cmd_ingest(&a, argv),
        Cmd::Fetch(a) => cmd_fetch(&a, argv).map(|_| ()),
        Cmd::Train(a) => cmd_train(&a, argv).map(|_| ()),
        Cmd::Concreteness(a) => cmd_concreteness(&a, argv),
        Cmd::Report(a) => cmd_report(&a, argv).map(|_| ()),
        Cmd::TrainWorker(a) => cmd_worker(&a),
    }
}

fn config_json<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

fn default_image_dir(corpus_dir: &Path, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join("images"),
        _ => CorpusStore::new(corpus_dir).default_image_dir(),
    }
}

pub fn cmd_ingest(a: &IngestArgs, argv: Vec<String>) -> Result<()> {
    let corpus = load_corpus(&a.data, &a.schema_version)?;
    let store = CorpusStore::new(&a.out);
    store.write(&corpus)?;
    let mut m = RunManifest::start("ingest", argv, config_json(a));
    m.corpus_checksum = Some(checksum(&corpus)?);
    m.outputs = vec![store.corpus_path(), a.out.join(CorpusStore::STATS_FILE)];
    m.finish(&a.out)?;
    let s = corpus.stats();
    println!("{} articles, {} relevant images ({}%)", s.total_articles, s.total_relevant, s.total_percent);
    Ok(())
}

pub fn cmd_fetch(a: &FetchArgs, argv: Vec<String>) -> Result<crate::fetch::FetchReport> {
    let store = CorpusStore::new(&a.corpus);
    let mut corpus = store.load(None)?;
    let cache = default_image_dir(&a.corpus, a.cache.as_deref());
    let opts = FetchOptions {
        timeout: Duration::from_secs(a.timeout),
        retries: a.retries,
        concurrency: a.concurrency.max(1),
        ..FetchOptions::default()
    };
    let report = fetch_images(&mut corpus.images, &cache, &opts)?;
    let report_path = cache.join("fetch_report.json");
    std::fs::write(&report_path, serde_json::to_vec_pretty(&report)?).map_err(|e| Error::io(&report_path, e))?;
    let mut m = RunManifest::start("fetch", argv, config_json(a));
    m.corpus_checksum = Some(checksum(&corpus)?);
    m.outputs = vec![report_path];
    m.finish(&cache)?;
    println!("fetched {}, cached {}, failed {}", report.fetched, report.cached, report.failed);
    Ok(report)
}

fn train_config(a: &TrainArgs) -> Result<TrainConfig> {
    let loss = match a.loss {
        LossArg::Ce => LossKind::CrossEntropy,
        LossArg::Focal => LossKind::Focal { gamma: a.gamma },
    };
    let cfg = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch_size,
        learning_rate: a.lr,
        weight_decay: a.weight_decay,
        loss,
        early_stop_patience: a.patience,
        fusion_text_trainable: a.fusion_text_trainable,
        precision: match a.precision {
            PrecisionArg::F32 => Precision::F32,
            PrecisionArg::F64 => Precision::F64,
        },
        text_encoder: EncoderSource::parse(&a.text_encoder)?,
        image_encoder: EncoderSource::parse(&a.image_encoder)?,
        ..TrainConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Builds and validates the experiment described by the flags.
pub fn experiment_spec(a: &TrainArgs) -> Result<ExperimentSpec> {
    let task: Task = a.task.into();
    let mut spec = ExperimentSpec::new(task, Subset::parse(&a.subset)?, &a.modality);
    spec.folds = FoldParams { k: a.folds, seed: a.fold_seed };
    spec.seeds = (0..a.seeds).collect();
    spec.train_config = train_config(a)?;
    spec.allow_relevance_subset = a.allow_relevance_subset;
    let canonical = spec.validate()?.key();
    spec.modality = canonical;
    if task == Task::Relevance {
        spec = with_frame_modality(&spec, a.with_frame_label)?;
    } else if a.with_frame_label {
        return Err(Error::Config("--with-frame-label only applies to the relevance task".into()));
    }
    Ok(spec)
}

fn limit_threads() {
    // Read by the tensor backend's thread pool on first use.
    std::env::set_var("RAYON_NUM_THREADS", "1");
}

pub fn cmd_train(a: &TrainArgs, argv: Vec<String>) -> Result<EvalReport> {
    let spec = experiment_spec(a)?;
    if a.workers == 0 {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    if a.deterministic {
        limit_threads();
    }
    let images = default_image_dir(&a.corpus, a.images.as_deref());
    let corpus = CorpusStore::new(&a.corpus).load(Some(&images))?;
    let prepared = prepare(&spec, &corpus)?;
    let models_dir = a.save_models.then(|| a.out.join("models"));
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let jobs = prepared.jobs();
    let runs = if a.workers == 1 {
        let mut runs = Vec::with_capacity(jobs.len());
        for &(fold, seed) in &jobs {
            let dir = models_dir.as_ref().map(|d| d.join(format!("fold{fold}_seed{seed}")));
            log::info!("fold {fold} seed {seed}");
            runs.push(prepared.run(fold, seed, dir.as_deref())?);
        }
        runs
    } else {
        let job = WorkerJob { spec: spec.clone(), corpus: a.corpus.clone(), images: images.clone(), models_dir: models_dir.clone() };
        run_workers(&job, &jobs, a.workers, a.deterministic, &a.out.join("work"))?
    };
    let report = assemble_report(&prepared, Some(checksum(&corpus)?), runs)?;
    let report_path = a.out.join(REPORT_FILE);
    std::fs::write(&report_path, serde_json::to_vec_pretty(&report)?).map_err(|e| Error::io(&report_path, e))?;
    let mut m = RunManifest::start("train", argv, serde_json::json!({ "args": config_json(a), "experiment": spec }));
    m.corpus_checksum = report.corpus_checksum.clone();
    m.encoders = encoder_ids(&spec);
    m.seeds = spec.seeds.clone();
    m.deterministic = a.deterministic;
    m.outputs = std::iter::once(report_path).chain(models_dir).collect();
    m.finish(&a.out)?;
    println!(
        "{} {} {}: mean accuracy {:.1}% ± {:.1} over {} runs",
        spec.task,
        spec.subset.as_str(),
        spec.modality,
        100.0 * report.aggregate.mean_accuracy,
        100.0 * report.aggregate.std_accuracy,
        report.aggregate.n_runs
    );
    Ok(report)
}

fn encoder_ids(spec: &ExperimentSpec) -> Vec<String> {
    let Ok(m) = spec.modality_spec() else { return Vec::new() };
    let mut ids = Vec::new();
    if m.has_text() {
        ids.push(spec.train_config.text_encoder.identifier());
    }
    if m.contains(newsframe_core::Part::Image) {
        ids.push(spec.train_config.image_encoder.identifier());
    }
    ids
}

/// Runs each job in a child process of this executable, `workers` at a time.
fn run_workers(job: &WorkerJob, jobs: &[(usize, u64)], workers: usize, deterministic: bool, work_dir: &Path) -> Result<Vec<RunRecord>> {
    std::fs::create_dir_all(work_dir).map_err(|e| Error::io(work_dir, e))?;
    let job_file = work_dir.join("job.json");
    std::fs::write(&job_file, serde_json::to_vec_pretty(job)?).map_err(|e| Error::io(&job_file, e))?;
    let exe = std::env::current_exe().map_err(|e| Error::Worker(format!("cannot locate executable: {e}")))?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<RunRecord>>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..workers.min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(fold, seed)) = jobs.get(i) else { break };
                let out = work_dir.join(format!("run_fold{fold}_seed{seed}.json"));
                let mut cmd = Command::new(&exe);
                cmd.arg("train-worker")
                    .arg("--job")
                    .arg(&job_file)
                    .args(["--fold", &fold.to_string(), "--seed", &seed.to_string()])
                    .arg("--out")
                    .arg(&out);
                if deterministic {
                    cmd.env("RAYON_NUM_THREADS", "1");
                }
                let r = match cmd.output() {
                    Err(e) => Err(Error::Worker(format!("fold {fold} seed {seed}: cannot start worker: {e}"))),
                    Ok(o) if o.status.success() => {
                        std::fs::read(&out).map_err(|e| Error::io(&out, e)).and_then(|b| Ok(serde_json::from_slice::<RunRecord>(&b)?))
                    }
                    Ok(o) => {
                        let msg = String::from_utf8_lossy(&o.stderr).trim().to_string();
                        let inner = match o.status.code() {
                            Some(exit::DATA) => Error::Data(msg),
                            Some(exit::USAGE) => Error::Config(msg),
                            _ => Error::Worker(msg),
                        };
                        Err(Error::Run { fold, seed, source: Box::new(inner) })
                    }
                };
                let failed = r.is_err();
                results.lock().expect("results lock").push(r);
                if failed {
                    // Let running workers finish but start nothing new.
                    next.store(jobs.len(), Ordering::SeqCst);
                }
            });
        }
    });
    results.into_inner().expect("results lock").into_iter().collect()
}

fn cmd_worker(a: &WorkerArgs) -> Result<()> {
    let bytes = std::fs::read(&a.job).map_err(|e| Error::io(&a.job, e))?;
    let job: WorkerJob = serde_json::from_slice(&bytes)?;
    let corpus = CorpusStore::new(&job.corpus).load(Some(&job.images))?;
    let prepared = prepare(&job.spec, &corpus)?;
    let dir = job.models_dir.as_ref().map(|d| d.join(format!("fold{}_seed{}", a.fold, a.seed)));
    let record = prepared.run(a.fold, a.seed, dir.as_deref())?;
    let tmp = a.out.with_extension("part");
    std::fs::write(&tmp, serde_json::to_vec(&record)?).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, &a.out).map_err(|e| Error::io(&a.out, e))
}

fn ne_tagger(spec: &str, lexicon_words: impl Iterator<Item = String>) -> Result<Box<dyn NeTagger>> {
    struct NoEntities;
    impl NeTagger for NoEntities {
        fn tag(&self, _: &str, spans: &[newsframe_core::text::Span]) -> Vec<bool> {
            vec![false; spans.len()]
        }
    }
    match spec {
        "case" => Ok(Box::new(CaseLexiconTagger::new(lexicon_words))),
        "none" => Ok(Box::new(NoEntities)),
        s => match s.strip_prefix("gazetteer:") {
            Some(path) => Ok(Box::new(GazetteerTagger::from_file(Path::new(path))?)),
            None => Err(Error::Config(format!("unknown NE tagger {s:?} (case, none or gazetteer:<file>)"))),
        },
    }
}

fn read_report(path: &Path) -> Result<EvalReport> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn cmd_concreteness(a: &ConcretenessArgs, argv: Vec<String>) -> Result<()> {
    let lexicon = load_lexicon(&a.lexicon)?;
    let corpus = CorpusStore::new(&a.corpus).load(None)?;
    let tagger = ne_tagger(&a.ne_tagger, lexicon.entries.keys().cloned())?;
    let source = EncoderSource::parse(&a.text_encoder)?;
    let texts: Vec<&str> = corpus.articles.iter().map(|x| x.headline.as_str()).chain(lexicon.entries.keys().map(String::as_str)).collect();
    let encoder = TextEncoder::load(&source, &texts, a.seed, Precision::F32)?;
    let cfg = ConcretenessConfig { split_seed: a.split_seed, seed: a.seed, epochs: a.epochs, ..ConcretenessConfig::default() };
    let model = train_concreteness(&lexicon, &encoder, &cfg)?;
    let options = ConcretenessOptions { excluded_words: a.exclude_stopwords.then(stopword_set) };
    let fc = corpus_frame_concreteness(&corpus, &model, &encoder, tagger.as_ref(), &options)?;
    let f1_all = a.f1_all.as_deref().map(read_report).transpose()?;
    let f1_rel = a.f1_relevant.as_deref().map(read_report).transpose()?;
    let report = correlation_report(&corpus, &fc, f1_all.as_ref(), f1_rel.as_ref(), &a.ne_tagger, Some(model.summary()))?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    model.save(&a.out.join("regressor"))?;
    let json = a.out.join("correlation_report.json");
    std::fs::write(&json, serde_json::to_vec_pretty(&report)?).map_err(|e| Error::io(&json, e))?;
    let chart = a.out.join("concreteness.svg");
    draw_concreteness_chart(&report, &chart)?;
    let mut m = RunManifest::start("concreteness", argv, config_json(a));
    m.corpus_checksum = Some(checksum(&corpus)?);
    m.encoders = vec![encoder.identifier.clone()];
    m.seeds = vec![a.seed, a.split_seed];
    m.outputs = vec![a.out.join("regressor"), json, chart];
    m.finish(&a.out)?;
    if let Some(r) = model.test_pearson {
        println!("held-out Pearson r {r:.3}");
    }
    for c in &report.correlations {
        match c.r {
            Some(r) => println!("{:?} vs {:?}: r = {r:.2} over {} frames", c.x, c.y, c.n_frames),
            None => println!("{:?} vs {:?}: {}", c.x, c.y, c.error.as_deref().unwrap_or("not computed")),
        }
    }
    Ok(())
}

/// Report files found under each argument: the directory itself or its children.
fn collect_reports(dirs: &[PathBuf]) -> Result<Vec<EvalReport>> {
    let mut out = Vec::new();
    for d in dirs {
        let direct = d.join(REPORT_FILE);
        if direct.is_file() {
            out.push(read_report(&direct)?);
            continue;
        }
        let mut children: Vec<PathBuf> = std::fs::read_dir(d)
            .map_err(|e| Error::io(d, e))?
            .filter_map(|e| e.ok().map(|e| e.path().join(REPORT_FILE)))
            .filter(|p| p.is_file())
            .collect();
        children.sort();
        if children.is_empty() {
            return Err(Error::Data(format!("no {REPORT_FILE} in {} or its subdirectories", d.display())));
        }
        for c in children {
            out.push(read_report(&c)?);
        }
    }
    Ok(out)
}

pub fn cmd_report(a: &ReportArgs, argv: Vec<String>) -> Result<Vec<PathBuf>> {
    let format = ReportFormat::parse(&a.format)?;
    let reports = collect_reports(&a.runs)?;
    let files = emit_report(&reports, format, &a.out)?;
    let mut m = RunManifest::start("report", argv, config_json(a));
    m.corpus_checksum = reports.first().and_then(|r| r.corpus_checksum.clone());
    m.seeds = reports.first().map(|r| r.spec.seeds.clone()).unwrap_or_default();
    m.outputs = files.clone();
    m.finish(&a.out)?;
    for f in &files {
        println!("{}", f.display());
    }
    Ok(files)
}
