//! Cross-validated experiments over folds and seeds, and their reports.

pub mod emit;

use std::path::{Path, PathBuf};

use newsframe_core::folds::{make_folds, FoldPlan, FoldWarning, StratifyBy};
use newsframe_core::metrics::{mean_std, ConfusionMatrix};
use newsframe_core::sre::encode_sre;
use newsframe_core::text::build_text;
use newsframe_core::{HeadKind, ModalitySpec, Part, Task};
use serde::{Deserialize, Serialize};

use crate::dataset::Corpus;
use crate::encoders::{derive_seed, tokenizer};
use crate::error::{Error, Result};
use crate::models::{self, Example, ImageInput, TrainConfig, TrainLog, TrainedModel};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Folds carved from the training folds for validation (one of them is used).
pub const VALIDATION_FOLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    All,
    RelevantOnly,
}

impl Subset {
    pub fn as_str(self) -> &'static str {
        match self {
            Subset::All => "all",
            Subset::RelevantOnly => "relevant",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Subset::All),
            "relevant" | "relevant_only" => Ok(Subset::RelevantOnly),
            other => Err(Error::Config(format!("unknown subset {other:?} (expected all or relevant)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldParams {
    pub k: usize,
    pub seed: u64,
}

impl Default for FoldParams {
    fn default() -> Self {
        FoldParams { k: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub task: Task,
    pub subset: Subset,
    /// Canonical modality key, e.g. `headline+api`.
    pub modality: String,
    pub folds: FoldParams,
    pub seeds: Vec<u64>,
    pub train_config: TrainConfig,
    /// Permits the relevant-only subset on the relevance task.
    #[serde(default)]
    pub allow_relevance_subset: bool,
}

impl ExperimentSpec {
    pub fn new(task: Task, subset: Subset, modality: &str) -> Self {
        ExperimentSpec {
            task,
            subset,
            modality: modality.to_string(),
            folds: FoldParams::default(),
            seeds: (0..25).collect(),
            train_config: TrainConfig::default(),
            allow_relevance_subset: false,
        }
    }

    pub fn modality_spec(&self) -> Result<ModalitySpec> {
        Ok(ModalitySpec::parse(self.task, &self.modality)?)
    }

    pub fn validate(&self) -> Result<ModalitySpec> {
        let spec = self.modality_spec()?;
        if self.task == Task::Relevance && self.subset == Subset::RelevantOnly && !self.allow_relevance_subset {
            return Err(Error::Config("the relevant-only subset is only meaningful for the frame task".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.folds.k < 2 {
            return Err(newsframe_core::Error::FoldCount(self.folds.k).into());
        }
        self.train_config.validate()?;
        Ok(spec)
    }

    fn stratify_by(&self) -> StratifyBy {
        match self.task {
            Task::Frame => StratifyBy::Frame,
            Task::Relevance => StratifyBy::Relevance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub article_id: String,
    /// External class ids (frame 1..=9, relevance 0/1).
    pub gold: u32,
    pub predicted: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub fold: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub predictions: Vec<PredictionRecord>,
    pub train_log: TrainLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class_id: u32,
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    pub undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n_runs: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    /// Confusion summed over every run.
    pub confusion: ConfusionMatrix,
    /// One-vs-rest metrics from the pooled confusion matrix.
    pub per_class: Vec<ClassMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Misclassification {
    pub fold: usize,
    pub seed: u64,
    pub article_id: String,
    pub gold: u32,
    pub predicted: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    pub head: HeadKind,
    /// Checksum of the full corpus the experiment was run on.
    pub corpus_checksum: Option<String>,
    pub n_items: usize,
    pub fold_sizes: Vec<usize>,
    pub fold_warnings: Vec<FoldWarning>,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
    pub misclassifications: Vec<Misclassification>,
}

impl EvalReport {
    pub fn class_f1(&self, class_index: usize) -> Option<f64> {
        self.aggregate.per_class.get(class_index).map(|c| c.f1)
    }
}

/// Model inputs for every article of `corpus`, in corpus order.
///
/// `separator` joins text parts; `frame_label` parts use the gold frame.
pub fn build_examples(spec: &ModalitySpec, corpus: &Corpus, separator: &str) -> Result<Vec<Example>> {
    corpus
        .articles
        .iter()
        .map(|a| {
            let image = corpus.image(&a.article_id);
            let label = match spec.task() {
                Task::Frame => a.frame.index(),
                Task::Relevance => {
                    let img = image.ok_or_else(|| {
                        Error::Data(format!("{}: relevance task needs an image record with a relevance label", a.article_id))
                    })?;
                    usize::from(img.relevant)
                }
            };
            let text = if spec.has_text() {
                let frame = spec.contains(Part::FrameLabel).then_some(a.frame);
                Some(build_text(a, image, spec, frame, separator)?)
            } else {
                None
            };
            let sre = if spec.contains(Part::Sre) {
                let img = image.ok_or_else(|| newsframe_core::Error::MissingImage { article_id: a.article_id.clone() })?;
                Some(encode_sre(img.subject_id, img.re_id)?)
            } else {
                None
            };
            let image_input = if spec.contains(Part::Image) {
                let path = image
                    .and_then(|i| i.local_path.as_deref())
                    .ok_or_else(|| Error::Data(format!("{}: lead image is not cached (run fetch first)", a.article_id)))?;
                Some(ImageInput::Path(PathBuf::from(path)))
            } else {
                None
            };
            Ok(Example { article_id: a.article_id.clone(), label, text, sre, frame: Some(a.frame), image: image_input })
        })
        .collect()
}

/// A prepared experiment: subset corpus, inputs and fold plan.
pub struct Prepared {
    pub spec: ExperimentSpec,
    pub modality: ModalitySpec,
    pub examples: Vec<Example>,
    pub plan: FoldPlan,
}

pub fn prepare(spec: &ExperimentSpec, corpus: &Corpus) -> Result<Prepared> {
    let modality = spec.validate()?;
    let subset = match spec.subset {
        Subset::All => corpus.clone(),
        Subset::RelevantOnly => corpus.relevant_subset(),
    };
    if subset.is_empty() {
        return Err(newsframe_core::Error::Empty("corpus subset").into());
    }
    let examples = build_examples(&modality, &subset, tokenizer::SEP)?;
    let plan =
        make_folds(examples.iter().map(|e| (e.article_id.as_str(), e.label as u32)), spec.folds.k, spec.stratify_by(), spec.folds.seed)?;
    for w in &plan.warnings {
        log::warn!("stratum {} has {} member(s), fewer than {} folds", w.stratum, w.members, w.k);
    }
    let spec = ExperimentSpec { modality: modality.key(), ..spec.clone() };
    Ok(Prepared { spec, modality, examples, plan })
}

fn needs_validation(kind: HeadKind) -> bool {
    !matches!(kind, HeadKind::Majority | HeadKind::SreLogReg)
}

impl Prepared {
    /// Training, validation and test examples for one fold.
    pub fn split(&self, fold: usize) -> Result<(Vec<Example>, Vec<Example>, Vec<Example>)> {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for ex in &self.examples {
            match self.plan.fold_of(&ex.article_id) {
                Some(f) if f == fold => test.push(ex.clone()),
                Some(_) => train.push(ex.clone()),
                None => return Err(Error::Data(format!("{} missing from fold plan", ex.article_id))),
            }
        }
        if !needs_validation(self.modality.head_kind()) || train.len() < VALIDATION_FOLDS {
            return Ok((train, Vec::new(), test));
        }
        let holdout = make_folds(
            train.iter().map(|e| (e.article_id.as_str(), e.label as u32)),
            VALIDATION_FOLDS,
            self.spec.stratify_by(),
            derive_seed(self.spec.folds.seed, &format!("validation/{fold}")),
        )?;
        let (val, train): (Vec<Example>, Vec<Example>) = train.into_iter().partition(|e| holdout.fold_of(&e.article_id) == Some(0));
        Ok((train, val, test))
    }

    /// Trains and tests one (fold, seed) run; optionally saves the model.
    pub fn run(&self, fold: usize, seed: u64, model_dir: Option<&Path>) -> Result<RunRecord> {
        let inner = || -> Result<RunRecord> {
            let (train, val, test) = self.split(fold)?;
            if test.is_empty() {
                return Err(newsframe_core::Error::Empty("test fold").into());
            }
            let cfg = TrainConfig { seed, ..self.spec.train_config.clone() };
            let model = models::train(self.modality.head_kind(), &self.modality, &train, &val, &cfg)?;
            let record = test_model(&model, &test, fold, seed, train.len(), val.len())?;
            if let Some(dir) = model_dir {
                let metrics = serde_json::json!({ "accuracy": record.accuracy, "n_test": record.n_test });
                model.save(dir, Some(metrics))?;
            }
            Ok(record)
        };
        inner().map_err(|e| Error::Run { fold, seed, source: Box::new(e) })
    }

    pub fn jobs(&self) -> Vec<(usize, u64)> {
        (0..self.plan.k).flat_map(|f| self.spec.seeds.iter().map(move |&s| (f, s))).collect()
    }
}

/// Evaluates a trained model on a test split.
pub fn test_model(model: &TrainedModel, test: &[Example], fold: usize, seed: u64, n_train: usize, n_val: usize) -> Result<RunRecord> {
    let refs: Vec<&Example> = test.iter().collect();
    let preds = model.predict_batch(&refs)?;
    let task = model.spec.task();
    let mut confusion = ConfusionMatrix::new(model.n_classes);
    let mut predictions = Vec::with_capacity(test.len());
    for (ex, p) in test.iter().zip(&preds) {
        confusion.add(ex.label, p.label)?;
        predictions.push(PredictionRecord {
            article_id: ex.article_id.clone(),
            gold: task.class_id(ex.label),
            predicted: task.class_id(p.label),
        });
    }
    let correct = test.iter().zip(&preds).filter(|(e, p)| e.label == p.label).count();
    Ok(RunRecord {
        fold,
        seed,
        accuracy: correct as f64 / test.len() as f64,
        n_train,
        n_val,
        n_test: test.len(),
        confusion,
        predictions,
        train_log: model.log.clone(),
    })
}

/// Merges completed runs into a report. Runs are ordered by (fold, seed).
pub fn assemble_report(prepared: &Prepared, corpus_checksum: Option<String>, mut runs: Vec<RunRecord>) -> Result<EvalReport> {
    runs.sort_by(|a, b| (a.fold, a.seed).cmp(&(b.fold, b.seed)));
    let task = prepared.spec.task;
    let n_classes = task.num_classes();
    let accs: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accs)?;
    let mut confusion = ConfusionMatrix::new(n_classes);
    for r in &runs {
        confusion.merge(&r.confusion)?;
    }
    let per_class = (0..n_classes)
        .map(|c| {
            let f = confusion.f1(c);
            ClassMetrics {
                class_id: task.class_id(c),
                name: task.class_name(c).to_string(),
                precision: f.precision,
                recall: f.recall,
                f1: f.f1,
                support: f.support,
                undefined: f.undefined,
            }
        })
        .collect();
    let misclassifications = runs
        .iter()
        .flat_map(|r| {
            r.predictions.iter().filter(|p| p.gold != p.predicted).map(move |p| Misclassification {
                fold: r.fold,
                seed: r.seed,
                article_id: p.article_id.clone(),
                gold: p.gold,
                predicted: p.predicted,
            })
        })
        .collect();
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        spec: prepared.spec.clone(),
        head: prepared.modality.head_kind(),
        corpus_checksum,
        n_items: prepared.examples.len(),
        fold_sizes: prepared.plan.fold_sizes(),
        fold_warnings: prepared.plan.warnings.clone(),
        aggregate: Aggregate { n_runs: runs.len(), mean_accuracy, std_accuracy, confusion, per_class },
        runs,
        misclassifications,
    })
}

/// Runs every (fold, seed) job in this process, one after another.
///
/// When `models_dir` is set, each model is saved to `fold<f>_seed<s>/` under it.
pub fn run_experiment(spec: &ExperimentSpec, corpus: &Corpus, models_dir: Option<&Path>) -> Result<EvalReport> {
    let prepared = prepare(spec, corpus)?;
    let mut runs = Vec::new();
    for (fold, seed) in prepared.jobs() {
        let dir = models_dir.map(|d| d.join(format!("fold{fold}_seed{seed}")));
        runs.push(prepared.run(fold, seed, dir.as_deref())?);
    }
    assemble_report(&prepared, Some(crate::dataset::checksum(corpus)?), runs)
}

/// Relevance experiment; with `with_frame_label` the gold frame name is
/// appended to the text input.
pub fn run_relevance(spec: &ExperimentSpec, with_frame_label: bool, corpus: &Corpus, models_dir: Option<&Path>) -> Result<EvalReport> {
    if spec.task != Task::Relevance {
        return Err(Error::Config("run_relevance needs a relevance-task spec".into()));
    }
    if let Some(a) = corpus.articles.iter().find(|a| corpus.image(&a.article_id).is_none()) {
        return Err(newsframe_core::Error::MissingImage { article_id: a.article_id.clone() }.into());
    }
    let spec = with_frame_modality(spec, with_frame_label)?;
    run_experiment(&spec, corpus, models_dir)
}

/// Adds or removes the frame-label part of a relevance spec.
pub fn with_frame_modality(spec: &ExperimentSpec, with_frame_label: bool) -> Result<ExperimentSpec> {
    let m = spec.modality_spec()?;
    if m.parts().is_empty() {
        return Ok(spec.clone());
    }
    let mut parts: Vec<Part> = m.parts().iter().copied().filter(|p| *p != Part::FrameLabel).collect();
    if with_frame_label {
        parts.push(Part::FrameLabel);
    }
    let key = ModalitySpec::new(spec.task, parts)?.key();
    Ok(ExperimentSpec { modality: key, ..spec.clone() })
}
