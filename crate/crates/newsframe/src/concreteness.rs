//! Word-concreteness regression, frame concreteness and the frame-level
//! correlation analysis.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use candle_core::{DType, Device, Module, Tensor};
use candle_nn::{AdamW, Optimizer, ParamsAdamW};
use newsframe_core::concreteness::{clamp_rating, frame_concreteness, ConcretenessOptions, FrameConcreteness, NeTagger, WordScorer};
use newsframe_core::correlation::{correlation_table, pearson, CorrelationEntry, FrameObservation};
use newsframe_core::text::Span;
use newsframe_core::Frame;
use plotters::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Corpus;
use crate::encoders::nn::{ForwardCtx, Linear};
use crate::encoders::params::ParamStore;
use crate::encoders::{derive_seed, TextEncoder, TextEncoding, TextMode};
use crate::error::{Error, Result};
use crate::evaluation::EvalReport;

/// Word to human rating, lowercased and unique.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConcretenessLexicon {
    pub entries: BTreeMap<String, f64>,
}

impl ConcretenessLexicon {
    pub fn from_pairs<I: IntoIterator<Item = (String, f64)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, (w, r)) in pairs.into_iter().enumerate() {
            let word = w.trim().to_lowercase();
            if word.is_empty() {
                return Err(Error::Data(format!("lexicon entry {} has an empty word", i + 1)));
            }
            if !(1.0..=5.0).contains(&r) {
                return Err(Error::Data(format!("rating {r} for {word:?} is outside [1, 5]")));
            }
            if entries.insert(word.clone(), r).is_some() {
                return Err(Error::Data(format!("duplicate lexicon word {word:?}")));
            }
        }
        Ok(ConcretenessLexicon { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_lowercase())
    }
}

/// Reads a two-column `word,rating` CSV; a header row is detected and skipped.
pub fn load_lexicon(path: &Path) -> Result<ConcretenessLexicon> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_path(path)?;
    let src = path.display().to_string();
    let mut pairs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::Row { path: src, row: i + 1, message: "expected word,rating".into() });
        }
        match rec[1].trim().parse::<f64>() {
            Ok(r) => pairs.push((rec[0].to_string(), r)),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Row { path: src, row: i + 1, message: format!("rating {:?} is not a number", &rec[1]) }),
        }
    }
    ConcretenessLexicon::from_pairs(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcretenessConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub split_seed: u64,
    pub seed: u64,
    /// Train/validation/test fractions.
    pub split: [f64; 3],
}

impl Default for ConcretenessConfig {
    fn default() -> Self {
        ConcretenessConfig {
            hidden: 256,
            epochs: 200,
            batch_size: 64,
            learning_rate: 1e-3,
            patience: 30,
            split_seed: 0,
            seed: 0,
            split: [0.90, 0.05, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub seed: u64,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub test_words: Vec<String>,
}

/// Two-layer regressor over standardized last-four-layer word vectors.
pub struct ConcretenessModel {
    store: ParamStore,
    l1: Linear,
    l2: Linear,
    mean: Tensor,
    scale: Tensor,
    pub input_dim: usize,
    pub split: SplitRecord,
    pub val_pearson: Option<f64>,
    pub test_pearson: Option<f64>,
    /// Lexicon words that produced no tokens.
    pub skipped: Vec<String>,
    pub encoder: Option<String>,
    pub epochs_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcretenessSummary {
    pub input_dim: usize,
    pub split: SplitRecord,
    pub val_pearson: Option<f64>,
    pub test_pearson: Option<f64>,
    pub skipped: usize,
    pub encoder: Option<String>,
    pub epochs_run: usize,
}

impl ConcretenessModel {
    pub fn summary(&self) -> ConcretenessSummary {
        ConcretenessSummary {
            input_dim: self.input_dim,
            split: self.split.clone(),
            val_pearson: self.val_pearson,
            test_pearson: self.test_pearson,
            skipped: self.skipped.len(),
            encoder: self.encoder.clone(),
            epochs_run: self.epochs_run,
        }
    }

    fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let x = x.broadcast_sub(&self.mean)?.broadcast_div(&self.scale)?;
        let h = self.l1.forward(&x)?.relu()?;
        Ok(self.l2.forward(&h)?.squeeze(1)?)
    }

    /// Unclamped predictions.
    pub fn predict_raw(&self, features: &[Vec<f64>]) -> Result<Vec<f64>> {
        if features.is_empty() {
            return Ok(Vec::new());
        }
        let x = rows_tensor(features, self.input_dim)?;
        Ok(self.forward(&x)?.to_dtype(DType::F64)?.to_vec1()?)
    }

    /// Prediction clamped into the rating range.
    pub fn predict(&self, feature: &[f64]) -> Result<f64> {
        Ok(clamp_rating(self.predict_raw(&[feature.to_vec()])?[0]))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.store.save(&dir.join("regressor.safetensors"))?;
        let p = dir.join("regressor.json");
        std::fs::write(&p, serde_json::to_vec_pretty(&self.summary())?).map_err(|e| Error::io(p, e))
    }
}

fn rows_tensor(rows: &[Vec<f64>], dim: usize) -> Result<Tensor> {
    if rows.iter().any(|r| r.len() != dim) {
        return Err(newsframe_core::Error::RaggedFeatures.into());
    }
    let flat: Vec<f32> = rows.iter().flatten().map(|&v| v as f32).collect();
    Ok(Tensor::from_vec(flat, (rows.len(), dim), &Device::Cpu)?)
}

/// Mean of sub-token vectors for each word encoded on its own; `None` when a
/// word yields no tokens.
pub fn isolated_word_vectors(encoder: &TextEncoder, words: &[&str]) -> Result<Vec<Option<Vec<f64>>>> {
    let mut out = Vec::with_capacity(words.len());
    let mut ctx = ForwardCtx::eval();
    for chunk in words.chunks(128) {
        let ok: Vec<usize> = (0..chunk.len()).filter(|&i| !encoder.tokenizer().tokenize(chunk[i]).0.is_empty()).collect();
        let mut vecs: Vec<Option<Vec<f64>>> = vec![None; chunk.len()];
        if !ok.is_empty() {
            let texts: Vec<&str> = ok.iter().map(|&i| chunk[i]).collect();
            let batch = encoder.batch(&texts)?;
            let h: Vec<Vec<Vec<f64>>> = encoder.last4(&batch, &mut ctx)?.to_dtype(DType::F64)?.to_vec3()?;
            for ((&i, rows), offs) in ok.iter().zip(h).zip(&batch.offsets) {
                let content: Vec<&Vec<f64>> = rows.iter().zip(offs).filter(|(_, o)| o.is_some()).map(|(r, _)| r).collect();
                vecs[i] = Some(mean_rows(&content));
            }
        }
        out.extend(vecs);
    }
    Ok(out)
}

fn mean_rows(rows: &[&Vec<f64>]) -> Vec<f64> {
    let mut m = vec![0.0; rows[0].len()];
    for r in rows {
        for (a, b) in m.iter_mut().zip(r.iter()) {
            *a += b;
        }
    }
    let n = rows.len() as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

fn split_sizes(n: usize, frac: [f64; 3]) -> Result<(usize, usize, usize)> {
    if n < 3 {
        return Err(Error::Data(format!("a lexicon of {n} word(s) cannot be split into train/validation/test")));
    }
    let n_test = ((n as f64 * frac[2]).round() as usize).max(1);
    let n_val = ((n as f64 * frac[1]).round() as usize).max(1);
    if n_test + n_val >= n {
        return Err(Error::Data(format!("a lexicon of {n} words leaves no training words")));
    }
    Ok((n - n_val - n_test, n_val, n_test))
}

/// Trains the regressor on precomputed word vectors.
pub fn train_on_features(words: &[String], features: &[Vec<f64>], ratings: &[f64], cfg: &ConcretenessConfig) -> Result<ConcretenessModel> {
    if words.len() != features.len() || words.len() != ratings.len() {
        return Err(newsframe_core::Error::LengthMismatch { left: words.len(), right: features.len() }.into());
    }
    let (n_train, n_val, n_test) = split_sizes(words.len(), cfg.split)?;
    let dim = features[0].len();
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.split_seed));
    let (train_idx, rest) = order.split_at(n_train);
    let (val_idx, test_idx) = rest.split_at(n_val);

    // Standardization statistics from the training words only.
    let mut mean = vec![0.0; dim];
    for &i in train_idx {
        for (m, v) in mean.iter_mut().zip(&features[i]) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n_train as f64);
    let mut var = vec![0.0; dim];
    for &i in train_idx {
        for ((s, v), m) in var.iter_mut().zip(&features[i]).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let scale: Vec<f64> = var.iter().map(|s| (s / n_train as f64).sqrt().max(1e-6)).collect();

    let store = ParamStore::new(derive_seed(cfg.seed, "concreteness"), DType::F32, Device::Cpu);
    let p = store.root();
    let l1 = Linear::uniform(&p.pp("hidden"), dim, cfg.hidden)?;
    let mut l2 = Linear::uniform(&p.pp("output"), cfg.hidden, 1)?;
    let target_mean = train_idx.iter().map(|&i| ratings[i]).sum::<f64>() / n_train as f64;
    let b = Tensor::new(&[target_mean as f32], &Device::Cpu)?;
    let bias_var = store.trainable_vars().pop().expect("output bias");
    bias_var.set(&b)?;
    l2.bias = Some(bias_var.as_tensor().clone());
    let to_t = |v: &[f64]| Tensor::from_vec(v.iter().map(|&x| x as f32).collect::<Vec<_>>(), (1, dim), &Device::Cpu);
    let model_mean = to_t(&mean)?;
    let model_scale = to_t(&scale)?;
    let mut model = ConcretenessModel {
        store: store.clone(),
        l1,
        l2,
        mean: model_mean,
        scale: model_scale,
        input_dim: dim,
        split: SplitRecord {
            seed: cfg.split_seed,
            n_train,
            n_val,
            n_test,
            test_words: test_idx.iter().map(|&i| words[i].clone()).collect(),
        },
        val_pearson: None,
        test_pearson: None,
        skipped: Vec::new(),
        encoder: None,
        epochs_run: 0,
    };

    let rows = |idx: &[usize]| -> Vec<Vec<f64>> { idx.iter().map(|&i| features[i].clone()).collect() };
    let targets = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| ratings[i]).collect() };
    let x_val = rows(val_idx);
    let y_val = targets(val_idx);
    let mut opt = AdamW::new(store.trainable_vars(), ParamsAdamW { lr: cfg.learning_rate, weight_decay: 0.0, ..Default::default() })?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "concreteness/shuffle"));
    let mut best: Option<(f64, Vec<(String, Tensor)>)> = None;
    let mut since = 0;
    let mut train_order = train_idx.to_vec();
    for _ in 0..cfg.epochs {
        model.epochs_run += 1;
        train_order.shuffle(&mut rng);
        for chunk in train_order.chunks(cfg.batch_size) {
            let x = rows_tensor(&rows(chunk), dim)?;
            let y = Tensor::from_vec(targets(chunk).iter().map(|&v| v as f32).collect::<Vec<_>>(), chunk.len(), &Device::Cpu)?;
            let loss = model.forward(&x)?.sub(&y)?.sqr()?.mean_all()?;
            opt.backward_step(&loss)?;
        }
        let pred = model.predict_raw(&x_val)?;
        let mse = pred.iter().zip(&y_val).map(|(p, y)| (p - y) * (p - y)).sum::<f64>() / y_val.len() as f64;
        if !mse.is_finite() {
            return Err(Error::Diverged("concreteness regressor loss is not finite".into()));
        }
        if best.as_ref().is_none_or(|(b, _)| mse < *b) {
            best = Some((mse, store.snapshot()?));
            since = 0;
        } else {
            since += 1;
            if since >= cfg.patience {
                break;
            }
        }
    }
    if let Some((_, snap)) = best {
        store.restore(&snap)?;
    }
    let r = |idx: &[usize]| -> Result<Option<f64>> {
        let pred: Vec<f64> = model.predict_raw(&rows(idx))?.into_iter().map(clamp_rating).collect();
        Ok(pearson(&pred, &targets(idx)).ok())
    };
    let (val_r, test_r) = (r(val_idx)?, r(test_idx)?);
    model.val_pearson = val_r;
    model.test_pearson = test_r;
    Ok(model)
}

/// Encodes every lexicon word in isolation and trains the regressor.
pub fn train_concreteness(lexicon: &ConcretenessLexicon, encoder: &TextEncoder, cfg: &ConcretenessConfig) -> Result<ConcretenessModel> {
    if lexicon.is_empty() {
        return Err(newsframe_core::Error::Empty("lexicon").into());
    }
    let words: Vec<&str> = lexicon.entries.keys().map(String::as_str).collect();
    let vecs = isolated_word_vectors(encoder, &words)?;
    let mut kept_words = Vec::new();
    let mut feats = Vec::new();
    let mut ratings = Vec::new();
    let mut skipped = Vec::new();
    for (w, v) in words.iter().zip(vecs) {
        match v {
            Some(v) => {
                kept_words.push(w.to_string());
                feats.push(v);
                ratings.push(lexicon.entries[*w]);
            }
            None => skipped.push(w.to_string()),
        }
    }
    if !skipped.is_empty() {
        log::warn!("{} lexicon word(s) produced no tokens and were skipped", skipped.len());
    }
    let mut model = train_on_features(&kept_words, &feats, &ratings, cfg)?;
    model.skipped = skipped;
    model.encoder = Some(encoder.identifier.clone());
    Ok(model)
}

/// Scores headline words from their in-context sub-token vectors.
pub struct ContextScorer<'a> {
    pub model: &'a ConcretenessModel,
    pub encoder: &'a TextEncoder,
}

impl WordScorer for ContextScorer<'_> {
    type Error = Error;

    fn score(&mut self, text: &str, spans: &[Span], wanted: &[bool]) -> Result<Vec<f64>> {
        let (vectors, offsets) = match self.encoder.encode_text(text, TextMode::PerTokenLast4)? {
            TextEncoding::PerToken { vectors, offsets } => (vectors, offsets),
            TextEncoding::Pooled(_) => unreachable!("per-token mode requested"),
        };
        let mut feats = Vec::new();
        let mut slots = Vec::new();
        for (i, span) in spans.iter().enumerate() {
            if !wanted[i] {
                continue;
            }
            let inside: Vec<&Vec<f64>> =
                vectors.iter().zip(&offsets).filter(|(_, &(s, e))| s >= span.start && e <= span.end).map(|(v, _)| v).collect();
            let f = if inside.is_empty() {
                // Cut by truncation: fall back to the word on its own.
                match isolated_word_vectors(self.encoder, &[span.slice(text)])?.remove(0) {
                    Some(v) => v,
                    None => continue,
                }
            } else {
                mean_rows(&inside)
            };
            feats.push(f);
            slots.push(i);
        }
        let raw = self.model.predict_raw(&feats)?;
        let mut out = vec![f64::NAN; spans.len()];
        for (slot, r) in slots.into_iter().zip(raw) {
            out[slot] = r;
        }
        // Words with no usable vector get the scale midpoint.
        for (o, w) in out.iter_mut().zip(wanted) {
            if *w && o.is_nan() {
                *o = 3.0;
            }
        }
        Ok(out)
    }
}

/// Capitalized or all-caps words outside a common-word list count as entities.
pub struct CaseLexiconTagger {
    common: HashSet<String>,
}

impl CaseLexiconTagger {
    pub fn new<I: IntoIterator<Item = String>>(common_words: I) -> Self {
        CaseLexiconTagger { common: common_words.into_iter().map(|w| w.to_lowercase()).collect() }
    }
}

impl NeTagger for CaseLexiconTagger {
    fn tag(&self, text: &str, spans: &[Span]) -> Vec<bool> {
        spans
            .iter()
            .map(|s| {
                let w = s.slice(text);
                let capitalized = w.chars().next().is_some_and(char::is_uppercase);
                capitalized && !self.common.contains(&w.to_lowercase())
            })
            .collect()
    }
}

/// Matches known entity names (case-insensitive word sequences).
pub struct GazetteerTagger {
    names: Vec<Vec<String>>,
}

impl GazetteerTagger {
    pub fn new<I: IntoIterator<Item = String>>(names: I) -> Self {
        let mut names: Vec<Vec<String>> =
            names.into_iter().map(|n| n.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>()).filter(|n| !n.is_empty()).collect();
        names.sort_by_key(|n| std::cmp::Reverse(n.len()));
        GazetteerTagger { names }
    }

    /// One entity name per line.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(text.lines().map(str::to_string)))
    }
}

impl NeTagger for GazetteerTagger {
    fn tag(&self, text: &str, spans: &[Span]) -> Vec<bool> {
        let words: Vec<String> = spans.iter().map(|s| s.slice(text).to_lowercase()).collect();
        let mut out = vec![false; spans.len()];
        let mut i = 0;
        while i < words.len() {
            let hit = self.names.iter().find(|n| i + n.len() <= words.len() && words[i..i + n.len()] == n[..]);
            match hit {
                Some(n) => {
                    out[i..i + n.len()].iter_mut().for_each(|o| *o = true);
                    i += n.len();
                }
                None => i += 1,
            }
        }
        out
    }
}

/// Headline concreteness per frame using in-context word vectors.
pub fn corpus_frame_concreteness(
    corpus: &Corpus,
    model: &ConcretenessModel,
    encoder: &TextEncoder,
    tagger: &dyn NeTagger,
    options: &ConcretenessOptions,
) -> Result<FrameConcreteness> {
    let mut scorer = ContextScorer { model, encoder };
    frame_concreteness(corpus.articles.iter().map(|a| (a.frame, a.headline.as_str())), &mut scorer, tagger, options)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub frames: Vec<FrameObservation>,
    pub correlations: Vec<CorrelationEntry>,
    pub concreteness: FrameConcreteness,
    pub ne_tagger: String,
    pub regressor: Option<ConcretenessSummary>,
}

fn f1_by_frame(report: Option<&EvalReport>) -> Result<[Option<f64>; Frame::COUNT]> {
    let mut out = [None; Frame::COUNT];
    if let Some(r) = report {
        if r.spec.task != newsframe_core::Task::Frame {
            return Err(Error::Report("per-frame F1 needs a frame-task report".into()));
        }
        for (i, c) in r.aggregate.per_class.iter().enumerate().take(Frame::COUNT) {
            if !c.undefined {
                out[i] = Some(c.f1);
            }
        }
    }
    Ok(out)
}

/// Frame-level series and their correlations. Missing values drop the frame
/// from the affected pairs only.
pub fn correlation_report(
    corpus: &Corpus,
    concreteness: &FrameConcreteness,
    f1_all: Option<&EvalReport>,
    f1_relevant: Option<&EvalReport>,
    ne_tagger: &str,
    regressor: Option<ConcretenessSummary>,
) -> Result<CorrelationReport> {
    let stats = corpus.stats();
    let all = f1_by_frame(f1_all)?;
    let rel = f1_by_frame(f1_relevant)?;
    let frames: Vec<FrameObservation> = Frame::ALL
        .iter()
        .map(|&f| {
            let row = stats.row(f);
            FrameObservation {
                frame: f,
                concreteness: concreteness.get(f),
                relevance_ratio: (row.articles > 0).then_some(row.ratio),
                f1_relevant: rel[f.index()],
                f1_all: all[f.index()],
            }
        })
        .collect();
    let correlations = correlation_table(&frames);
    Ok(CorrelationReport { frames, correlations, concreteness: concreteness.clone(), ne_tagger: ne_tagger.to_string(), regressor })
}

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Report(format!("drawing failed: {e}"))
}

/// Bars of relevance ratio with a concreteness line on a second axis.
pub fn draw_concreteness_chart(report: &CorrelationReport, path: &Path) -> Result<()> {
    let root = SVGBackend::new(path, (1200, 520)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let n = Frame::COUNT as f64;
    let mut chart = ChartBuilder::on(&root)
        .caption("Relevance ratio and headline concreteness per frame", ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(60)
        .y_label_area_size(50)
        .right_y_label_area_size(50)
        .build_cartesian_2d(0f64..n, 0f64..100f64)
        .map_err(plot_err)?
        .set_secondary_coord(0f64..n, 1f64..5f64);
    chart
        .configure_mesh()
        .disable_x_mesh()
        .x_labels(Frame::COUNT * 2 + 1)
        .x_label_formatter(&|x| {
            let i = x.floor() as usize;
            if (x - i as f64 - 0.5).abs() < 1e-6 {
                Frame::from_index(i).map(|f| f.name().to_string()).unwrap_or_default()
            } else {
                String::new()
            }
        })
        .x_label_style(("sans-serif", 11))
        .y_desc("Relevant images (%)")
        .draw()
        .map_err(plot_err)?;
    chart.configure_secondary_axes().y_desc("Concreteness").draw().map_err(plot_err)?;
    let blue = RGBColor(31, 119, 180);
    chart
        .draw_series(report.frames.iter().enumerate().filter_map(|(i, f)| {
            f.relevance_ratio.map(|r| Rectangle::new([(i as f64 + 0.2, 0.0), (i as f64 + 0.8, 100.0 * r)], blue.filled()))
        }))
        .map_err(plot_err)?
        .label("relevance ratio")
        .legend(move |(x, y)| Rectangle::new([(x, y - 5), (x + 10, y + 5)], blue.filled()));
    let points: Vec<(f64, f64)> =
        report.frames.iter().enumerate().filter_map(|(i, f)| f.concreteness.map(|c| (i as f64 + 0.5, c))).collect();
    let red = RGBColor(214, 39, 40);
    chart
        .draw_secondary_series(LineSeries::new(points.clone(), red.stroke_width(2)))
        .map_err(plot_err)?
        .label("concreteness")
        .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 12, y)], red.stroke_width(2)));
    chart.draw_secondary_series(points.into_iter().map(|p| Circle::new(p, 4, red.filled()))).map_err(plot_err)?;
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .position(SeriesLabelPosition::UpperRight)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicon_validation() {
        assert!(ConcretenessLexicon::from_pairs([("Gun".to_string(), 4.9), ("gun".to_string(), 4.0)]).is_err());
        assert!(ConcretenessLexicon::from_pairs([("idea".to_string(), 0.5)]).is_err());
        let lex = ConcretenessLexicon::from_pairs([("Gun".to_string(), 4.9)]).unwrap();
        assert!(lex.contains("gun"));
    }

    #[test]
    fn single_word_cannot_be_split() {
        let err = train_on_features(&["a".into()], &[vec![1.0]], &[2.0], &ConcretenessConfig::default());
        assert!(err.is_err());
    }

    #[test]
    fn gazetteer_prefers_longest_names() {
        let t = GazetteerTagger::new(["New York".to_string(), "York".to_string()]);
        let text = "Shooting in New York today";
        let spans = newsframe_core::text::word_spans(text);
        assert_eq!(t.tag(text, &spans), vec![false, false, true, true, false]);
    }
}
