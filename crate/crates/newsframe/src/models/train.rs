use candle_core::{DType, Tensor};
use candle_nn::{AdamW, Optimizer, ParamsAdamW};
use newsframe_core::logreg::LogisticRegression;
use newsframe_core::loss::{cross_entropy, focal_loss};
use newsframe_core::metrics::{argmax, softmax};
use newsframe_core::{HeadKind, ModalitySpec, Part};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::loss::{loss_from_logits, LossKind};
use super::neural::NeuralModel;
use super::{check_inputs, logreg_features, EpochLog, Example, Model, TrainConfig, TrainLog, TrainedModel};
use crate::encoders::nn::ForwardCtx;
use crate::encoders::{derive_seed, ImageEncoder, TextEncoder};
use crate::error::{Error, Result};

/// Trains the head for `kind` on `train_set`, selecting the best epoch on `val_set`.
///
/// With an empty validation set the final epoch is kept. Early stopping is
/// only applied to the fusion head.
pub fn train(kind: HeadKind, spec: &ModalitySpec, train_set: &[Example], val_set: &[Example], cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    if spec.head_kind() != kind {
        return Err(Error::Config(format!("modality {} needs a {:?} head, not {kind:?}", spec.key(), spec.head_kind())));
    }
    if train_set.is_empty() {
        return Err(newsframe_core::Error::Empty("training split").into());
    }
    let n_classes = spec.task().num_classes();
    for ex in train_set.iter().chain(val_set) {
        if ex.label >= n_classes {
            return Err(newsframe_core::Error::TargetOutOfRange { target: ex.label, n_classes }.into());
        }
        check_inputs(spec, ex)?;
    }
    let mut log = TrainLog::default();
    let mut counts = vec![0usize; n_classes];
    for ex in train_set {
        counts[ex.label] += 1;
    }
    for (c, &n) in counts.iter().enumerate() {
        if n == 0 {
            let msg = format!("class {} ({}) has no training examples", spec.task().class_id(c), spec.task().class_name(c));
            log::warn!("{msg}");
            log.warnings.push(msg);
        }
    }

    let model = match kind {
        HeadKind::Majority => {
            let total = train_set.len() as f64;
            Model::Majority { priors: counts.iter().map(|&n| n as f64 / total).collect() }
        }
        HeadKind::SreLogReg => {
            let with_frame = spec.contains(Part::FrameLabel);
            let xs = train_set.iter().map(|e| logreg_features(e, with_frame)).collect::<Result<Vec<_>>>()?;
            let ys: Vec<usize> = train_set.iter().map(|e| e.label).collect();
            let (m, fit) = LogisticRegression::fit(&xs, &ys, n_classes, &cfg.logreg)?;
            log.logreg_converged = Some(fit.converged);
            Model::LogReg { model: m, with_frame }
        }
        HeadKind::TextFineTune | HeadKind::SreAugmentedText => {
            let text = load_text(train_set, cfg)?;
            let m = NeuralModel::new(kind, Some(text), None, n_classes, cfg.seed, cfg.fusion_dropout, cfg.text_head_dropout)?;
            let l = train_loop(&m, train_set, val_set, cfg, false, "head")?;
            log.epochs = l.epochs;
            log.best_epoch = l.best_epoch;
            Model::Neural(Box::new(m))
        }
        HeadKind::ImageClassifier => {
            let image = ImageEncoder::load(&cfg.image_encoder, cfg.seed, cfg.precision)?;
            let m = NeuralModel::new(kind, None, Some(image), n_classes, cfg.seed, cfg.fusion_dropout, cfg.text_head_dropout)?;
            let l = train_loop(&m, train_set, val_set, cfg, false, "head")?;
            log.epochs = l.epochs;
            log.best_epoch = l.best_epoch;
            Model::Neural(Box::new(m))
        }
        HeadKind::Fusion => {
            let text = load_text(train_set, cfg)?;
            let mut stage =
                NeuralModel::new(HeadKind::TextFineTune, Some(text), None, n_classes, cfg.seed, cfg.fusion_dropout, cfg.text_head_dropout)?;
            let text_log = train_loop(&stage, train_set, val_set, cfg, false, "text-stage")?;
            let mut text = stage.text.take().expect("text encoder");
            if !cfg.fusion_text_trainable {
                text.freeze();
            }
            let image = ImageEncoder::load(&cfg.image_encoder, cfg.seed, cfg.precision)?;
            let m = NeuralModel::new(kind, Some(text), Some(image), n_classes, cfg.seed, cfg.fusion_dropout, cfg.text_head_dropout)?;
            let l = train_loop(&m, train_set, val_set, cfg, true, "fusion")?;
            log.epochs = l.epochs;
            log.best_epoch = l.best_epoch;
            log.stopped_early = l.stopped_early;
            log.text_stage = Some(Box::new(text_log));
            Model::Neural(Box::new(m))
        }
    };
    Ok(TrainedModel { spec: spec.clone(), kind, config: cfg.clone(), n_classes, model, log })
}

fn load_text(train_set: &[Example], cfg: &TrainConfig) -> Result<TextEncoder> {
    let texts: Vec<&str> = train_set.iter().filter_map(|e| e.text.as_deref()).collect();
    TextEncoder::load(&cfg.text_encoder, &texts, cfg.seed, cfg.precision)
}

/// Validation accuracy and mean loss.
pub(crate) fn evaluate(model: &NeuralModel, set: &[Example], loss: LossKind) -> Result<(f64, f64)> {
    let refs: Vec<&Example> = set.iter().collect();
    let logits = model.eval_logits(&refs)?;
    let mut correct = 0usize;
    let mut total_loss = 0.0;
    for (ex, l) in set.iter().zip(&logits) {
        correct += usize::from(argmax(l) == ex.label);
        let p = softmax(l);
        total_loss += match loss {
            LossKind::CrossEntropy => cross_entropy(&p, ex.label)?,
            LossKind::Focal { gamma } => focal_loss(&p, ex.label, gamma)?,
        };
    }
    let n = set.len() as f64;
    Ok((correct as f64 / n, total_loss / n))
}

/// One optimization step on a batch; returns the batch loss.
pub(crate) fn step(model: &NeuralModel, opt: &mut AdamW, batch: &[&Example], loss: LossKind, ctx: &mut ForwardCtx) -> Result<f64> {
    let logits = model.logits(batch, ctx)?;
    let targets: Vec<usize> = batch.iter().map(|e| e.label).collect();
    let l: Tensor = loss_from_logits(&logits, &targets, loss)?;
    let value = l.to_dtype(DType::F64)?.to_scalar::<f64>()?;
    if !value.is_finite() {
        return Err(Error::Diverged(format!("loss became {value}")));
    }
    opt.backward_step(&l)?;
    Ok(value)
}

pub(crate) fn optimizer(model: &NeuralModel, cfg: &TrainConfig) -> Result<AdamW> {
    let params = ParamsAdamW { lr: cfg.learning_rate, weight_decay: cfg.weight_decay, ..ParamsAdamW::default() };
    Ok(AdamW::new(model.trainable_vars(), params)?)
}

pub(crate) fn train_loop(
    model: &NeuralModel,
    train_set: &[Example],
    val_set: &[Example],
    cfg: &TrainConfig,
    early_stop: bool,
    tag: &str,
) -> Result<TrainLog> {
    let mut opt = optimizer(model, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &format!("{tag}/shuffle")));
    let mut log = TrainLog::default();
    // (accuracy, loss, epoch, weights)
    let mut best: Option<(f64, f64, usize, Vec<Vec<(String, Tensor)>>)> = None;
    let mut since_best = 0usize;
    for epoch in 1..=cfg.epochs {
        let mut order: Vec<usize> = (0..train_set.len()).collect();
        order.shuffle(&mut rng);
        let mut ctx = ForwardCtx::train(derive_seed(cfg.seed, &format!("{tag}/dropout/{epoch}")));
        let mut total = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&Example> = chunk.iter().map(|&i| &train_set[i]).collect();
            total += step(model, &mut opt, &batch, cfg.loss, &mut ctx)? * batch.len() as f64;
        }
        let train_loss = total / train_set.len() as f64;
        let (val_accuracy, val_loss) = if val_set.is_empty() {
            (None, None)
        } else {
            let (a, l) = evaluate(model, val_set, cfg.loss)?;
            (Some(a), Some(l))
        };
        log::debug!("{tag} epoch {epoch}: loss {train_loss:.4} val {val_accuracy:?}");
        log.epochs.push(EpochLog { epoch, train_loss, val_accuracy, val_loss });
        if let (Some(a), Some(l)) = (val_accuracy, val_loss) {
            let improved = match &best {
                None => true,
                Some((ba, bl, _, _)) => a > *ba || (a == *ba && l < *bl),
            };
            if improved {
                best = Some((a, l, epoch, model.snapshot()?));
                since_best = 0;
            } else {
                since_best += 1;
            }
            if early_stop && since_best >= cfg.early_stop_patience {
                log.stopped_early = true;
                break;
            }
        }
    }
    match best {
        Some((_, _, epoch, snap)) => {
            model.restore(&snap)?;
            log.best_epoch = Some(epoch);
        }
        None => log.best_epoch = log.epochs.last().map(|e| e.epoch),
    }
    Ok(log)
}
