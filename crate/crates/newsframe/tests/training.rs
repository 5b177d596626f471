mod common;

use newsframe::evaluation::{build_examples, prepare, run_experiment, ExperimentSpec, Subset};
use newsframe::models::{load_model, predict, train, Example, LossKind};
use newsframe::Error;
use newsframe_core::{HeadKind, ModalitySpec, Task};

fn examples(corpus: &newsframe::dataset::Corpus, task: Task, key: &str) -> (ModalitySpec, Vec<Example>) {
    let spec = ModalitySpec::parse(task, key).unwrap();
    let ex = build_examples(&spec, corpus, "[SEP]").unwrap();
    (spec, ex)
}

#[test]
fn fusion_gradients_match_finite_differences() {
    let err = common::head_gradient_error(HeadKind::Fusion, 6);
    assert!(err <= 1e-4, "relative error {err}");
}

#[test]
fn sre_augmented_gradients_match_finite_differences() {
    let err = common::head_gradient_error(HeadKind::SreAugmentedText, 12);
    assert!(err <= 1e-4, "relative error {err}");
}

#[test]
fn sre_logreg_separates_subjects() {
    let corpus = common::synthetic_corpus(36, None);
    let mut spec = ExperimentSpec::new(Task::Frame, Subset::All, "sre");
    spec.seeds = vec![0];
    let report = run_experiment(&spec, &corpus, None).unwrap();
    assert_eq!(report.head, HeadKind::SreLogReg);
    assert_eq!(report.aggregate.mean_accuracy, 1.0);
}

#[test]
fn majority_predicts_most_frequent_training_class() {
    let corpus = common::synthetic_corpus(20, None);
    let (spec, ex) = examples(&corpus, Task::Relevance, "majority");
    // Ten relevant, ten not: drop one non-relevant item so relevant wins.
    let train_set: Vec<Example> = ex.into_iter().filter(|e| e.article_id != "a001").collect();
    let m = train(HeadKind::Majority, &spec, &train_set, &[], &common::tiny_config(1)).unwrap();
    for e in &train_set {
        assert_eq!(predict(&m, e).unwrap().label, 1);
    }
}

#[test]
fn head_kind_must_match_modality() {
    let corpus = common::synthetic_corpus(10, None);
    let (spec, ex) = examples(&corpus, Task::Frame, "headline");
    let err = train(HeadKind::SreLogReg, &spec, &ex, &[], &common::tiny_config(1)).err().unwrap();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn empty_training_split_is_rejected() {
    let corpus = common::synthetic_corpus(4, None);
    let (spec, _) = examples(&corpus, Task::Frame, "headline");
    assert!(train(HeadKind::TextFineTune, &spec, &[], &[], &common::tiny_config(1)).is_err());
}

#[test]
fn image_modality_without_cached_images_is_a_data_error() {
    let corpus = common::synthetic_corpus(8, None);
    let spec = ModalitySpec::parse(Task::Frame, "image").unwrap();
    let err = build_examples(&spec, &corpus, "[SEP]").err().unwrap();
    assert_eq!(err.exit_code(), newsframe::error::exit::DATA);
}

#[test]
fn identical_seeds_give_identical_reports() {
    let corpus = common::synthetic_corpus(20, None);
    let mut spec = ExperimentSpec::new(Task::Frame, Subset::All, "headline+sre");
    spec.seeds = vec![3];
    spec.folds.k = 2;
    spec.train_config = common::tiny_config(2);
    let a = serde_json::to_vec(&run_experiment(&spec, &corpus, None).unwrap()).unwrap();
    let b = serde_json::to_vec(&run_experiment(&spec, &corpus, None).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn validation_split_only_for_neural_heads() {
    let corpus = common::synthetic_corpus(40, None);
    for (key, wants_val) in [("headline", true), ("sre", false), ("majority", false)] {
        let mut spec = ExperimentSpec::new(Task::Frame, Subset::All, key);
        spec.seeds = vec![0];
        let p = prepare(&spec, &corpus).unwrap();
        let (train_set, val, test) = p.split(0).unwrap();
        assert_eq!(!val.is_empty(), wants_val, "{key}");
        assert_eq!(train_set.len() + val.len() + test.len(), 40);
        for v in &val {
            assert!(!test.iter().any(|t| t.article_id == v.article_id));
        }
    }
}

#[test]
fn saved_models_reload_with_identical_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::synthetic_corpus(12, Some(dir.path()));
    for key in ["headline+sre", "image+headline", "sre", "majority"] {
        let (spec, ex) = examples(&corpus, Task::Frame, key);
        let (train_set, val) = ex.split_at(9);
        let m = train(spec.head_kind(), &spec, train_set, val, &common::tiny_config(2)).unwrap();
        let out = dir.path().join(key.replace('+', "_"));
        m.save(&out, None).unwrap();
        let back = load_model(&out).unwrap();
        for e in &ex {
            assert_eq!(predict(&m, e).unwrap(), predict(&back, e).unwrap(), "{key}");
        }
    }
}

#[test]
fn fusion_trains_text_stage_first_and_may_stop_early() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::synthetic_corpus(12, Some(dir.path()));
    let (spec, ex) = examples(&corpus, Task::Frame, "image+headline+caption");
    let mut cfg = common::tiny_config(8);
    cfg.early_stop_patience = 1;
    let (train_set, val) = ex.split_at(9);
    let m = train(HeadKind::Fusion, &spec, train_set, val, &cfg).unwrap();
    let stage = m.log.text_stage.as_ref().expect("text stage log");
    assert_eq!(stage.epochs.len(), 8);
    assert!(m.log.epochs.len() <= 8);
    if m.log.stopped_early {
        assert!(m.log.epochs.len() < 8);
    }
    let best = m.log.best_epoch.unwrap();
    let best_acc = m.log.epochs[best - 1].val_accuracy.unwrap();
    assert!(m.log.epochs.iter().all(|e| e.val_accuracy.unwrap() <= best_acc));
}

#[test]
fn focal_loss_trains() {
    let corpus = common::synthetic_corpus(12, None);
    let (spec, ex) = examples(&corpus, Task::Frame, "headline");
    let mut cfg = common::tiny_config(2);
    cfg.loss = LossKind::Focal { gamma: 2.0 };
    let m = train(HeadKind::TextFineTune, &spec, &ex, &[], &cfg).unwrap();
    assert!(m.log.epochs.iter().all(|e| e.train_loss.is_finite()));
    assert_eq!(m.log.best_epoch, Some(2));
}

#[test]
fn relevance_fixture_is_balanced() {
    let corpus = common::synthetic_corpus(20, None);
    let (_, ex) = examples(&corpus, Task::Relevance, "headline+api+frame_label");
    assert_eq!(ex.iter().filter(|e| e.label == 1).count(), 10);
    assert!(ex[0].text.as_deref().unwrap().ends_with("Politics"), "{:?}", ex[0].text);
}
