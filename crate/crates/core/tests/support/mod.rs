//! Independent oracles for the metric and encoding checks.
//!
//! Shared by the core test suite and the workspace acceptance target, so it
//! only depends on `newsframe_core`, `rand` and `rand_chacha`.

#![allow(dead_code)]

use newsframe_core::agreement::agreement;
use newsframe_core::correlation::pearson;
use newsframe_core::loss::{cross_entropy, focal_loss};
use newsframe_core::metrics::{micro_accuracy, per_class_f1};
use newsframe_core::record::{Article, ImageRecord};
use newsframe_core::sre::{encode_sre, SRE_LEN};
use newsframe_core::text::{build_text, API_TAG_LIMIT};
use newsframe_core::{Frame, ModalitySpec, Part, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance for randomized oracle comparisons.
pub const ORACLE_TOL: f64 = 1e-9;
/// Tolerance against alpha values transcribed from the textbook (printed to three decimals).
pub const TEXTBOOK_ALPHA_TOL: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub fixtures: usize,
    pub worst: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst.is_finite() && self.worst <= self.tol
    }
}

fn labels(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..classes)).collect()
}

fn accuracy_oracle(gold: &[usize], pred: &[usize]) -> f64 {
    let mut hits = 0.0;
    for i in 0..gold.len() {
        if gold[i] == pred[i] {
            hits += 1.0;
        }
    }
    hits / gold.len() as f64
}

/// F1 through the count form 2tp / (2tp + fp + fn); 0 when nothing is predicted or gold.
fn f1_oracle(gold: &[usize], pred: &[usize], class: usize) -> f64 {
    let tp = gold.iter().zip(pred).filter(|(g, p)| **g == class && **p == class).count() as f64;
    let fp = gold.iter().zip(pred).filter(|(g, p)| **g != class && **p == class).count() as f64;
    let fn_ = gold.iter().zip(pred).filter(|(g, p)| **g == class && **p != class).count() as f64;
    if tp == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fn_)
    }
}

/// Raw-moment Pearson formula, algebraically equal to the centered one.
fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

fn random_distribution(rng: &mut ChaCha8Rng, classes: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..classes).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Alpha by enumerating ordered value pairs, with no coincidence matrix.
///
/// Observed disagreement sums, per unit, the mismatching ordered pairs weighted
/// by 1/(m_u - 1); expected disagreement counts mismatching ordered pairs over
/// all pairable values. Returns `None` when expected disagreement is zero.
pub fn alpha_oracle(codings: &[Vec<Option<u8>>]) -> Option<f64> {
    let n_items = codings[0].len();
    let mut pooled: Vec<u8> = Vec::new();
    let mut observed = 0.0;
    for item in 0..n_items {
        let unit: Vec<u8> = codings.iter().filter_map(|row| row[item]).collect();
        let m = unit.len();
        if m < 2 {
            continue;
        }
        let mut mismatches = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j && unit[i] != unit[j] {
                    mismatches += 1.0;
                }
            }
        }
        observed += mismatches / (m as f64 - 1.0);
        pooled.extend(unit);
    }
    let n = pooled.len() as f64;
    let mut expected = 0.0;
    for a in 0..pooled.len() {
        for b in 0..pooled.len() {
            if a != b && pooled[a] != pooled[b] {
                expected += 1.0;
            }
        }
    }
    if expected == 0.0 {
        return None;
    }
    let d_o = observed / n;
    let d_e = expected / (n * (n - 1.0));
    Some(1.0 - d_o / d_e)
}

fn random_codings(rng: &mut ChaCha8Rng) -> Vec<Vec<Option<u8>>> {
    let coders = rng.random_range(2..=5);
    let items = rng.random_range(3..=15);
    let values = rng.random_range(2..=5u8);
    (0..coders).map(|_| (0..items).map(|_| if rng.random_bool(0.2) { None } else { Some(rng.random_range(0..values)) }).collect()).collect()
}

/// Runs every randomized metric oracle on `fixtures` fixtures each.
pub fn metric_oracle_checks(fixtures: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0f64;
    let mut f1 = 0.0f64;
    let mut r = 0.0f64;
    let mut focal = 0.0f64;
    let mut alpha = 0.0f64;

    for _ in 0..fixtures {
        let n = rng.random_range(1..=40);
        let classes = rng.random_range(2..=9);
        let gold = labels(&mut rng, n, classes);
        let pred = labels(&mut rng, n, classes);
        acc = acc.max((micro_accuracy(&gold, &pred).unwrap() - accuracy_oracle(&gold, &pred)).abs());
        for class in 0..classes {
            let got = per_class_f1(&gold, &pred, class).unwrap().f1;
            f1 = f1.max((got - f1_oracle(&gold, &pred, class)).abs());
        }
    }

    for _ in 0..fixtures {
        let n = rng.random_range(3..=30);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + rng.random_range(-10.0..10.0)).collect();
        r = r.max((pearson(&x, &y).unwrap() - pearson_oracle(&x, &y)).abs());
    }

    for _ in 0..fixtures {
        let classes = rng.random_range(2..=9);
        let probs = random_distribution(&mut rng, classes);
        let target = rng.random_range(0..classes);
        let gamma = rng.random_range(0.0..5.0);
        let p = probs[target];
        let want = (1.0 - p).powf(gamma) * -p.ln();
        focal = focal.max((focal_loss(&probs, target, gamma).unwrap() - want).abs());
        let ce = cross_entropy(&probs, target).unwrap();
        focal = focal.max((focal_loss(&probs, target, 0.0).unwrap() - ce).abs());
    }

    let mut done = 0;
    while done < fixtures {
        let codings = random_codings(&mut rng);
        let Some(want) = alpha_oracle(&codings) else { continue };
        let got = agreement("random", &codings).unwrap();
        alpha = alpha.max((got.alpha - want).abs());
        done += 1;
    }

    vec![
        Check { name: "micro_accuracy", fixtures, worst: acc, tol: ORACLE_TOL },
        Check { name: "per_class_f1", fixtures, worst: f1, tol: ORACLE_TOL },
        Check { name: "pearson", fixtures, worst: r, tol: ORACLE_TOL },
        Check { name: "focal_loss", fixtures, worst: focal, tol: ORACLE_TOL },
        Check { name: "alpha", fixtures, worst: alpha, tol: ORACLE_TOL },
    ]
}

fn row(values: &str) -> Vec<Option<u8>> {
    values.split_whitespace().map(|v| v.parse().ok()).collect()
}

/// Krippendorff's textbook reliability data: four observers, twelve units,
/// `*` for a missing value. Nominal alpha is printed as 0.743.
pub fn textbook_four_observers() -> Vec<Vec<Option<u8>>> {
    vec![row("1 2 3 3 2 1 4 1 2 * * *"), row("1 2 3 3 2 2 4 1 2 5 * 3"), row("* 3 3 3 2 3 4 2 2 5 1 *"), row("1 2 3 3 2 4 4 1 2 5 1 *")]
}

/// Krippendorff's two-observer binary example; alpha is printed as 0.095.
pub fn textbook_two_observers() -> Vec<Vec<Option<u8>>> {
    vec![row("0 1 0 0 0 0 0 0 1 0"), row("1 1 1 0 0 1 0 0 0 0")]
}

pub fn textbook_alpha_checks() -> Vec<Check> {
    [("alpha_four_observers", textbook_four_observers(), 0.743), ("alpha_two_observers", textbook_two_observers(), 0.095)]
        .into_iter()
        .map(|(name, data, printed)| {
            let got = agreement(name, &data).unwrap().alpha;
            Check { name, fixtures: 1, worst: (got - printed).abs(), tol: TEXTBOOK_ALPHA_TOL }
        })
        .collect()
}

/// Checks the one-hot layout for all 48 subject / race-ethnicity pairs.
/// Returns the number of pairs with a wrong vector.
pub fn sre_failures() -> usize {
    let mut bad = 0;
    for subject in 1..=16u32 {
        for re in 17..=19u32 {
            let v = encode_sre(subject, re).unwrap();
            let sum: u32 = v.values().iter().map(|&b| u32::from(b)).sum();
            let layout = (1..=SRE_LEN).all(|p| v.at(p) == u8::from(p as u32 == subject || p as u32 == re));
            if sum != 2 || !layout {
                bad += 1;
            }
        }
    }
    bad
}

pub fn article(id: &str, headline: &str, frame: Frame) -> Article {
    Article {
        article_id: id.into(),
        headline: headline.into(),
        url: format!("http://example.org/{id}"),
        frame,
        summary: String::new(),
        first3: String::new(),
        body: None,
    }
}

pub fn image(id: &str, tags: Vec<String>, caption: &str) -> ImageRecord {
    ImageRecord {
        article_id: id.into(),
        image_uri: format!("http://example.org/{id}.jpg"),
        local_path: None,
        api_tags: tags,
        caption: caption.into(),
        subject_id: 1,
        re_id: 17,
        relevant: true,
    }
}

/// Randomized tag-list checks of the api part and the frame-label suffix.
/// Returns a description of the first violation.
pub fn build_text_violation(fixtures: usize, seed: u64) -> Option<String> {
    const SEP: &str = "[SEP]";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let api_only = ModalitySpec::new(Task::Relevance, vec![Part::Api]).unwrap();
    let with_label = ModalitySpec::new(Task::Relevance, vec![Part::Headline, Part::Api, Part::FrameLabel]).unwrap();
    for case in 0..fixtures {
        let n_tags = rng.random_range(0..=25);
        let tags: Vec<String> = (0..n_tags).map(|i| format!("tag{i}x{}", rng.random_range(0..1000))).collect();
        let frame = Frame::ALL[rng.random_range(0..Frame::COUNT)];
        let a = article("a", "Shooting at school", frame);
        let img = image("a", tags.clone(), "");

        let api = build_text(&a, Some(&img), &api_only, None, SEP).unwrap();
        let words: Vec<&str> = api.split_whitespace().collect();
        let kept = n_tags.min(API_TAG_LIMIT);
        if words.len() != kept || words.iter().zip(&tags).any(|(w, t)| *w != t) {
            return Some(format!("case {case}: {n_tags} tags gave api text {api:?}"));
        }

        let text = build_text(&a, Some(&img), &with_label, Some(frame), SEP).unwrap();
        let suffix = format!(" {SEP} {}", frame.name());
        if !text.ends_with(&suffix) || !text.starts_with("Shooting at school") {
            return Some(format!("case {case}: labelled text {text:?}"));
        }
        if text.matches(SEP).count() != 2 {
            return Some(format!("case {case}: separator count in {text:?}"));
        }
    }
    if ModalitySpec::new(Task::Frame, vec![Part::Headline, Part::FrameLabel]).is_ok() {
        return Some("frame task accepted a frame-label part".into());
    }
    None
}
