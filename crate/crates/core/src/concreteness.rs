//! Word and frame concreteness aggregation.
//!
//! Ratings live on the 1 (abstract) to 5 (concrete) scale. Named entities are
//! fixed at the top of the scale; every other word takes the regressor's
//! prediction clamped into range.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::taxonomy::Frame;
use crate::text::{word_spans, Span};

pub const MIN_RATING: f64 = 1.0;
pub const MAX_RATING: f64 = 5.0;
/// Rating assigned to named-entity tokens.
pub const NAMED_ENTITY_RATING: f64 = 5.0;

pub fn clamp_rating(raw: f64) -> f64 {
    raw.clamp(MIN_RATING, MAX_RATING)
}

/// Concreteness of one word. `predict` is only invoked for non-entities.
pub fn word_concreteness<F: FnOnce() -> f64>(is_named_entity: bool, predict: F) -> f64 {
    if is_named_entity {
        NAMED_ENTITY_RATING
    } else {
        clamp_rating(predict())
    }
}

/// Marks which word spans of a text are named entities.
pub trait NeTagger {
    fn tag(&self, text: &str, spans: &[Span]) -> Vec<bool>;
}

/// Produces raw (unclamped) concreteness predictions for words in context.
pub trait WordScorer {
    type Error;

    /// Returns one prediction per entry of `spans`; only the entries whose
    /// `wanted` flag is set are read by the caller.
    fn score(&mut self, text: &str, spans: &[Span], wanted: &[bool]) -> Result<Vec<f64>, Self::Error>;
}

#[derive(Debug, Clone, Default)]
pub struct ConcretenessOptions {
    /// Lowercased words left out of the average (e.g. stopwords).
    pub excluded_words: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub frame: Frame,
    pub mean: f64,
    pub n_tokens: usize,
    pub n_named_entities: usize,
    pub n_headlines: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameConcreteness {
    /// Scores in frame id order, only for frames with at least one counted token.
    pub scores: Vec<FrameScore>,
    /// Frames without headlines or without any countable token.
    pub excluded: Vec<Frame>,
}

impl FrameConcreteness {
    pub fn get(&self, frame: Frame) -> Option<f64> {
        self.scores.iter().find(|s| s.frame == frame).map(|s| s.mean)
    }
}

/// Averages word concreteness over every headline word token, grouped by frame.
pub fn frame_concreteness<'a, I, S, T>(
    headlines: I,
    scorer: &mut S,
    tagger: &T,
    options: &ConcretenessOptions,
) -> Result<FrameConcreteness, S::Error>
where
    I: IntoIterator<Item = (Frame, &'a str)>,
    S: WordScorer,
    T: NeTagger + ?Sized,
{
    // frame -> (running mean, tokens, entities, headlines). The running mean
    // stays exact when every word has the same score, unlike sum / n.
    let mut acc: BTreeMap<Frame, (f64, usize, usize, usize)> = BTreeMap::new();
    for (frame, text) in headlines {
        let slot = acc.entry(frame).or_insert((0.0, 0, 0, 0));
        slot.3 += 1;
        let spans: Vec<Span> = word_spans(text)
            .into_iter()
            .filter(|s| match &options.excluded_words {
                Some(ex) => !ex.contains(&s.slice(text).to_lowercase()),
                None => true,
            })
            .collect();
        if spans.is_empty() {
            continue;
        }
        let entities = tagger.tag(text, &spans);
        let wanted: Vec<bool> = entities.iter().map(|e| !e).collect();
        let raw = if wanted.iter().any(|w| *w) { scorer.score(text, &spans, &wanted)? } else { Vec::new() };
        for (i, is_ne) in entities.iter().enumerate() {
            slot.1 += 1;
            slot.0 += (word_concreteness(*is_ne, || raw[i]) - slot.0) / slot.1 as f64;
            slot.2 += usize::from(*is_ne);
        }
    }

    let mut scores = Vec::new();
    let mut excluded = Vec::new();
    for frame in Frame::ALL {
        match acc.get(&frame) {
            Some(&(mean, n, ne, h)) if n > 0 => scores.push(FrameScore { frame, mean, n_tokens: n, n_named_entities: ne, n_headlines: h }),
            _ => excluded.push(frame),
        }
    }
    Ok(FrameConcreteness { scores, excluded })
}

/// A small English stopword list for the optional exclusion flag.
pub const STOPWORDS: &[&str] = &[
    "a", "about", "after", "against", "all", "an", "and", "are", "as", "at", "be", "been", "before", "but", "by", "can", "could", "did",
    "do", "does", "for", "from", "had", "has", "have", "he", "her", "his", "how", "i", "if", "in", "into", "is", "it", "its", "may",
    "more", "not", "of", "on", "or", "our", "out", "over", "says", "she", "so", "than", "that", "the", "their", "them", "there", "these",
    "they", "this", "to", "up", "us", "was", "we", "were", "what", "when", "who", "why", "will", "with", "would", "you",
];

pub fn stopword_set() -> BTreeSet<String> {
    STOPWORDS.iter().map(|w| String::from(*w)).collect()
}
