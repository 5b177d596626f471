//! Per-frame corpus statistics.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::record::{Article, ImageRecord};
use crate::taxonomy::Frame;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStats {
    pub frame: Frame,
    pub name: alloc::string::String,
    pub articles: usize,
    pub relevant: usize,
    /// `relevant / articles`, 0 when the frame has no articles.
    pub ratio: f64,
    /// Ratio as a whole percent, rounded half up.
    pub percent: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsTable {
    /// One row per frame in id order.
    pub rows: Vec<FrameStats>,
    pub total_articles: usize,
    pub total_relevant: usize,
    pub total_ratio: f64,
    pub total_percent: u32,
}

impl StatsTable {
    pub fn row(&self, frame: Frame) -> &FrameStats {
        &self.rows[frame.index()]
    }
}

/// Whole percent of `num / den` rounded half up, computed in integers.
pub fn whole_percent(num: usize, den: usize) -> u32 {
    if den == 0 {
        return 0;
    }
    ((200 * num as u64 + den as u64) / (2 * den as u64)) as u32
}

/// Counts articles and relevant lead images per frame. Articles without an
/// image record count as having no relevant image.
pub fn corpus_stats(articles: &[Article], images: &[ImageRecord]) -> StatsTable {
    let relevant_ids: BTreeMap<&str, bool> = images.iter().map(|r| (r.article_id.as_str(), r.relevant)).collect();
    let mut counts = [(0usize, 0usize); Frame::COUNT];
    for a in articles {
        let slot = &mut counts[a.frame.index()];
        slot.0 += 1;
        if relevant_ids.get(a.article_id.as_str()).copied().unwrap_or(false) {
            slot.1 += 1;
        }
    }
    let rows: Vec<FrameStats> = Frame::ALL
        .iter()
        .map(|&frame| {
            let (n, r) = counts[frame.index()];
            FrameStats {
                frame,
                name: frame.name().into(),
                articles: n,
                relevant: r,
                ratio: if n == 0 { 0.0 } else { r as f64 / n as f64 },
                percent: whole_percent(r, n),
            }
        })
        .collect();
    let total_articles = rows.iter().map(|r| r.articles).sum();
    let total_relevant = rows.iter().map(|r| r.relevant).sum();
    StatsTable {
        rows,
        total_articles,
        total_relevant,
        total_ratio: if total_articles == 0 { 0.0 } else { total_relevant as f64 / total_articles as f64 },
        total_percent: whole_percent(total_relevant, total_articles),
    }
}
