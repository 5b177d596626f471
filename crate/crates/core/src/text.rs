//! Text input assembly and headline word segmentation.

use alloc::string::String;
use alloc::vec::Vec;

use crate::record::{Article, ImageRecord};
use crate::taxonomy::{Frame, ModalitySpec, Part};
use crate::{Error, Result};

/// Number of web-entity tags kept per image.
pub const API_TAG_LIMIT: usize = 10;

/// Joins the first [`API_TAG_LIMIT`] tags with single spaces.
pub fn api_sentence(tags: &[String]) -> String {
    let kept: Vec<&str> = tags.iter().take(API_TAG_LIMIT).map(String::as_str).collect();
    kept.join(" ")
}

/// Assembles the text input for `spec`.
///
/// Text parts are emitted in spec order and joined by `separator` surrounded
/// by single spaces. Non-text parts (SRE, raw image) are skipped. The frame
/// label part renders `frame`'s canonical name.
pub fn build_text(
    article: &Article,
    image: Option<&ImageRecord>,
    spec: &ModalitySpec,
    frame: Option<Frame>,
    separator: &str,
) -> Result<String> {
    let mut pieces: Vec<String> = Vec::with_capacity(spec.parts().len());
    for part in spec.parts() {
        let piece = match part {
            Part::Headline => article.headline.clone(),
            Part::Summary => article.summary.clone(),
            Part::First3 => article.first3.clone(),
            Part::Api => api_sentence(&require_image(article, image)?.api_tags),
            Part::Caption => require_image(article, image)?.caption.clone(),
            Part::FrameLabel => {
                // ModalitySpec already rejects this on the frame task.
                String::from(frame.ok_or(Error::MissingFrameLabel)?.name())
            }
            Part::Sre | Part::Image => {
                require_image(article, image)?;
                continue;
            }
        };
        pieces.push(piece);
    }
    let mut joint = String::from(" ");
    joint.push_str(separator);
    joint.push(' ');
    Ok(pieces.join(&joint))
}

fn require_image<'a>(article: &Article, image: Option<&'a ImageRecord>) -> Result<&'a ImageRecord> {
    image.ok_or_else(|| Error::MissingImage { article_id: article.article_id.clone() })
}

/// Byte span of a word inside a text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

/// Splits `text` into word tokens.
///
/// Whitespace separates tokens; leading and trailing punctuation is trimmed
/// from each token and tokens without any alphanumeric character are dropped.
pub fn word_spans(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    for raw in text.split_whitespace() {
        let start = raw.as_ptr() as usize - text.as_ptr() as usize;
        let trimmed_front = raw.trim_start_matches(|c: char| !c.is_alphanumeric());
        let trimmed = trimmed_front.trim_end_matches(|c: char| !c.is_alphanumeric());
        if trimmed.is_empty() {
            continue;
        }
        let s = start + (raw.len() - trimmed_front.len());
        spans.push(Span { start: s, end: s + trimmed.len() });
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::Task;
    use alloc::string::ToString;
    use alloc::vec;

    fn article() -> Article {
        Article {
            article_id: "a1".into(),
            headline: "GOP lawmaker calls for age restriction".into(),
            url: "http://example.com/a1".into(),
            frame: Frame::GunControl,
            summary: "Summary text.".into(),
            first3: "One. Two. Three.".into(),
            body: None,
        }
    }

    fn image(n_tags: usize) -> ImageRecord {
        ImageRecord {
            article_id: "a1".into(),
            image_uri: "http://example.com/a1.jpg".into(),
            local_path: None,
            api_tags: (0..n_tags).map(|i| alloc::format!("tag{i}")).collect(),
            caption: "A caption.".into(),
            subject_id: 4,
            re_id: 17,
            relevant: true,
        }
    }

    #[test]
    fn headline_only_is_verbatim() {
        let spec = ModalitySpec::parse(Task::Frame, "headline").unwrap();
        let text = build_text(&article(), None, &spec, None, "[SEP]").unwrap();
        assert_eq!(text, article().headline);
    }

    #[test]
    fn api_part_keeps_ten_tags() {
        let spec = ModalitySpec::parse(Task::Frame, "headline+api").unwrap();
        let text = build_text(&article(), Some(&image(12)), &spec, None, "[SEP]").unwrap();
        assert_eq!(text, "GOP lawmaker calls for age restriction [SEP] tag0 tag1 tag2 tag3 tag4 tag5 tag6 tag7 tag8 tag9");
    }

    #[test]
    fn frame_label_is_appended() {
        let spec = ModalitySpec::parse(Task::Relevance, "headline+api+frame").unwrap();
        let text = build_text(&article(), Some(&image(3)), &spec, Some(Frame::Politics), "[SEP]").unwrap();
        assert!(text.ends_with("[SEP] Politics"), "{text}");
    }

    #[test]
    fn missing_inputs_are_errors() {
        let spec = ModalitySpec::parse(Task::Frame, "headline+caption").unwrap();
        assert!(matches!(build_text(&article(), None, &spec, None, "[SEP]"), Err(Error::MissingImage { .. })));
        let spec = ModalitySpec::parse(Task::Relevance, "headline+frame").unwrap();
        assert_eq!(build_text(&article(), None, &spec, None, "[SEP]"), Err(Error::MissingFrameLabel));
    }

    #[test]
    fn word_spans_drop_punctuation() {
        let text = "Mass shootings `increasing' -- pose \"most serious threat\" in US, expert says";
        let words: Vec<String> = word_spans(text).iter().map(|s| s.slice(text).to_string()).collect();
        assert_eq!(words, vec!["Mass", "shootings", "increasing", "pose", "most", "serious", "threat", "in", "US", "expert", "says"]);
        let text = "pro-gun teens' rights";
        let words: Vec<&str> = word_spans(text).iter().map(|s| s.slice(text)).collect();
        assert_eq!(words, vec!["pro-gun", "teens", "rights"]);
    }
}
