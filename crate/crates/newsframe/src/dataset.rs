//! Annotation CSV schema, loading, saving and the on-disk corpus store.
//!
//! One row per article. The image columns may all be left empty for an
//! article without a lead image; otherwise `subject_id`, `re_id` and
//! `relevant` are required.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use newsframe_core::record::{Article, ImageRecord};
use newsframe_core::stats::{corpus_stats, StatsTable};
use newsframe_core::Frame;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

pub const COLUMNS: [&str; 12] = [
    "article_id",
    "headline",
    "url",
    "frame_id",
    "summary",
    "first3",
    "image_uri",
    "api_tags",
    "caption",
    "subject_id",
    "re_id",
    "relevant",
];

/// A validated, immutable corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub articles: Vec<Article>,
    pub images: Vec<ImageRecord>,
    image_index: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn new(articles: Vec<Article>, images: Vec<ImageRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &articles {
            a.validate()?;
            if !seen.insert(a.article_id.as_str()) {
                return Err(Error::Data(format!("duplicate article_id {:?}", a.article_id)));
            }
        }
        let mut image_index = BTreeMap::new();
        for (i, img) in images.iter().enumerate() {
            img.validate()?;
            if !seen.contains(img.article_id.as_str()) {
                return Err(Error::Data(format!("image record for unknown article {:?}", img.article_id)));
            }
            if image_index.insert(img.article_id.clone(), i).is_some() {
                return Err(Error::Data(format!("duplicate image record for {:?}", img.article_id)));
            }
        }
        Ok(Corpus { articles, images, image_index })
    }

    pub fn image(&self, article_id: &str) -> Option<&ImageRecord> {
        self.image_index.get(article_id).map(|&i| &self.images[i])
    }

    pub fn image_mut(&mut self, article_id: &str) -> Option<&mut ImageRecord> {
        self.image_index.get(article_id).map(|&i| &mut self.images[i])
    }

    pub fn stats(&self) -> StatsTable {
        corpus_stats(&self.articles, &self.images)
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    /// Articles whose lead image is annotated relevant.
    pub fn relevant_subset(&self) -> Corpus {
        let articles: Vec<Article> =
            self.articles.iter().filter(|a| self.image(&a.article_id).is_some_and(|i| i.relevant)).cloned().collect();
        let images = articles.iter().filter_map(|a| self.image(&a.article_id).cloned()).collect();
        Corpus::new(articles, images).expect("subset of a valid corpus is valid")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    article_id: String,
    headline: String,
    url: String,
    frame_id: String,
    summary: String,
    first3: String,
    image_uri: String,
    api_tags: String,
    caption: String,
    subject_id: String,
    re_id: String,
    relevant: String,
}

fn parse_row(row: Row) -> std::result::Result<(Article, Option<ImageRecord>), String> {
    let frame_id: u32 = row.frame_id.trim().parse().map_err(|_| format!("frame_id {:?} is not an integer", row.frame_id))?;
    let frame = Frame::from_id(frame_id).map_err(|e| e.to_string())?;
    let article = Article {
        article_id: row.article_id,
        headline: row.headline,
        url: row.url,
        frame,
        summary: row.summary,
        first3: row.first3,
        body: None,
    };
    article.validate().map_err(|e| e.to_string())?;

    let image_cols = [&row.image_uri, &row.api_tags, &row.caption, &row.subject_id, &row.re_id, &row.relevant];
    if image_cols.iter().all(|c| c.trim().is_empty()) {
        return Ok((article, None));
    }
    let api_tags: Vec<String> = if row.api_tags.trim().is_empty() {
        Vec::new()
    } else {
        serde_json::from_str(&row.api_tags).map_err(|e| format!("api_tags is not a JSON string array: {e}"))?
    };
    let int = |name: &str, v: &str| -> std::result::Result<u32, String> {
        v.trim().parse().map_err(|_| format!("{name} {v:?} is not an integer"))
    };
    let relevant = match row.relevant.trim() {
        "0" => false,
        "1" => true,
        other => return Err(format!("relevant {other:?} must be 0 or 1")),
    };
    let image = ImageRecord {
        article_id: article.article_id.clone(),
        image_uri: row.image_uri,
        local_path: None,
        api_tags,
        caption: row.caption,
        subject_id: int("subject_id", &row.subject_id)?,
        re_id: int("re_id", &row.re_id)?,
        relevant,
    };
    image.validate().map_err(|e| e.to_string())?;
    Ok((article, Some(image)))
}

/// Reads an annotation CSV from any reader; `source` names it in errors.
pub fn read_corpus<R: std::io::Read>(reader: R, source: &str) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != COLUMNS {
        let missing: Vec<&str> = COLUMNS.iter().copied().filter(|c| !got.contains(c)).collect();
        let message = if missing.is_empty() {
            format!("columns must appear in the order {}", COLUMNS.join(","))
        } else {
            format!("missing column(s): {}", missing.join(", "))
        };
        return Err(Error::Schema { path: source.to_string(), message });
    }

    let mut articles = Vec::new();
    let mut images = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let row_no = i + 1;
        let row_err = |message: String| Error::Row { path: source.to_string(), row: row_no, message };
        let row = rec.map_err(|e| row_err(e.to_string()))?;
        let (article, image) = parse_row(row).map_err(row_err)?;
        if !seen.insert(article.article_id.clone()) {
            return Err(row_err(format!("duplicate article_id {:?}", article.article_id)));
        }
        articles.push(article);
        images.extend(image);
    }
    Corpus::new(articles, images)
}

/// Loads and validates an annotation CSV. Data rows are numbered from 1.
pub fn load_corpus(path: &Path, schema_version: &str) -> Result<Corpus> {
    if schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported schema version {schema_version:?} (expected {SCHEMA_VERSION})")));
    }
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file, &path.display().to_string())
}

/// Serializes a corpus in the annotation CSV format.
pub fn write_corpus<W: std::io::Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(COLUMNS)?;
    for a in &corpus.articles {
        let row = match corpus.image(&a.article_id) {
            Some(img) => Row {
                article_id: a.article_id.clone(),
                headline: a.headline.clone(),
                url: a.url.clone(),
                frame_id: a.frame.id().to_string(),
                summary: a.summary.clone(),
                first3: a.first3.clone(),
                image_uri: img.image_uri.clone(),
                api_tags: serde_json::to_string(&img.api_tags)?,
                caption: img.caption.clone(),
                subject_id: img.subject_id.to_string(),
                re_id: img.re_id.to_string(),
                relevant: if img.relevant { "1" } else { "0" }.to_string(),
            },
            None => Row {
                article_id: a.article_id.clone(),
                headline: a.headline.clone(),
                url: a.url.clone(),
                frame_id: a.frame.id().to_string(),
                summary: a.summary.clone(),
                first3: a.first3.clone(),
                image_uri: String::new(),
                api_tags: String::new(),
                caption: String::new(),
                subject_id: String::new(),
                re_id: String::new(),
                relevant: String::new(),
            },
        };
        wtr.serialize(row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn corpus_to_bytes(corpus: &Corpus) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_corpus(corpus, &mut buf)?;
    Ok(buf)
}

/// Hex SHA-256 of the canonical CSV serialization.
pub fn checksum(corpus: &Corpus) -> Result<String> {
    Ok(hex::encode(Sha256::digest(corpus_to_bytes(corpus)?)))
}

/// Cache file stem for an article id. Characters outside `[A-Za-z0-9._-]`
/// are replaced so ids are safe as file names.
pub fn cache_key(article_id: &str) -> String {
    article_id.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' }).collect()
}

/// A directory holding `corpus.csv`, `stats.json` and an `images/` cache.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    pub root: PathBuf,
}

impl CorpusStore {
    pub const CORPUS_FILE: &'static str = "corpus.csv";
    pub const STATS_FILE: &'static str = "stats.json";

    pub fn new(root: impl Into<PathBuf>) -> Self {
        CorpusStore { root: root.into() }
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.root.join(Self::CORPUS_FILE)
    }

    pub fn default_image_dir(&self) -> PathBuf {
        self.root.join("images")
    }

    pub fn write(&self, corpus: &Corpus) -> Result<()> {
        fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))?;
        let bytes = corpus_to_bytes(corpus)?;
        fs::write(self.corpus_path(), bytes).map_err(|e| Error::io(self.corpus_path(), e))?;
        let stats = serde_json::to_vec_pretty(&corpus.stats())?;
        let p = self.root.join(Self::STATS_FILE);
        fs::write(&p, stats).map_err(|e| Error::io(p, e))?;
        Ok(())
    }

    /// Loads the corpus and attaches cached image paths found in `image_dir`.
    pub fn load(&self, image_dir: Option<&Path>) -> Result<Corpus> {
        let mut corpus = load_corpus(&self.corpus_path(), SCHEMA_VERSION)?;
        let dir = image_dir.map(Path::to_path_buf).unwrap_or_else(|| self.default_image_dir());
        attach_cached_images(&mut corpus, &dir);
        Ok(corpus)
    }
}

/// Sets `local_path` for every image whose cache file exists and is non-empty.
pub fn attach_cached_images(corpus: &mut Corpus, dir: &Path) {
    for img in &mut corpus.images {
        let p = dir.join(cache_key(&img.article_id));
        if fs::metadata(&p).map(|m| m.len() > 0).unwrap_or(false) {
            img.local_path = Some(p.display().to_string());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "article_id,headline,url,frame_id,summary,first3,image_uri,api_tags,caption,subject_id,re_id,relevant\n";

    #[test]
    fn header_only_is_empty() {
        let c = read_corpus(HEADER.as_bytes(), "t").unwrap();
        assert!(c.articles.is_empty() && c.images.is_empty());
    }

    #[test]
    fn bad_frame_names_row() {
        let data = format!("{HEADER}a,H1,u,1,,,,,,,,\nb,H2,u,10,,,,,,,,\nc,H3,u,2,,,,,,,,\n");
        match read_corpus(data.as_bytes(), "t") {
            Err(Error::Row { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_named() {
        let err = read_corpus("article_id,headline\n".as_bytes(), "t").unwrap_err();
        assert!(err.to_string().contains("frame_id"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let data = format!("{HEADER}a,H1,u,1,,,,,,,,\na,H2,u,1,,,,,,,,\n");
        assert!(matches!(read_corpus(data.as_bytes(), "t"), Err(Error::Row { row: 2, .. })));
    }

    #[test]
    fn cache_keys_are_file_safe() {
        assert_eq!(cache_key("a/b c.jpg"), "a_b_c.jpg");
    }
}
