//! Lead-image download cache.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use newsframe_core::record::ImageRecord;
use serde::{Deserialize, Serialize};

use crate::dataset::cache_key;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: u32,
    pub concurrency: usize,
    pub retry_delay: Duration,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions { timeout: Duration::from_secs(20), retries: 2, concurrency: 8, retry_delay: Duration::from_millis(500) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchReport {
    pub fetched: usize,
    pub cached: usize,
    pub failed: usize,
    pub failures: BTreeMap<String, String>,
}

enum Outcome {
    Cached(PathBuf),
    Fetched(PathBuf),
    Failed(String),
}

fn non_empty(path: &Path) -> bool {
    fs::metadata(path).map(|m| m.is_file() && m.len() > 0).unwrap_or(false)
}

fn download(client: &reqwest::blocking::Client, url: &str) -> std::result::Result<Vec<u8>, String> {
    let resp = client.get(url).send().map_err(|e| format!("request failed: {e}"))?;
    let status = resp.status();
    if !status.is_success() {
        return Err(format!("HTTP {status}"));
    }
    let bytes = resp.bytes().map_err(|e| format!("reading body: {e}"))?;
    if bytes.is_empty() {
        return Err("zero-byte response".into());
    }
    image::guess_format(&bytes).map_err(|_| "response is not a readable image".to_string())?;
    Ok(bytes.to_vec())
}

fn fetch_one(client: &reqwest::blocking::Client, rec: &ImageRecord, dir: &Path, opts: &FetchOptions) -> Outcome {
    if let Some(p) = rec.local_path.as_deref().map(PathBuf::from) {
        if non_empty(&p) {
            return Outcome::Cached(p);
        }
    }
    let target = dir.join(cache_key(&rec.article_id));
    if non_empty(&target) {
        return Outcome::Cached(target);
    }
    if rec.image_uri.trim().is_empty() {
        return Outcome::Failed("no image_uri".into());
    }
    let mut last = String::new();
    for attempt in 0..=opts.retries {
        if attempt > 0 {
            std::thread::sleep(opts.retry_delay);
        }
        match download(client, &rec.image_uri) {
            Ok(bytes) => {
                let tmp = target.with_extension("part");
                let written = fs::write(&tmp, &bytes).and_then(|_| fs::rename(&tmp, &target));
                return match written {
                    Ok(()) => Outcome::Fetched(target),
                    Err(e) => Outcome::Failed(format!("writing cache file: {e}")),
                };
            }
            Err(e) => last = e,
        }
    }
    Outcome::Failed(last)
}

/// Downloads missing lead images into `cache_dir`, one file per article id.
///
/// Per-record failures are collected in the report and never abort the batch.
/// Each success sets the record's `local_path`.
pub fn fetch_images(records: &mut [ImageRecord], cache_dir: &Path, opts: &FetchOptions) -> Result<FetchReport> {
    fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    let client = reqwest::blocking::Client::builder()
        .timeout(opts.timeout)
        .user_agent(concat!("newsframe/", env!("CARGO_PKG_VERSION")))
        .build()
        .map_err(|e| Error::Config(format!("http client: {e}")))?;

    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<Option<Outcome>>> = Mutex::new((0..records.len()).map(|_| None).collect());
    let workers = opts.concurrency.clamp(1, records.len().max(1));
    let shared: &[ImageRecord] = records;
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= shared.len() {
                    break;
                }
                let out = fetch_one(&client, &shared[i], cache_dir, opts);
                outcomes.lock().expect("outcome lock")[i] = Some(out);
            });
        }
    });

    let mut report = FetchReport::default();
    let outcomes = outcomes.into_inner().expect("outcome lock");
    for (rec, out) in records.iter_mut().zip(outcomes) {
        match out.expect("every record processed") {
            Outcome::Cached(p) => {
                report.cached += 1;
                rec.local_path = Some(p.display().to_string());
            }
            Outcome::Fetched(p) => {
                report.fetched += 1;
                rec.local_path = Some(p.display().to_string());
            }
            Outcome::Failed(reason) => {
                report.failed += 1;
                log::warn!("image for {} not fetched: {reason}", rec.article_id);
                report.failures.insert(rec.article_id.clone(), reason);
            }
        }
    }
    Ok(report)
}
