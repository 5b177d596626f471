mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::time::Duration;

use newsframe::dataset::{cache_key, checksum, corpus_to_bytes, read_corpus, CorpusStore, COLUMNS};
use newsframe::fetch::{fetch_images, FetchOptions};
use newsframe::Error;
use newsframe_core::record::ImageRecord;

#[test]
fn csv_round_trip_preserves_corpus_and_checksum() {
    let corpus = common::synthetic_corpus(15, None);
    let bytes = corpus_to_bytes(&corpus).unwrap();
    let back = read_corpus(bytes.as_slice(), "mem").unwrap();
    assert_eq!(back.articles, corpus.articles);
    assert_eq!(back.images, corpus.images);
    assert_eq!(checksum(&back).unwrap(), checksum(&corpus).unwrap());
}

#[test]
fn checksum_ignores_cached_paths() {
    let dir = tempfile::tempdir().unwrap();
    let with = common::synthetic_corpus(5, Some(dir.path()));
    let without = common::synthetic_corpus(5, None);
    assert_eq!(checksum(&with).unwrap(), checksum(&without).unwrap());
}

#[test]
fn store_writes_stats_and_reattaches_images() {
    let dir = tempfile::tempdir().unwrap();
    let store = CorpusStore::new(dir.path().join("store"));
    let corpus = common::synthetic_corpus(9, None);
    store.write(&corpus).unwrap();
    let stats: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("store/stats.json")).unwrap()).unwrap();
    assert_eq!(stats["total_articles"], 9);
    let images = store.default_image_dir();
    std::fs::create_dir_all(&images).unwrap();
    std::fs::write(images.join(cache_key("a004")), b"bytes").unwrap();
    std::fs::write(images.join(cache_key("a005")), b"").unwrap();
    let loaded = store.load(None).unwrap();
    assert!(loaded.image("a004").unwrap().local_path.is_some());
    assert!(loaded.image("a005").unwrap().local_path.is_none());
}

#[test]
fn malformed_rows_name_the_row() {
    let corpus = common::synthetic_corpus(3, None);
    let text = String::from_utf8(corpus_to_bytes(&corpus).unwrap()).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    // Third data row: subject id out of range.
    assert!(lines[3].contains(",3,19,"));
    lines[3] = lines[3].replace(",3,19,", ",99,19,");
    let err = read_corpus(lines.join("\n").as_bytes(), "bad.csv").err().unwrap();
    match err {
        Error::Row { ref path, row, .. } => assert_eq!((path.as_str(), row), ("bad.csv", 3)),
        ref other => panic!("unexpected {other}"),
    }
    assert_eq!(err.exit_code(), newsframe::error::exit::DATA);
}

#[test]
fn articles_without_images_are_kept() {
    let header = COLUMNS.join(",");
    let csv = format!("{header}\nx1,Some headline,http://u,3,,,,,,,,\n");
    let corpus = read_corpus(csv.as_bytes(), "mem").unwrap();
    assert_eq!(corpus.len(), 1);
    assert!(corpus.image("x1").is_none());
}

fn png_bytes() -> Vec<u8> {
    let img = image::RgbImage::from_pixel(4, 4, image::Rgb([10, 20, 30]));
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png).unwrap();
    out.into_inner()
}

/// Minimal HTTP/1.1 server answering by path.
fn serve() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let png = png_bytes();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let png = png.clone();
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut first = String::new();
                reader.read_line(&mut first).unwrap();
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                        break;
                    }
                }
                let path = first.split_whitespace().nth(1).unwrap_or("/").to_string();
                let (status, body): (&str, Vec<u8>) = match path.as_str() {
                    p if p.starts_with("/ok") => ("200 OK", png),
                    "/empty" => ("200 OK", Vec::new()),
                    "/text" => ("200 OK", b"not an image".to_vec()),
                    _ => ("404 Not Found", b"missing".to_vec()),
                };
                let head = format!("HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n", body.len());
                let _ = stream.write_all(head.as_bytes());
                let _ = stream.write_all(&body);
            });
        }
    });
    format!("http://{addr}")
}

fn record(id: &str, uri: String) -> ImageRecord {
    ImageRecord {
        article_id: id.into(),
        image_uri: uri,
        local_path: None,
        api_tags: vec![],
        caption: String::new(),
        subject_id: 1,
        re_id: 17,
        relevant: true,
    }
}

#[test]
fn fetch_counts_new_cached_and_failed_images() {
    let base = serve();
    let cache = tempfile::tempdir().unwrap();
    std::fs::write(cache.path().join(cache_key("c/1")), png_bytes()).unwrap();
    let mut records = vec![
        record("n1", format!("{base}/ok1.png")),
        record("n2", format!("{base}/ok2.png")),
        record("c/1", format!("{base}/ok3.png")),
        record("m1", format!("{base}/missing")),
        record("e1", format!("{base}/empty")),
        record("t1", format!("{base}/text")),
        record("u1", "http://127.0.0.1:1/unreachable.png".into()),
    ];
    let opts = FetchOptions { timeout: Duration::from_secs(5), retries: 1, concurrency: 3, retry_delay: Duration::from_millis(10) };
    let report = fetch_images(&mut records, cache.path(), &opts).unwrap();
    assert_eq!((report.fetched, report.cached, report.failed), (2, 1, 4), "{report:?}");
    for id in ["m1", "e1", "t1", "u1"] {
        assert!(report.failures.contains_key(id), "{id}");
    }
    assert!(records[0].local_path.is_some() && records[2].local_path.is_some());
    assert!(records[3].local_path.is_none());
    // Second pass: everything that succeeded is now cached.
    let again = fetch_images(&mut records[..3], cache.path(), &opts).unwrap();
    assert_eq!((again.fetched, again.cached, again.failed), (0, 3, 0));
}
