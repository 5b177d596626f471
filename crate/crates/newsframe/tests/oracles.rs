//! Encoder outputs against fixtures produced by the reference Python
//! implementations (see fixtures/gen_oracles.py).

use std::path::PathBuf;

use candle_core::DType;
use newsframe::encoders::nn::ForwardCtx;
use newsframe::encoders::{ImageEncoder, Precision, TextEncoder, TextEncoding, TextMode};
use newsframe::imaging::{ImageTensor, IMAGE_SIZE};
use serde::Deserialize;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[derive(Deserialize)]
struct BertCase {
    text: String,
    ids: Vec<u32>,
    last4: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct BertExpected {
    cases: Vec<BertCase>,
}

fn bert_expected() -> BertExpected {
    serde_json::from_slice(&std::fs::read(fixture("bert_tiny_expected.json")).unwrap()).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn wordpiece_ids_match_reference_tokenizer() {
    let enc = TextEncoder::from_dir(&fixture("bert_tiny"), "fixture", Precision::F64).unwrap();
    for case in bert_expected().cases {
        let got = enc.tokenizer().encode(&case.text, 64);
        assert_eq!(got.ids, case.ids, "{}", case.text);
    }
}

#[test]
fn bert_last4_matches_reference_in_f64() {
    let enc = TextEncoder::from_dir(&fixture("bert_tiny"), "fixture", Precision::F64).unwrap();
    for case in bert_expected().cases {
        let batch = enc.batch(&[case.text.as_str()]).unwrap();
        let h: Vec<Vec<f64>> = enc.last4(&batch, &mut ForwardCtx::eval()).unwrap().squeeze(0).unwrap().to_vec2().unwrap();
        assert_eq!(h.len(), case.last4.len());
        for (row, want) in h.iter().zip(&case.last4) {
            assert!(max_abs_diff(row, want) < 1e-9, "{}: {}", case.text, max_abs_diff(row, want));
        }
    }
}

#[test]
fn bert_last4_matches_reference_in_f32() {
    let enc = TextEncoder::from_dir(&fixture("bert_tiny"), "fixture", Precision::F32).unwrap();
    let case = &bert_expected().cases[1];
    let pooled = match enc.encode_text(&case.text, TextMode::PooledLast4).unwrap() {
        TextEncoding::Pooled(v) => v,
        other => panic!("unexpected {other:?}"),
    };
    assert_eq!(pooled.len(), 4 * 32);
    assert!(max_abs_diff(&pooled, &case.last4[0]) < 1e-4);
}

#[test]
fn per_token_mode_drops_special_tokens() {
    let enc = TextEncoder::from_dir(&fixture("bert_tiny"), "fixture", Precision::F64).unwrap();
    let case = &bert_expected().cases[0];
    match enc.encode_text(&case.text, TextMode::PerTokenLast4).unwrap() {
        TextEncoding::PerToken { vectors, offsets } => {
            assert_eq!(vectors.len(), case.ids.len() - 2);
            assert_eq!(&case.text[offsets[0].0..offsets[0].1], "The");
            assert!(max_abs_diff(&vectors[0], &case.last4[1]) < 1e-9);
        }
        other => panic!("unexpected {other:?}"),
    }
}

fn pattern_image() -> ImageTensor {
    let n = IMAGE_SIZE;
    let mut data = Vec::with_capacity(3 * n * n);
    for c in 0..3 {
        for y in 0..n {
            for x in 0..n {
                let (c, y, x) = (c as f64, y as f64, x as f64);
                data.push(((1.3 * c + 0.07 * y + 0.11 * x).sin() + 0.25 * (0.05 * x * y / (c + 1.0)).cos()) as f32);
            }
        }
    }
    ImageTensor::from_chw(data).unwrap()
}

#[test]
fn bottleneck_network_matches_reference() {
    #[derive(Deserialize)]
    struct Expected {
        features: Vec<f64>,
    }
    let want: Expected = serde_json::from_slice(&std::fs::read(fixture("resnet_tiny_expected.json")).unwrap()).unwrap();
    let enc = ImageEncoder::from_dir(&fixture("resnet_tiny"), "fixture", 0, Precision::F64).unwrap();
    assert_eq!(enc.dtype(), DType::F64);
    let got = enc.encode_image(&pattern_image()).unwrap();
    assert!(max_abs_diff(&got, &want.features) < 1e-9, "{got:?}");
}
