#![allow(dead_code)]

use std::path::Path;

use newsframe::dataset::Corpus;
use newsframe::encoders::EncoderSource;
use newsframe::models::TrainConfig;
use newsframe_core::record::{Article, ImageRecord};
use newsframe_core::Frame;

const FILLER: [&str; 12] = ["officials", "said", "new", "report", "week", "county", "after", "city", "local", "people", "today", "update"];

/// `n` articles, frames assigned round robin, with the frame name inside the
/// headline. The subject id equals the frame id, so SRE alone separates frames.
/// When `image_dir` is given a small PNG whose colour encodes the frame is
/// written for each article and linked as its cached image.
pub fn synthetic_corpus(n: usize, image_dir: Option<&Path>) -> Corpus {
    let mut articles = Vec::with_capacity(n);
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let frame = Frame::ALL[i % Frame::COUNT];
        let w = |k: usize| FILLER[(i * 7 + k * 5) % FILLER.len()];
        let id = format!("a{i:03}");
        articles.push(Article {
            article_id: id.clone(),
            headline: format!("{} {} {} {}", w(0), frame.name(), w(1), w(2)),
            url: format!("https://example.org/{id}"),
            frame,
            summary: format!("{} {} summary", w(3), w(4)),
            first3: format!("{} {}. {}.", w(5), w(6), w(7)),
            body: None,
        });
        let local_path = image_dir.map(|dir| {
            let p = dir.join(format!("{id}.png"));
            write_png(&p, frame, i);
            p.to_string_lossy().into_owned()
        });
        images.push(ImageRecord {
            article_id: id,
            image_uri: format!("https://example.org/img/{i}.png"),
            local_path,
            api_tags: vec![format!("tag{}", frame.id()), "news".into()],
            caption: format!("a photo of the {}", w(8)),
            subject_id: frame.id(),
            re_id: 17 + (i % 3) as u32,
            relevant: i % 2 == 0,
        });
    }
    Corpus::new(articles, images).expect("valid synthetic corpus")
}

fn write_png(path: &Path, frame: Frame, i: usize) {
    let base = (frame.index() * 28) as u8;
    let img = image::RgbImage::from_fn(24, 24, |x, y| image::Rgb([base, ((x + y) as usize * 5 + i) as u8, 255 - base]));
    img.save(path).expect("write png");
}

/// Small, fast settings for tests with scratch encoders.
pub fn tiny_config(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        learning_rate: 3e-3,
        weight_decay: 0.0,
        text_encoder: EncoderSource::ScratchTiny,
        image_encoder: EncoderSource::ScratchTiny,
        ..TrainConfig::default()
    }
}

/// Largest relative error between backprop and central differences over
/// sampled head parameters, with both encoders frozen and dropout off.
/// Relative error is `|a - n| / max(|a| + |n|, 1e-7)`.
pub fn head_gradient_error(kind: newsframe_core::HeadKind, samples_per_param: usize) -> f64 {
    use std::sync::Arc;

    use newsframe::encoders::nn::ForwardCtx;
    use newsframe::encoders::resnet::ResNetConfig;
    use newsframe::encoders::{ImageEncoder, Precision, TextEncoder};
    use newsframe::imaging::{ImageTensor, IMAGE_SIZE};
    use newsframe::models::{loss_from_logits, Example, ImageInput, LossKind, NeuralModel};
    use newsframe_core::sre::encode_sre;
    use rand::{Rng, SeedableRng};

    let corpus = synthetic_corpus(6, None);
    let texts: Vec<String> = corpus.articles.iter().map(|a| a.headline.clone()).collect();
    let mut text = TextEncoder::scratch_tiny(texts.iter().map(String::as_str), 3, Precision::F64).unwrap();
    text.freeze();
    let image = match kind {
        newsframe_core::HeadKind::Fusion => {
            let mut e = ImageEncoder::scratch(ResNetConfig::tiny(), 3, Precision::F64, "scratch:tiny").unwrap();
            e.freeze();
            Some(e)
        }
        _ => None,
    };
    let n = IMAGE_SIZE * IMAGE_SIZE * 3;
    let examples: Vec<Example> = corpus
        .articles
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let img = corpus.image(&a.article_id).unwrap();
            let pixels: Vec<f32> = (0..n).map(|k| ((k * (i + 3)) % 97) as f32 / 97.0 - 0.5).collect();
            Example {
                article_id: a.article_id.clone(),
                label: a.frame.index(),
                text: Some(a.headline.clone()),
                sre: Some(encode_sre(img.subject_id, img.re_id).unwrap()),
                frame: Some(a.frame),
                image: Some(ImageInput::Tensor(Arc::new(ImageTensor::from_chw(pixels).unwrap()))),
            }
        })
        .collect();
    let batch: Vec<&Example> = examples.iter().collect();
    let targets: Vec<usize> = examples.iter().map(|e| e.label).collect();
    let model = NeuralModel::new(kind, Some(text), image, 9, 11, 0.5, 0.1).unwrap();
    let loss = |m: &NeuralModel| {
        let logits = m.logits(&batch, &mut ForwardCtx::eval()).unwrap();
        loss_from_logits(&logits, &targets, LossKind::CrossEntropy).unwrap()
    };
    let grads = loss(&model).backward().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    let vars = model.trainable_vars();
    assert!(!vars.is_empty());
    for var in vars {
        let shape = var.shape().clone();
        let analytic: Vec<f64> = grads.get(var.as_tensor()).expect("gradient").flatten_all().unwrap().to_vec1().unwrap();
        let original: Vec<f64> = var.as_tensor().flatten_all().unwrap().to_vec1().unwrap();
        for _ in 0..samples_per_param {
            let k = rng.random_range(0..original.len());
            let eval_at = |delta: f64| {
                let mut v = original.clone();
                v[k] += delta;
                var.set(&candle_core::Tensor::from_vec(v, shape.clone(), &candle_core::Device::Cpu).unwrap()).unwrap();
                loss(&model).to_scalar::<f64>().unwrap()
            };
            let numeric = (eval_at(eps) - eval_at(-eps)) / (2.0 * eps);
            let a = analytic[k];
            worst = worst.max((a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-7));
        }
        var.set(&candle_core::Tensor::from_vec(original, shape, &candle_core::Device::Cpu).unwrap()).unwrap();
    }
    worst
}
