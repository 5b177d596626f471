//! Text and image encoders behind small contracts used by the model heads.

pub mod bert;
pub mod nn;
pub mod params;
pub mod resnet;
pub mod tokenizer;

use std::path::{Path, PathBuf};

use candle_core::{DType, Device, Tensor, Var, D};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{ImageTensor, IMAGE_SIZE};
use bert::{Bert, BertConfig};
pub use nn::ForwardCtx;
use params::ParamStore;
use resnet::{ResNet, ResNetConfig};
use tokenizer::WordPiece;

/// Mixes a tag into a seed so independent components draw independent streams.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes().chain(seed.to_le_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

impl Precision {
    pub fn dtype(self) -> DType {
        match self {
            Precision::F32 => DType::F32,
            Precision::F64 => DType::F64,
        }
    }
}

/// Where encoder weights come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum EncoderSource {
    /// Small randomly initialized architecture.
    ScratchTiny,
    /// Full-size architecture, randomly initialized.
    ScratchFull,
    /// Local directory with `config.json` and `model.safetensors`.
    Dir(PathBuf),
    /// Model-hub identifier, resolved in the local hub cache.
    Hub(String),
}

impl EncoderSource {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "scratch" | "scratch:tiny" => Ok(EncoderSource::ScratchTiny),
            "scratch:full" => Ok(EncoderSource::ScratchFull),
            _ => {
                if let Some(id) = s.strip_prefix("hub:") {
                    Ok(EncoderSource::Hub(id.to_string()))
                } else {
                    Ok(EncoderSource::Dir(PathBuf::from(s.strip_prefix("dir:").unwrap_or(s))))
                }
            }
        }
    }

    pub fn identifier(&self) -> String {
        match self {
            EncoderSource::ScratchTiny => "scratch:tiny".into(),
            EncoderSource::ScratchFull => "scratch:full".into(),
            EncoderSource::Dir(p) => format!("dir:{}", p.display()),
            EncoderSource::Hub(id) => format!("hub:{id}"),
        }
    }

    /// Local directory holding the weights, for directory and hub sources.
    pub fn resolve_dir(&self) -> Result<Option<PathBuf>> {
        match self {
            EncoderSource::Dir(p) => Ok(Some(p.clone())),
            EncoderSource::Hub(id) => hub_snapshot(id).map(Some),
            _ => Ok(None),
        }
    }
}

fn hub_snapshot(id: &str) -> Result<PathBuf> {
    let home = std::env::var_os("HF_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/huggingface")))
        .ok_or_else(|| Error::Config("cannot locate the model hub cache (set HF_HOME)".into()))?;
    let snaps = home.join("hub").join(format!("models--{}", id.replace('/', "--"))).join("snapshots");
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(&snaps)
        .map_err(|_| Error::Config(format!("model {id} not found in {}", snaps.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs.pop().ok_or_else(|| Error::Config(format!("model {id} has no snapshot in {}", snaps.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_vec_pretty(value)?).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextMode {
    PooledLast4,
    PerTokenLast4,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TextEncoding {
    Pooled(Vec<f64>),
    /// One row per content sub-token with its byte span in the input.
    PerToken {
        vectors: Vec<Vec<f64>>,
        offsets: Vec<(usize, usize)>,
    },
}

/// Padded token ids for a batch of texts.
pub struct TokenBatch {
    pub ids: Tensor,
    pub mask: Tensor,
    pub offsets: Vec<Vec<Option<(usize, usize)>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EncoderMeta {
    identifier: String,
    max_len: usize,
}

/// Contextual sub-word encoder producing last-four-layer representations.
pub struct TextEncoder {
    pub identifier: String,
    pub max_len: usize,
    tokenizer: WordPiece,
    store: ParamStore,
    model: Bert,
    trainable: bool,
}

impl TextEncoder {
    pub const WEIGHTS: &'static str = "model.safetensors";

    pub fn scratch(config: BertConfig, tokenizer: WordPiece, seed: u64, precision: Precision, identifier: &str) -> Result<Self> {
        if config.vocab_size != tokenizer.vocab_size() {
            return Err(Error::Config("vocabulary size does not match the encoder configuration".into()));
        }
        let store = ParamStore::new(derive_seed(seed, "text-encoder"), precision.dtype(), Device::Cpu);
        let model = Bert::new(&store.root(), &config)?;
        let max_len = config.max_position_embeddings.min(512);
        Ok(TextEncoder { identifier: identifier.to_string(), max_len, tokenizer, store, model, trainable: true })
    }

    /// Tiny configuration with a vocabulary covering `texts`.
    pub fn scratch_tiny<'a, I: IntoIterator<Item = &'a str>>(texts: I, seed: u64, precision: Precision) -> Result<Self> {
        let tok = WordPiece::build_vocab(texts, true)?;
        let cfg = BertConfig::tiny(tok.vocab_size());
        Self::scratch(cfg, tok, seed, precision, "scratch:tiny")
    }

    /// Loads `config.json`, `vocab.txt` and `model.safetensors` from a directory.
    pub fn from_dir(dir: &Path, identifier: &str, precision: Precision) -> Result<Self> {
        let config: BertConfig = read_json(&dir.join("config.json"))?;
        let lowercase = match read_json::<serde_json::Value>(&dir.join("tokenizer_config.json")) {
            Ok(v) => v.get("do_lower_case").and_then(|b| b.as_bool()).unwrap_or(true),
            Err(_) => true,
        };
        let tokenizer = WordPiece::from_vocab_file(&dir.join("vocab.txt"), lowercase)?;
        let meta: Option<EncoderMeta> = read_json(&dir.join("encoder.json")).ok();
        let weights = dir.join(Self::WEIGHTS);
        if !weights.exists() {
            return Err(Error::Encoder(format!("{} not found (convert checkpoints to safetensors)", weights.display())));
        }
        let mut enc = Self::scratch(config, tokenizer, 0, precision, identifier)?;
        let tensors =
            candle_core::safetensors::load(&weights, &Device::Cpu).map_err(|e| Error::Encoder(format!("{}: {e}", weights.display())))?;
        let report = enc.store.load_map(tensors, bert::checkpoint_name)?;
        if !report.missing.is_empty() {
            return Err(Error::Encoder(format!("checkpoint lacks {} tensor(s), e.g. {}", report.missing.len(), report.missing[0])));
        }
        if let Some(m) = meta {
            enc.max_len = m.max_len;
        }
        Ok(enc)
    }

    pub fn load(source: &EncoderSource, corpus_texts: &[&str], seed: u64, precision: Precision) -> Result<Self> {
        match source {
            EncoderSource::ScratchTiny => Self::scratch_tiny(corpus_texts.iter().copied(), seed, precision),
            EncoderSource::ScratchFull => {
                let tok = WordPiece::build_vocab(corpus_texts.iter().copied(), true)?;
                let cfg = BertConfig {
                    hidden_size: 768,
                    num_hidden_layers: 12,
                    num_attention_heads: 12,
                    intermediate_size: 3072,
                    max_position_embeddings: 512,
                    ..BertConfig::tiny(tok.vocab_size())
                };
                Self::scratch(cfg, tok, seed, precision, "scratch:full")
            }
            other => {
                let dir = other.resolve_dir()?.expect("directory source");
                Self::from_dir(&dir, &other.identifier(), precision)
            }
        }
    }

    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("config.json"), &self.model.config)?;
        write_json(&dir.join("tokenizer_config.json"), &serde_json::json!({ "do_lower_case": self.tokenizer.lowercase() }))?;
        write_json(&dir.join("encoder.json"), &EncoderMeta { identifier: self.identifier.clone(), max_len: self.max_len })?;
        self.tokenizer.save_vocab(&dir.join("vocab.txt"))?;
        self.store.save(&dir.join(Self::WEIGHTS))
    }

    pub fn config(&self) -> &BertConfig {
        &self.model.config
    }

    pub fn hidden_size(&self) -> usize {
        self.model.config.hidden_size
    }

    pub fn output_dim(&self) -> usize {
        4 * self.hidden_size()
    }

    pub fn separator(&self) -> &'static str {
        tokenizer::SEP
    }

    pub fn tokenizer(&self) -> &WordPiece {
        &self.tokenizer
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn dtype(&self) -> DType {
        self.store.dtype()
    }

    pub fn is_trainable(&self) -> bool {
        self.trainable
    }

    pub fn freeze(&mut self) {
        self.trainable = false;
    }

    pub fn unfreeze(&mut self) {
        self.trainable = true;
    }

    /// Trainable variables; empty while frozen.
    pub fn trainable_vars(&self) -> Vec<Var> {
        if self.trainable {
            self.store.trainable_vars()
        } else {
            Vec::new()
        }
    }

    pub fn batch(&self, texts: &[&str]) -> Result<TokenBatch> {
        let encs: Vec<_> = texts.iter().map(|t| self.tokenizer.encode(t, self.max_len)).collect();
        if let Some(i) = encs.iter().position(|e| e.content_len() == 0) {
            return Err(Error::Tokenizer(format!("text {:?} has no tokens", texts[i])));
        }
        let t = encs.iter().map(|e| e.ids.len()).max().unwrap_or(0);
        let pad = self.tokenizer.pad_id();
        let mut ids = Vec::with_capacity(encs.len() * t);
        let mut mask = Vec::with_capacity(encs.len() * t);
        for e in &encs {
            ids.extend(e.ids.iter().copied().chain(std::iter::repeat(pad)).take(t));
            mask.extend((0..t).map(|i| if i < e.ids.len() { 1u32 } else { 0 }));
        }
        let shape = (encs.len(), t);
        Ok(TokenBatch {
            ids: Tensor::from_vec(ids, shape, &Device::Cpu)?,
            mask: Tensor::from_vec(mask, shape, &Device::Cpu)?,
            offsets: encs.into_iter().map(|e| e.offsets).collect(),
        })
    }

    /// `[B, T, 4H]` concatenation of the last four layers.
    pub fn last4(&self, batch: &TokenBatch, ctx: &mut ForwardCtx) -> Result<Tensor> {
        let states = self.model.forward(&batch.ids, &batch.mask, ctx)?;
        let n = states.len();
        let out = Tensor::cat(&states[n - 4..], D::Minus1)?;
        Ok(if self.trainable { out } else { out.detach() })
    }

    /// `[B, 4H]` last-four representation at the classification token.
    pub fn pooled(&self, texts: &[&str], ctx: &mut ForwardCtx) -> Result<Tensor> {
        let batch = self.batch(texts)?;
        Ok(self.last4(&batch, ctx)?.narrow(1, 0, 1)?.squeeze(1)?)
    }

    pub fn encode_text(&self, text: &str, mode: TextMode) -> Result<TextEncoding> {
        let mut ctx = ForwardCtx::eval();
        let batch = self.batch(&[text])?;
        let h = self.last4(&batch, &mut ctx)?.squeeze(0)?.to_dtype(DType::F64)?;
        match mode {
            TextMode::PooledLast4 => Ok(TextEncoding::Pooled(h.get(0)?.to_vec1()?)),
            TextMode::PerTokenLast4 => {
                let rows: Vec<Vec<f64>> = h.to_vec2()?;
                let mut vectors = Vec::new();
                let mut offsets = Vec::new();
                for (row, off) in rows.into_iter().zip(&batch.offsets[0]) {
                    if let Some(o) = off {
                        vectors.push(row);
                        offsets.push(*o);
                    }
                }
                Ok(TextEncoding::PerToken { vectors, offsets })
            }
        }
    }
}

/// Convolutional image encoder with a `feature_dim` projection.
pub struct ImageEncoder {
    pub identifier: String,
    store: ParamStore,
    model: ResNet,
    trainable: bool,
}

impl ImageEncoder {
    pub const WEIGHTS: &'static str = "model.safetensors";

    pub fn scratch(config: ResNetConfig, seed: u64, precision: Precision, identifier: &str) -> Result<Self> {
        let store = ParamStore::new(derive_seed(seed, "image-encoder"), precision.dtype(), Device::Cpu);
        let model = ResNet::new(&store.root(), &config)?;
        Ok(ImageEncoder { identifier: identifier.to_string(), store, model, trainable: true })
    }

    /// Loads backbone weights from a directory; `config.json` is optional and
    /// defaults to the 50-layer layout. The projection layer is freshly
    /// initialized unless the checkpoint carries it.
    pub fn from_dir(dir: &Path, identifier: &str, seed: u64, precision: Precision) -> Result<Self> {
        let config: ResNetConfig = match dir.join("config.json") {
            p if p.exists() => read_json(&p)?,
            _ => ResNetConfig::resnet50(),
        };
        let enc = Self::scratch(config, seed, precision, identifier)?;
        let weights = dir.join(Self::WEIGHTS);
        let tensors =
            candle_core::safetensors::load(&weights, &Device::Cpu).map_err(|e| Error::Encoder(format!("{}: {e}", weights.display())))?;
        let report = enc.store.load_map(tensors, resnet::checkpoint_name)?;
        let missing: Vec<&String> = report.missing.iter().filter(|n| !n.starts_with("feature.")).collect();
        if !missing.is_empty() {
            return Err(Error::Encoder(format!("checkpoint lacks {} tensor(s), e.g. {}", missing.len(), missing[0])));
        }
        Ok(enc)
    }

    pub fn load(source: &EncoderSource, seed: u64, precision: Precision) -> Result<Self> {
        match source {
            EncoderSource::ScratchTiny => Self::scratch(ResNetConfig::tiny(), seed, precision, "scratch:tiny"),
            EncoderSource::ScratchFull => Self::scratch(ResNetConfig::resnet50(), seed, precision, "scratch:full"),
            other => {
                let dir = other.resolve_dir()?.expect("directory source");
                Self::from_dir(&dir, &other.identifier(), seed, precision)
            }
        }
    }

    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("config.json"), &self.model.config)?;
        self.store.save(&dir.join(Self::WEIGHTS))
    }

    pub fn feature_dim(&self) -> usize {
        self.model.config.feature_dim
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn dtype(&self) -> DType {
        self.store.dtype()
    }

    pub fn is_trainable(&self) -> bool {
        self.trainable
    }

    pub fn freeze(&mut self) {
        self.trainable = false;
    }

    pub fn unfreeze(&mut self) {
        self.trainable = true;
    }

    pub fn trainable_vars(&self) -> Vec<Var> {
        if self.trainable {
            self.store.trainable_vars()
        } else {
            Vec::new()
        }
    }

    /// `[B, 3, 224, 224]` to `[B, feature_dim]`.
    pub fn forward(&self, images: &Tensor, ctx: &mut ForwardCtx) -> Result<Tensor> {
        let out = self.model.forward(images, ctx)?;
        Ok(if self.trainable { out } else { out.detach() })
    }

    pub fn encode_image(&self, image: &ImageTensor) -> Result<Vec<f64>> {
        let x = images_to_tensor(&[image], self.dtype())?;
        let out = self.model.forward(&x, &mut ForwardCtx::eval())?;
        Ok(out.squeeze(0)?.to_dtype(DType::F64)?.to_vec1()?)
    }

    pub fn encode_images(&self, images: &[&ImageTensor]) -> Result<Vec<Vec<f64>>> {
        let x = images_to_tensor(images, self.dtype())?;
        let out = self.model.forward(&x, &mut ForwardCtx::eval())?;
        Ok(out.to_dtype(DType::F64)?.to_vec2()?)
    }
}

pub fn images_to_tensor(images: &[&ImageTensor], dtype: DType) -> Result<Tensor> {
    let mut data = Vec::with_capacity(images.len() * 3 * IMAGE_SIZE * IMAGE_SIZE);
    for img in images {
        data.extend_from_slice(img.data());
    }
    Ok(Tensor::from_vec(data, (images.len(), 3, IMAGE_SIZE, IMAGE_SIZE), &Device::Cpu)?.to_dtype(dtype)?)
}
