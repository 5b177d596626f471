//! Bidirectional transformer encoder with the usual BERT parameter names.

use candle_core::{Module, Tensor, D};
use serde::{Deserialize, Serialize};

use super::nn::{Embedding, ForwardCtx, LayerNorm, Linear};
use super::params::ParamPath;
use crate::error::{Error, Result};

fn default_eps() -> f64 {
    1e-12
}
fn default_dropout() -> f64 {
    0.1
}
fn default_type_vocab() -> usize {
    2
}
fn default_init_range() -> f64 {
    0.02
}
fn default_act() -> String {
    "gelu".into()
}

/// Subset of the standard `config.json` fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BertConfig {
    pub vocab_size: usize,
    pub hidden_size: usize,
    pub num_hidden_layers: usize,
    pub num_attention_heads: usize,
    pub intermediate_size: usize,
    pub max_position_embeddings: usize,
    #[serde(default = "default_type_vocab")]
    pub type_vocab_size: usize,
    #[serde(default = "default_eps")]
    pub layer_norm_eps: f64,
    #[serde(default = "default_dropout")]
    pub hidden_dropout_prob: f64,
    #[serde(default = "default_dropout")]
    pub attention_probs_dropout_prob: f64,
    #[serde(default = "default_init_range")]
    pub initializer_range: f64,
    #[serde(default = "default_act")]
    pub hidden_act: String,
}

impl BertConfig {
    /// A small configuration for training from scratch on tiny corpora.
    pub fn tiny(vocab_size: usize) -> Self {
        BertConfig {
            vocab_size,
            hidden_size: 32,
            num_hidden_layers: 4,
            num_attention_heads: 4,
            intermediate_size: 64,
            max_position_embeddings: 128,
            type_vocab_size: 2,
            layer_norm_eps: 1e-12,
            hidden_dropout_prob: 0.1,
            attention_probs_dropout_prob: 0.1,
            initializer_range: 0.02,
            hidden_act: "gelu".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_hidden_layers < 4 {
            return Err(Error::Config("the text encoder needs at least four layers for last-four pooling".into()));
        }
        if self.hidden_size % self.num_attention_heads != 0 {
            return Err(Error::Config("hidden_size must be divisible by num_attention_heads".into()));
        }
        if !matches!(self.hidden_act.as_str(), "gelu" | "gelu_new" | "relu") {
            return Err(Error::Config(format!("unsupported activation {}", self.hidden_act)));
        }
        Ok(())
    }
}

struct SelfAttention {
    query: Linear,
    key: Linear,
    value: Linear,
    heads: usize,
    head_dim: usize,
    dropout: f64,
}

impl SelfAttention {
    fn split(&self, x: &Tensor) -> Result<Tensor> {
        let (b, t, _) = x.dims3()?;
        Ok(x.reshape((b, t, self.heads, self.head_dim))?.transpose(1, 2)?.contiguous()?)
    }

    fn forward(&self, x: &Tensor, mask_add: &Tensor, ctx: &mut ForwardCtx) -> Result<Tensor> {
        let (b, t, h) = x.dims3()?;
        let q = self.split(&self.query.forward(x)?)?;
        let k = self.split(&self.key.forward(x)?)?;
        let v = self.split(&self.value.forward(x)?)?;
        let scores = (q.matmul(&k.t()?.contiguous()?)? / (self.head_dim as f64).sqrt())?;
        let scores = scores.broadcast_add(mask_add)?;
        let probs = candle_nn::ops::softmax(&scores, D::Minus1)?;
        let probs = ctx.dropout(&probs, self.dropout)?;
        let out = probs.matmul(&v)?.transpose(1, 2)?.contiguous()?;
        Ok(out.reshape((b, t, h))?)
    }
}

struct Layer {
    attention: SelfAttention,
    attn_out: Linear,
    attn_norm: LayerNorm,
    intermediate: Linear,
    output: Linear,
    out_norm: LayerNorm,
    dropout: f64,
    act: String,
}

impl Layer {
    fn new(p: &ParamPath, cfg: &BertConfig) -> Result<Self> {
        let h = cfg.hidden_size;
        let std = cfg.initializer_range;
        let sa = p.pp("attention").pp("self");
        let ao = p.pp("attention").pp("output");
        Ok(Layer {
            attention: SelfAttention {
                query: Linear::normal(&sa.pp("query"), h, h, std)?,
                key: Linear::normal(&sa.pp("key"), h, h, std)?,
                value: Linear::normal(&sa.pp("value"), h, h, std)?,
                heads: cfg.num_attention_heads,
                head_dim: h / cfg.num_attention_heads,
                dropout: cfg.attention_probs_dropout_prob,
            },
            attn_out: Linear::normal(&ao.pp("dense"), h, h, std)?,
            attn_norm: LayerNorm::new(&ao.pp("LayerNorm"), h, cfg.layer_norm_eps)?,
            intermediate: Linear::normal(&p.pp("intermediate").pp("dense"), h, cfg.intermediate_size, std)?,
            output: Linear::normal(&p.pp("output").pp("dense"), cfg.intermediate_size, h, std)?,
            out_norm: LayerNorm::new(&p.pp("output").pp("LayerNorm"), h, cfg.layer_norm_eps)?,
            dropout: cfg.hidden_dropout_prob,
            act: cfg.hidden_act.clone(),
        })
    }

    fn forward(&self, x: &Tensor, mask_add: &Tensor, ctx: &mut ForwardCtx) -> Result<Tensor> {
        let a = self.attention.forward(x, mask_add, ctx)?;
        let a = ctx.dropout(&self.attn_out.forward(&a)?, self.dropout)?;
        let x = self.attn_norm.forward(&(a + x)?)?;
        let i = self.intermediate.forward(&x)?;
        let i = match self.act.as_str() {
            "relu" => i.relu()?,
            "gelu_new" => i.gelu()?,
            _ => i.gelu_erf()?,
        };
        let o = ctx.dropout(&self.output.forward(&i)?, self.dropout)?;
        Ok(self.out_norm.forward(&(o + x)?)?)
    }
}

pub struct Bert {
    word: Embedding,
    position: Embedding,
    token_type: Embedding,
    emb_norm: LayerNorm,
    layers: Vec<Layer>,
    dropout: f64,
    pub config: BertConfig,
}

impl Bert {
    pub fn new(p: &ParamPath, cfg: &BertConfig) -> Result<Self> {
        cfg.validate()?;
        let e = p.pp("embeddings");
        let std = cfg.initializer_range;
        let word = Embedding::new(&e.pp("word_embeddings"), cfg.vocab_size, cfg.hidden_size, std)?;
        let position = Embedding::new(&e.pp("position_embeddings"), cfg.max_position_embeddings, cfg.hidden_size, std)?;
        let token_type = Embedding::new(&e.pp("token_type_embeddings"), cfg.type_vocab_size, cfg.hidden_size, std)?;
        let emb_norm = LayerNorm::new(&e.pp("LayerNorm"), cfg.hidden_size, cfg.layer_norm_eps)?;
        let layers = (0..cfg.num_hidden_layers).map(|i| Layer::new(&p.pp("encoder").pp("layer").pp(i), cfg)).collect::<Result<Vec<_>>>()?;
        Ok(Bert { word, position, token_type, emb_norm, layers, dropout: cfg.hidden_dropout_prob, config: cfg.clone() })
    }

    /// Hidden states of the embedding output and of every layer, each `[B, T, H]`.
    ///
    /// `ids` is `[B, T]` u32; `mask` is `[B, T]` with 1 for real tokens.
    pub fn forward(&self, ids: &Tensor, mask: &Tensor, ctx: &mut ForwardCtx) -> Result<Vec<Tensor>> {
        let (b, t) = ids.dims2()?;
        if t > self.config.max_position_embeddings {
            return Err(Error::Encoder(format!("sequence of {t} exceeds {} positions", self.config.max_position_embeddings)));
        }
        let dev = ids.device();
        let positions = Tensor::arange(0u32, t as u32, dev)?;
        let types = Tensor::zeros((b, t), candle_core::DType::U32, dev)?;
        let x = self.word.forward(ids)?.broadcast_add(&self.position.forward(&positions)?)?.add(&self.token_type.forward(&types)?)?;
        let x = self.emb_norm.forward(&x)?;
        let mut x = ctx.dropout(&x, self.dropout)?;
        let dtype = x.dtype();
        let mask_add = ((mask.to_dtype(dtype)?.affine(1.0, -1.0)? * 10000.0)?).reshape((b, 1, 1, t))?;
        let mut states = vec![x.clone()];
        for layer in &self.layers {
            x = layer.forward(&x, &mask_add, ctx)?;
            states.push(x.clone());
        }
        Ok(states)
    }
}

/// Maps names used by common checkpoint files onto this module's names.
pub fn checkpoint_name(key: &str) -> Option<String> {
    let key = key.strip_prefix("bert.").unwrap_or(key);
    if !(key.starts_with("embeddings.") || key.starts_with("encoder.")) || key.ends_with("position_ids") {
        return None;
    }
    let key = if let Some(stem) = key.strip_suffix(".gamma") {
        format!("{stem}.weight")
    } else if let Some(stem) = key.strip_suffix(".beta") {
        format!("{stem}.bias")
    } else {
        key.to_string()
    };
    Some(key)
}
