//! Layers built from differentiable primitives.

use candle_core::{DType, Module, Tensor, D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::params::{Init, ParamPath};
use crate::error::Result;

/// Per-forward state: train/eval mode plus the dropout mask stream.
pub struct ForwardCtx {
    pub train: bool,
    rng: ChaCha8Rng,
}

impl ForwardCtx {
    pub fn eval() -> Self {
        ForwardCtx { train: false, rng: ChaCha8Rng::seed_from_u64(0) }
    }

    pub fn train(seed: u64) -> Self {
        ForwardCtx { train: true, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Inverted dropout with a mask drawn from the context's stream.
    pub fn dropout(&mut self, x: &Tensor, p: f64) -> Result<Tensor> {
        if !self.train || p <= 0.0 {
            return Ok(x.clone());
        }
        let keep = 1.0 - p;
        let n = x.elem_count();
        let scale = 1.0 / keep;
        let mask: Vec<f32> = (0..n).map(|_| if self.rng.random::<f64>() < keep { scale as f32 } else { 0.0 }).collect();
        let mask = Tensor::from_vec(mask, x.shape(), x.device())?.to_dtype(x.dtype())?;
        Ok(x.mul(&mask)?)
    }
}

#[derive(Debug, Clone)]
pub struct Linear {
    pub weight: Tensor,
    pub bias: Option<Tensor>,
}

impl Linear {
    /// BERT-style init: normal(0, std) weights, zero bias.
    pub fn normal(p: &ParamPath, in_dim: usize, out_dim: usize, std: f64) -> Result<Self> {
        Ok(Linear {
            weight: p.get((out_dim, in_dim), "weight", Init::Normal { std })?,
            bias: Some(p.get(out_dim, "bias", Init::Const(0.0))?),
        })
    }

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and bias.
    pub fn uniform(p: &ParamPath, in_dim: usize, out_dim: usize) -> Result<Self> {
        let bound = 1.0 / (in_dim as f64).sqrt();
        Ok(Linear {
            weight: p.get((out_dim, in_dim), "weight", Init::Uniform { bound })?,
            bias: Some(p.get(out_dim, "bias", Init::Uniform { bound })?),
        })
    }

    pub fn out_dim(&self) -> usize {
        self.weight.dims()[0]
    }
}

impl Module for Linear {
    fn forward(&self, x: &Tensor) -> candle_core::Result<Tensor> {
        let w = self.weight.t()?;
        let y = match x.rank() {
            2 => x.matmul(&w)?,
            _ => x.broadcast_matmul(&w)?,
        };
        match &self.bias {
            Some(b) => y.broadcast_add(b),
            None => Ok(y),
        }
    }
}

/// Layer normalization over the last dimension.
#[derive(Debug, Clone)]
pub struct LayerNorm {
    pub weight: Tensor,
    pub bias: Tensor,
    pub eps: f64,
}

impl LayerNorm {
    pub fn new(p: &ParamPath, dim: usize, eps: f64) -> Result<Self> {
        Ok(LayerNorm { weight: p.get(dim, "weight", Init::Const(1.0))?, bias: p.get(dim, "bias", Init::Const(0.0))?, eps })
    }
}

impl Module for LayerNorm {
    fn forward(&self, x: &Tensor) -> candle_core::Result<Tensor> {
        let mean = x.mean_keepdim(D::Minus1)?;
        let centered = x.broadcast_sub(&mean)?;
        let var = centered.sqr()?.mean_keepdim(D::Minus1)?;
        let normed = centered.broadcast_div(&(var + self.eps)?.sqrt()?)?;
        normed.broadcast_mul(&self.weight)?.broadcast_add(&self.bias)
    }
}

#[derive(Debug, Clone)]
pub struct Embedding {
    pub weight: Tensor,
}

impl Embedding {
    pub fn new(p: &ParamPath, n: usize, dim: usize, std: f64) -> Result<Self> {
        Ok(Embedding { weight: p.get((n, dim), "weight", Init::Normal { std })? })
    }

    /// `ids` of any shape (u32) to `[..., dim]`.
    pub fn forward(&self, ids: &Tensor) -> Result<Tensor> {
        let mut dims = ids.dims().to_vec();
        let flat = ids.flatten_all()?;
        let out = self.weight.index_select(&flat, 0)?;
        dims.push(self.weight.dims()[1]);
        Ok(out.reshape(dims)?)
    }
}

#[derive(Debug, Clone)]
pub struct Conv2d {
    pub weight: Tensor,
    pub bias: Option<Tensor>,
    pub stride: usize,
    pub padding: usize,
}

impl Conv2d {
    pub fn no_bias(p: &ParamPath, c_in: usize, c_out: usize, k: usize, stride: usize, padding: usize) -> Result<Self> {
        Ok(Conv2d { weight: p.get((c_out, c_in, k, k), "weight", Init::KaimingFanOut)?, bias: None, stride, padding })
    }
}

impl Module for Conv2d {
    fn forward(&self, x: &Tensor) -> candle_core::Result<Tensor> {
        let y = x.conv2d(&self.weight, self.padding, self.stride, 1, 1)?;
        match &self.bias {
            Some(b) => y.broadcast_add(&b.reshape((1, b.dims()[0], 1, 1))?),
            None => Ok(y),
        }
    }
}

/// Batch normalization that always uses its stored running statistics.
#[derive(Debug, Clone)]
pub struct FrozenBatchNorm2d {
    pub weight: Tensor,
    pub bias: Tensor,
    pub running_mean: Tensor,
    pub running_var: Tensor,
    pub eps: f64,
}

impl FrozenBatchNorm2d {
    pub fn new(p: &ParamPath, c: usize) -> Result<Self> {
        Ok(FrozenBatchNorm2d {
            weight: p.get(c, "weight", Init::Const(1.0))?,
            bias: p.get(c, "bias", Init::Const(0.0))?,
            running_mean: p.buffer(c, "running_mean", Init::Const(0.0))?,
            running_var: p.buffer(c, "running_var", Init::Const(1.0))?,
            eps: 1e-5,
        })
    }
}

impl Module for FrozenBatchNorm2d {
    fn forward(&self, x: &Tensor) -> candle_core::Result<Tensor> {
        let c = self.weight.dims()[0];
        let scale = (self.weight.clone() / (self.running_var.clone() + self.eps)?.sqrt()?)?;
        let shift = (self.bias.clone() - self.running_mean.mul(&scale)?)?;
        x.broadcast_mul(&scale.reshape((1, c, 1, 1))?)?.broadcast_add(&shift.reshape((1, c, 1, 1))?)
    }
}

/// 3x3 max pool with stride 2 and padding 1 on non-negative input.
///
/// Zero padding is exact here because inputs come straight out of a ReLU.
pub fn max_pool_3x3_s2(x: &Tensor) -> Result<Tensor> {
    let pooled_w = strided_max(x, 3)?;
    let pooled = strided_max(&pooled_w.transpose(2, 3)?.contiguous()?, 3)?;
    Ok(pooled.transpose(2, 3)?.contiguous()?)
}

/// Window-3 stride-2 max with one zero of padding on each side, along the last dim.
fn strided_max(x: &Tensor, dim: usize) -> Result<Tensor> {
    let n = x.dim(dim)?;
    let padded = x.pad_with_zeros(dim, 1, 1)?;
    let a = padded.narrow(dim, 0, n)?;
    let b = padded.narrow(dim, 1, n)?;
    let c = padded.narrow(dim, 2, n)?;
    let m = a.maximum(&b)?.maximum(&c)?;
    let m = if n % 2 == 1 { m.pad_with_zeros(dim, 0, 1)? } else { m };
    let (b0, c0, h, w) = m.dims4()?;
    Ok(m.reshape((b0, c0, h, w / 2, 2))?.narrow(4, 0, 1)?.squeeze(4)?)
}

/// Casts float tensors of any dtype to f64 host vectors.
pub fn to_f64_rows(t: &Tensor) -> Result<Vec<Vec<f64>>> {
    Ok(t.to_dtype(DType::F64)?.to_vec2::<f64>()?)
}
