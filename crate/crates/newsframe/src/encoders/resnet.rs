//! Bottleneck residual network with torchvision parameter names.
//!
//! Batch normalization uses stored statistics in both modes; the classifier
//! layer is replaced by a projection to `feature_dim` features.

use candle_core::{Module, Tensor};
use serde::{Deserialize, Serialize};

use super::nn::{max_pool_3x3_s2, Conv2d, ForwardCtx, FrozenBatchNorm2d, Linear};
use super::params::ParamPath;
use crate::error::{Error, Result};

const EXPANSION: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResNetConfig {
    /// Bottleneck blocks per stage.
    pub layers: [usize; 4],
    /// Stem width; stage widths are 1x, 2x, 4x and 8x this value.
    pub base_width: usize,
    pub feature_dim: usize,
    pub dropout: f64,
}

impl ResNetConfig {
    pub fn resnet50() -> Self {
        ResNetConfig { layers: [3, 4, 6, 3], base_width: 64, feature_dim: 512, dropout: 0.5 }
    }

    pub fn tiny() -> Self {
        ResNetConfig { layers: [1, 1, 1, 1], base_width: 8, feature_dim: 512, dropout: 0.5 }
    }

    pub fn backbone_channels(&self) -> usize {
        self.base_width * 8 * EXPANSION
    }
}

struct Bottleneck {
    conv1: Conv2d,
    bn1: FrozenBatchNorm2d,
    conv2: Conv2d,
    bn2: FrozenBatchNorm2d,
    conv3: Conv2d,
    bn3: FrozenBatchNorm2d,
    downsample: Option<(Conv2d, FrozenBatchNorm2d)>,
}

impl Bottleneck {
    fn new(p: &ParamPath, inplanes: usize, planes: usize, stride: usize) -> Result<Self> {
        let out = planes * EXPANSION;
        let downsample = if stride != 1 || inplanes != out {
            let d = p.pp("downsample");
            Some((Conv2d::no_bias(&d.pp(0), inplanes, out, 1, stride, 0)?, FrozenBatchNorm2d::new(&d.pp(1), out)?))
        } else {
            None
        };
        Ok(Bottleneck {
            conv1: Conv2d::no_bias(&p.pp("conv1"), inplanes, planes, 1, 1, 0)?,
            bn1: FrozenBatchNorm2d::new(&p.pp("bn1"), planes)?,
            conv2: Conv2d::no_bias(&p.pp("conv2"), planes, planes, 3, stride, 1)?,
            bn2: FrozenBatchNorm2d::new(&p.pp("bn2"), planes)?,
            conv3: Conv2d::no_bias(&p.pp("conv3"), planes, out, 1, 1, 0)?,
            bn3: FrozenBatchNorm2d::new(&p.pp("bn3"), out)?,
            downsample,
        })
    }

    fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let y = self.bn1.forward(&self.conv1.forward(x)?)?.relu()?;
        let y = self.bn2.forward(&self.conv2.forward(&y)?)?.relu()?;
        let y = self.bn3.forward(&self.conv3.forward(&y)?)?;
        let skip = match &self.downsample {
            Some((c, b)) => b.forward(&c.forward(x)?)?,
            None => x.clone(),
        };
        Ok((y + skip)?.relu()?)
    }
}

pub struct ResNet {
    conv1: Conv2d,
    bn1: FrozenBatchNorm2d,
    stages: Vec<Vec<Bottleneck>>,
    feature: Linear,
    pub config: ResNetConfig,
}

impl ResNet {
    pub fn new(p: &ParamPath, cfg: &ResNetConfig) -> Result<Self> {
        if cfg.base_width == 0 || cfg.layers.contains(&0) {
            return Err(Error::Config("resnet stages need at least one block and a positive width".into()));
        }
        let w = cfg.base_width;
        let conv1 = Conv2d::no_bias(&p.pp("conv1"), 3, w, 7, 2, 3)?;
        let bn1 = FrozenBatchNorm2d::new(&p.pp("bn1"), w)?;
        let mut inplanes = w;
        let mut stages = Vec::new();
        for (s, &n) in cfg.layers.iter().enumerate() {
            let planes = w << s;
            let stride = if s == 0 { 1 } else { 2 };
            let sp = p.pp(format!("layer{}", s + 1));
            let mut blocks = Vec::new();
            for i in 0..n {
                blocks.push(Bottleneck::new(&sp.pp(i), inplanes, planes, if i == 0 { stride } else { 1 })?);
                inplanes = planes * EXPANSION;
            }
            stages.push(blocks);
        }
        let feature = Linear::uniform(&p.pp("feature"), inplanes, cfg.feature_dim)?;
        Ok(ResNet { conv1, bn1, stages, feature, config: cfg.clone() })
    }

    /// Globally pooled backbone activations, `[B, backbone_channels]`.
    pub fn backbone(&self, x: &Tensor) -> Result<Tensor> {
        let y = self.bn1.forward(&self.conv1.forward(x)?)?.relu()?;
        let mut y = max_pool_3x3_s2(&y)?;
        for stage in &self.stages {
            for block in stage {
                y = block.forward(&y)?;
            }
        }
        Ok(y.mean((2, 3))?)
    }

    /// `[B, 3, 224, 224]` to `[B, feature_dim]`; dropout applies in training mode only.
    pub fn forward(&self, x: &Tensor, ctx: &mut ForwardCtx) -> Result<Tensor> {
        let f = self.feature.forward(&self.backbone(x)?)?.relu()?;
        ctx.dropout(&f, self.config.dropout)
    }
}

/// Maps torchvision checkpoint names onto this module's names; the original
/// classifier and batch counters are skipped.
pub fn checkpoint_name(key: &str) -> Option<String> {
    if key.starts_with("fc.") || key.ends_with("num_batches_tracked") {
        return None;
    }
    Some(key.to_string())
}
