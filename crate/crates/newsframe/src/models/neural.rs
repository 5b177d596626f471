//! Encoder-backed heads.

use candle_core::{DType, Device, Module, Tensor, Var};
use newsframe_core::sre::SRE_LEN;
use newsframe_core::HeadKind;

use super::Example;
use crate::encoders::nn::{ForwardCtx, Linear};
use crate::encoders::params::ParamStore;
use crate::encoders::{derive_seed, images_to_tensor, ImageEncoder, TextEncoder};
use crate::error::{Error, Result};

/// Hidden widths of the fusion head.
pub const FUSION_WIDTHS: [usize; 2] = [512, 128];

pub struct NeuralModel {
    pub kind: HeadKind,
    pub text: Option<TextEncoder>,
    pub image: Option<ImageEncoder>,
    pub head_store: ParamStore,
    pub layers: Vec<Linear>,
    pub n_classes: usize,
    pub fusion_dropout: f64,
    pub text_dropout: f64,
}

impl NeuralModel {
    /// Builds the head for `kind` over the given encoders.
    pub fn new(
        kind: HeadKind,
        text: Option<TextEncoder>,
        image: Option<ImageEncoder>,
        n_classes: usize,
        seed: u64,
        fusion_dropout: f64,
        text_dropout: f64,
    ) -> Result<Self> {
        let dtype = text.as_ref().map(|t| t.dtype()).or_else(|| image.as_ref().map(|i| i.dtype())).unwrap_or(DType::F32);
        let head_store = ParamStore::new(derive_seed(seed, "head"), dtype, Device::Cpu);
        let p = head_store.root();
        let need_text = || text.as_ref().ok_or_else(|| Error::Config(format!("{kind:?} head needs a text encoder")));
        let need_image = || image.as_ref().ok_or_else(|| Error::Config(format!("{kind:?} head needs an image encoder")));
        let layers = match kind {
            HeadKind::TextFineTune => vec![Linear::uniform(&p.pp("classifier"), need_text()?.output_dim(), n_classes)?],
            HeadKind::SreAugmentedText => {
                vec![Linear::uniform(&p.pp("classifier"), need_text()?.output_dim() + SRE_LEN, n_classes)?]
            }
            HeadKind::ImageClassifier => vec![Linear::uniform(&p.pp("classifier"), need_image()?.feature_dim(), n_classes)?],
            HeadKind::Fusion => {
                let input = need_image()?.feature_dim() + need_text()?.output_dim();
                vec![
                    Linear::uniform(&p.pp("fusion").pp(0), input, FUSION_WIDTHS[0])?,
                    Linear::uniform(&p.pp("fusion").pp(1), FUSION_WIDTHS[0], FUSION_WIDTHS[1])?,
                    Linear::uniform(&p.pp("fusion").pp(2), FUSION_WIDTHS[1], n_classes)?,
                ]
            }
            other => return Err(Error::Config(format!("{other:?} is not an encoder-backed head"))),
        };
        Ok(NeuralModel { kind, text, image, head_store, layers, n_classes, fusion_dropout, text_dropout })
    }

    pub fn dtype(&self) -> DType {
        self.head_store.dtype()
    }

    pub fn trainable_vars(&self) -> Vec<Var> {
        let mut v = Vec::new();
        if let Some(t) = &self.text {
            v.extend(t.trainable_vars());
        }
        if let Some(i) = &self.image {
            v.extend(i.trainable_vars());
        }
        v.extend(self.head_store.trainable_vars());
        v
    }

    fn stores(&self) -> Vec<&ParamStore> {
        let mut s = Vec::new();
        if let Some(t) = &self.text {
            s.push(t.store());
        }
        if let Some(i) = &self.image {
            s.push(i.store());
        }
        s.push(&self.head_store);
        s
    }

    pub fn snapshot(&self) -> Result<Vec<Vec<(String, Tensor)>>> {
        self.stores().into_iter().map(|s| s.snapshot()).collect()
    }

    pub fn restore(&self, snap: &[Vec<(String, Tensor)>]) -> Result<()> {
        for (store, s) in self.stores().into_iter().zip(snap) {
            store.restore(s)?;
        }
        Ok(())
    }

    fn texts<'a>(batch: &[&'a Example]) -> Result<Vec<&'a str>> {
        batch.iter().map(|e| e.text.as_deref().ok_or_else(|| Error::Data(format!("{}: missing text input", e.article_id)))).collect()
    }

    fn images(&self, batch: &[&Example]) -> Result<Tensor> {
        let loaded = batch
            .iter()
            .map(|e| match &e.image {
                Some(i) => i.load(&e.article_id),
                None => Err(Error::Data(format!("{}: missing image input", e.article_id))),
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<_> = loaded.iter().map(|a| a.as_ref()).collect();
        images_to_tensor(&refs, self.dtype())
    }

    fn sre(&self, batch: &[&Example]) -> Result<Tensor> {
        let mut data = Vec::with_capacity(batch.len() * SRE_LEN);
        for e in batch {
            let s = e.sre.ok_or_else(|| Error::Data(format!("{}: missing SRE annotation", e.article_id)))?;
            data.extend(s.to_f64());
        }
        Ok(Tensor::from_vec(data, (batch.len(), SRE_LEN), &Device::Cpu)?.to_dtype(self.dtype())?)
    }

    /// Head input features before the trainable head layers.
    pub fn features(&self, batch: &[&Example], ctx: &mut ForwardCtx) -> Result<Tensor> {
        let text = |ctx: &mut ForwardCtx| -> Result<Tensor> {
            let enc = self.text.as_ref().expect("text encoder present");
            enc.pooled(&Self::texts(batch)?, ctx)
        };
        match self.kind {
            HeadKind::TextFineTune => {
                let t = text(ctx)?;
                ctx.dropout(&t, self.text_dropout)
            }
            HeadKind::SreAugmentedText => {
                let t = text(ctx)?;
                let t = ctx.dropout(&t, self.text_dropout)?;
                Ok(Tensor::cat(&[t, self.sre(batch)?], 1)?)
            }
            HeadKind::ImageClassifier => {
                let enc = self.image.as_ref().expect("image encoder present");
                enc.forward(&self.images(batch)?, ctx)
            }
            HeadKind::Fusion => {
                let enc = self.image.as_ref().expect("image encoder present");
                let img = enc.forward(&self.images(batch)?, ctx)?;
                let t = text(ctx)?;
                Ok(Tensor::cat(&[img, t], 1)?)
            }
            _ => unreachable!("checked at construction"),
        }
    }

    /// Applies the trainable head layers to precomputed features.
    pub fn head(&self, features: &Tensor, ctx: &mut ForwardCtx) -> Result<Tensor> {
        let mut x = features.clone();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            x = layer.forward(&x)?;
            if i < last {
                x = ctx.dropout(&x.relu()?, self.fusion_dropout)?;
            }
        }
        Ok(x)
    }

    pub fn logits(&self, batch: &[&Example], ctx: &mut ForwardCtx) -> Result<Tensor> {
        let f = self.features(batch, ctx)?;
        self.head(&f, ctx)
    }

    /// Eval-mode logits as f64 rows, in chunks to bound memory.
    pub fn eval_logits(&self, batch: &[&Example]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(batch.len());
        let mut ctx = ForwardCtx::eval();
        for chunk in batch.chunks(16) {
            let l = self.logits(chunk, &mut ctx)?;
            out.extend(l.to_dtype(DType::F64)?.to_vec2::<f64>()?);
        }
        Ok(out)
    }
}
