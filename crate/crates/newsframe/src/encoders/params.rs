//! Named parameter storage with seeded initialization.
//!
//! Candle's CPU generator cannot be seeded, so every parameter is drawn from
//! a ChaCha stream owned by the store. Creation order is fixed by the model
//! constructors, which makes initialization reproducible per seed.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};

use candle_core::{DType, Device, Shape, Tensor, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Const(f64),
    Normal {
        std: f64,
    },
    Uniform {
        bound: f64,
    },
    /// He normal over fan-out, the usual convolution initializer.
    KaimingFanOut,
}

struct Entry {
    var: Var,
    trainable: bool,
}

struct Inner {
    entries: BTreeMap<String, Entry>,
    order: Vec<String>,
    rng: ChaCha8Rng,
}

/// Shared, cheaply clonable handle to a set of named parameters.
#[derive(Clone)]
pub struct ParamStore {
    inner: Arc<Mutex<Inner>>,
    dtype: DType,
    device: Device,
}

impl std::fmt::Debug for ParamStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.inner.lock().map(|i| i.order.len()).unwrap_or(0);
        f.debug_struct("ParamStore").field("tensors", &n).field("dtype", &self.dtype).finish()
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub loaded: Vec<String>,
    pub missing: Vec<String>,
    pub unused: Vec<String>,
}

impl ParamStore {
    pub fn new(seed: u64, dtype: DType, device: Device) -> Self {
        ParamStore {
            inner: Arc::new(Mutex::new(Inner { entries: BTreeMap::new(), order: Vec::new(), rng: ChaCha8Rng::seed_from_u64(seed) })),
            dtype,
            device,
        }
    }

    pub fn dtype(&self) -> DType {
        self.dtype
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    pub fn root(&self) -> ParamPath {
        ParamPath { store: self.clone(), prefix: String::new() }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().expect("parameter store lock poisoned")
    }

    fn create(&self, name: String, shape: Shape, init: Init, trainable: bool) -> Result<Tensor> {
        let mut inner = self.lock();
        if let Some(e) = inner.entries.get(&name) {
            if e.var.shape() != &shape {
                return Err(Error::Encoder(format!("parameter {name} re-declared with a different shape")));
            }
            return Ok(e.var.as_tensor().clone());
        }
        let n = shape.elem_count();
        let dims = shape.dims().to_vec();
        let values: Vec<f64> = match init {
            Init::Const(c) => vec![c; n],
            Init::Normal { std } => sample_normal(&mut inner.rng, n, std),
            Init::Uniform { bound } => (0..n).map(|_| inner.rng.random_range(-bound..=bound)).collect(),
            Init::KaimingFanOut => {
                let fan_out = dims[0] * dims[2..].iter().product::<usize>();
                sample_normal(&mut inner.rng, n, (2.0 / fan_out as f64).sqrt())
            }
        };
        let t = Tensor::from_vec(values, shape, &self.device)?.to_dtype(self.dtype)?;
        let var = Var::from_tensor(&t)?;
        let out = var.as_tensor().clone();
        inner.order.push(name.clone());
        inner.entries.insert(name, Entry { var, trainable });
        Ok(out)
    }

    /// Trainable variables in creation order.
    pub fn trainable_vars(&self) -> Vec<Var> {
        let inner = self.lock();
        inner.order.iter().filter_map(|n| inner.entries.get(n)).filter(|e| e.trainable).map(|e| e.var.clone()).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.lock().order.clone()
    }

    pub fn get(&self, name: &str) -> Option<Tensor> {
        self.lock().entries.get(name).map(|e| e.var.as_tensor().clone())
    }

    pub fn num_parameters(&self) -> usize {
        self.lock().entries.values().filter(|e| e.trainable).map(|e| e.var.elem_count()).sum()
    }

    /// Copies of every tensor, for restoring a checkpoint in memory.
    pub fn snapshot(&self) -> Result<Vec<(String, Tensor)>> {
        let inner = self.lock();
        inner.order.iter().map(|n| Ok((n.clone(), inner.entries[n].var.as_tensor().copy()?))).collect()
    }

    pub fn restore(&self, snapshot: &[(String, Tensor)]) -> Result<()> {
        let inner = self.lock();
        for (name, t) in snapshot {
            let e = inner.entries.get(name).ok_or_else(|| Error::Encoder(format!("unknown parameter {name}")))?;
            e.var.set(t)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let inner = self.lock();
        let map: HashMap<String, Tensor> = inner.entries.iter().map(|(k, e)| (k.clone(), e.var.as_tensor().clone())).collect();
        candle_core::safetensors::save(&map, path)?;
        Ok(())
    }

    /// Overwrites parameters from a name-to-tensor map. `rename` maps file
    /// names onto store names (returning `None` skips the tensor).
    pub fn load_map<F>(&self, tensors: HashMap<String, Tensor>, rename: F) -> Result<LoadReport>
    where
        F: Fn(&str) -> Option<String>,
    {
        let inner = self.lock();
        let mut report = LoadReport::default();
        let mut done = std::collections::HashSet::new();
        let mut keys: Vec<&String> = tensors.keys().collect();
        keys.sort();
        for key in keys {
            let Some(name) = rename(key) else {
                report.unused.push(key.clone());
                continue;
            };
            match inner.entries.get(&name) {
                Some(e) => {
                    let t = &tensors[key];
                    if t.shape() != e.var.shape() {
                        return Err(Error::Encoder(format!("tensor {key} has shape {:?}, expected {:?}", t.dims(), e.var.dims())));
                    }
                    e.var.set(&t.to_dtype(self.dtype)?.to_device(&self.device)?)?;
                    report.loaded.push(name.clone());
                    done.insert(name);
                }
                None => report.unused.push(key.clone()),
            }
        }
        report.missing = inner.order.iter().filter(|n| !done.contains(*n)).cloned().collect();
        Ok(report)
    }

    pub fn load(&self, path: &Path) -> Result<LoadReport> {
        let tensors = candle_core::safetensors::load(path, &self.device).map_err(|e| Error::Encoder(format!("{}: {e}", path.display())))?;
        self.load_map(tensors, |k| Some(k.to_string()))
    }
}

fn sample_normal(rng: &mut ChaCha8Rng, n: usize, std: f64) -> Vec<f64> {
    let d = Normal::new(0.0, std).expect("finite std");
    (0..n).map(|_| d.sample(rng)).collect()
}

/// A prefix into a [`ParamStore`].
#[derive(Clone, Debug)]
pub struct ParamPath {
    store: ParamStore,
    prefix: String,
}

impl ParamPath {
    pub fn pp(&self, part: impl std::fmt::Display) -> ParamPath {
        let prefix = if self.prefix.is_empty() { part.to_string() } else { format!("{}.{part}", self.prefix) };
        ParamPath { store: self.store.clone(), prefix }
    }

    fn full(&self, name: &str) -> String {
        if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}.{name}", self.prefix)
        }
    }

    pub fn get(&self, shape: impl Into<Shape>, name: &str, init: Init) -> Result<Tensor> {
        self.store.create(self.full(name), shape.into(), init, true)
    }

    /// A non-trainable tensor (e.g. normalization running statistics).
    pub fn buffer(&self, shape: impl Into<Shape>, name: &str, init: Init) -> Result<Tensor> {
        self.store.create(self.full(name), shape.into(), init, false)
    }

    pub fn dtype(&self) -> DType {
        self.store.dtype
    }

    pub fn device(&self) -> &Device {
        &self.store.device
    }
}
