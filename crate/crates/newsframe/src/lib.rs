//! Multimodal news frame classification: corpus handling, encoders, heads,
//! cross-validated evaluation and headline concreteness analysis.

pub mod cli;
pub mod concreteness;
pub mod dataset;
pub mod encoders;
pub mod error;
pub mod evaluation;
pub mod fetch;
pub mod imaging;
pub mod manifest;
pub mod models;

pub use error::{Error, Result};
