//! Core algorithms for multimodal news-frame analysis.
//!
//! Everything here is pure and allocation-only (`no_std` + `alloc`): the frame
//! and SRE taxonomies, dataset records, model-input assembly, stratified fold
//! planning, corpus statistics, inter-coder agreement, classification metrics,
//! loss functions, correlation analysis, frame concreteness aggregation and a
//! small multinomial logistic regression solver.
//!
//! IO, image decoding, neural encoders and the command line live in the
//! companion `newsframe` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agreement;
pub mod concreteness;
pub mod correlation;
mod error;
pub mod folds;
pub mod logreg;
pub mod loss;
pub mod metrics;
pub mod record;
pub mod sre;
pub mod stats;
pub mod taxonomy;
pub mod text;

pub use error::{Error, Result};
pub use taxonomy::{Frame, HeadKind, ModalitySpec, Part, RaceEthnicity, Subject, Task};
