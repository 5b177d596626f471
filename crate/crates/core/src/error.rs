use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("frame id {0} is outside 1..=9")]
    FrameId(u32),
    #[error("unknown frame name {0:?}")]
    FrameName(String),
    #[error("subject id {0} is outside 1..=16")]
    SubjectId(u32),
    #[error("race/ethnicity id {0} is outside 17..=19")]
    RaceEthnicityId(u32),
    #[error("unknown modality part {0:?}")]
    UnknownPart(String),
    #[error("invalid modality: {0}")]
    InvalidModality(String),
    #[error("article {article_id}: modality needs an image record but none is present")]
    MissingImage { article_id: String },
    #[error("frame label requested but no frame was supplied")]
    MissingFrameLabel,
    #[error("headline is empty for article {0}")]
    EmptyHeadline(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("fold count must be at least 2, got {0}")]
    FoldCount(usize),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("agreement needs at least two coders, got {0}")]
    TooFewCoders(usize),
    #[error("coder rows have different lengths")]
    RaggedCodings,
    #[error("no item carries two or more codes")]
    NoPairableValues,
    #[error("probabilities do not form a distribution")]
    InvalidDistribution,
    #[error("target class {target} out of range for {n_classes} classes")]
    TargetOutOfRange { target: usize, n_classes: usize },
    #[error("focusing parameter must be finite and non-negative")]
    InvalidGamma,
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("feature vectors have inconsistent dimensions")]
    RaggedFeatures,
}

pub type Result<T> = core::result::Result<T, Error>;
