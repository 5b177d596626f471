use std::path::PathBuf;

/// Process exit codes used by the command-line tool.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const TRAINING: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] newsframe_core::Error),

    #[error("{path}: row {row}: {message}")]
    Row { path: String, row: usize, message: String },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("tensor backend: {0}")]
    Tensor(#[from] candle_core::Error),

    #[error("image for article {article_id}: {message}")]
    Image { article_id: String, message: String },

    #[error("tokenizer: {0}")]
    Tokenizer(String),

    #[error("encoder: {0}")]
    Encoder(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("data: {0}")]
    Data(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("fold {fold}, seed {seed}: {source}")]
    Run { fold: usize, seed: u64, source: Box<Error> },

    #[error("worker: {0}")]
    Worker(String),

    #[error("report: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Exit code reported by the CLI when this error ends a command.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => exit::USAGE,
            Error::Tensor(_) | Error::Diverged(_) | Error::Worker(_) => exit::TRAINING,
            Error::Run { source, .. } => match source.exit_code() {
                exit::DATA => exit::DATA,
                _ => exit::TRAINING,
            },
            Error::Core(e) => match e {
                newsframe_core::Error::InvalidModality(_) | newsframe_core::Error::UnknownPart(_) | newsframe_core::Error::FoldCount(_) => {
                    exit::USAGE
                }
                _ => exit::DATA,
            },
            _ => exit::DATA,
        }
    }
}
