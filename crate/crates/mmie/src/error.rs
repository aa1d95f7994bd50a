use thiserror::Error;

/// Errors raised by descriptor validation, schedule construction and the
/// simulation front ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown network `{0}` (expected alexnet, vgg16, resnet50 or a descriptor path)")]
    UnknownNetwork(String),

    #[error("unsupported mode: filter width {w_f} with stride {s} is not a supported tile mode")]
    UnsupportedMode { w_f: usize, s: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("descriptor parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
