use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid record{}: {reason}", fmt_line(*.line))]
    InvalidRecord { line: Option<usize>, reason: String },

    #[error("feature has no observed values: {feature}")]
    NoObservedValues { feature: String },

    #[error("split ratios must be positive and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),

    #[error("class {class} has {count} members, need at least {needed} to split")]
    ClassTooSmall {
        class: String,
        count: usize,
        needed: usize,
    },

    #[error("SMOTE requires >=2 minority samples, got {0}")]
    SmoteTooFewMinority(usize),

    #[error("SMOTE target ratio must be in (0, 1], got {0}")]
    SmoteBadRatio(f64),

    #[error("class {0} is absent from the dataset")]
    MissingClass(String),

    #[error("operation requires both classes, dataset is single-class")]
    SingleClass,

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("numeric overflow: {0}")]
    NonFinite(String),

    #[error("unknown continuous feature: {0}")]
    UnknownFeature(String),

    #[error("no present values for feature {feature} in class {class}")]
    NoPresentValues { feature: String, class: String },

    #[error("length mismatch: {left} probabilities vs {right} labels")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "no threshold satisfies the constraints; best unconstrained candidate: \
         threshold {threshold}, ppv {ppv:.4}, tpr {tpr:.4}"
    )]
    NoFeasibleThreshold { threshold: f64, ppv: f64, tpr: f64 },

    #[error("vocabulary mismatch: model expects {expected} tokens, encoder has {actual}")]
    VocabMismatch { expected: usize, actual: usize },

    #[error("training diverged (non-finite loss) at epoch {0}")]
    Diverged(usize),

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_line(line: Option<usize>) -> String {
    match line {
        Some(n) => format!(" at line {n}"),
        None => String::new(),
    }
}
