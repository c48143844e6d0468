use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The document does not conform to its schema.
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("structural error: {0}")]
    Structural(String),

    /// A type invariant is violated (limits, unit axes, scale factors...).
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("lookup error: {0}")]
    Lookup(String),

    #[error("ambiguous touch: active taxels span links {0:?}")]
    Ambiguous(Vec<String>),

    #[error("joint state error: {0}")]
    State(String),

    #[error("cannot estimate joint `{0}`: no prior and no cue")]
    Estimation(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("degenerate segment between landmarks `{0}` and `{1}`")]
    DegenerateSegment(String, String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    /// True for errors caused by a malformed or inconsistent input document.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Structural(_)
                | Error::Invariant(_)
                | Error::Configuration(_)
                | Error::Scenario(_)
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
