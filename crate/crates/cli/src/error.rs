use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("descriptor `{descriptor}`: {message}")]
    Descriptor { descriptor: String, message: String },
    #[error("invalid value for `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
    #[error("config file {path}: {source}")]
    Config {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Numeric(#[from] cg_uncert::Error),
}

pub type CliResult<T> = Result<T, CliError>;
