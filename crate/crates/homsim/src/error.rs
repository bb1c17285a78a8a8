use homsim_core::ErrorKind;

/// Front-end error. [`AppError::exit_code`] and [`AppError::prefix`] give
/// the process status and the diagnostic tag.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),

    #[error("{key}: {source}")]
    Model {
        key: String,
        #[source]
        source: homsim_core::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn model(key: &str, source: homsim_core::Error) -> Self {
        AppError::Model { key: key.to_string(), source }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub fn prefix(&self) -> &'static str {
        match self {
            AppError::Config(_) => "error[config]",
            AppError::Model { source, .. } => match source.kind() {
                ErrorKind::Config => "error[config]",
                ErrorKind::Numeric => "error[numeric]",
            },
            AppError::Io { .. } | AppError::Csv(_) => "error[io]",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.prefix() {
            "error[config]" => 2,
            "error[numeric]" => 3,
            _ => 1,
        }
    }

    /// One line: prefix, then the message with any newlines flattened.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("{}: {}", self.prefix(), msg)
    }
}
