use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid --{field}: {msg}")]
    Validation { field: &'static str, msg: String },
    #[error("identity violated in {0} record(s)")]
    Identity(usize),
    #[error("{what} supports at most {cap} vertices, got {got}")]
    OracleCap { what: &'static str, cap: usize, got: usize },
    #[error(transparent)]
    Core(#[from] tourney_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn invalid(field: &'static str, msg: impl Into<String>) -> Self {
        CliError::Validation { field, msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Core(tourney_core::Error::BadParam(_)) => 2,
            CliError::Core(tourney_core::Error::Parse { .. } | tourney_core::Error::Format(_)) => 2,
            CliError::Identity(_) => 3,
            CliError::OracleCap { .. } => 4,
            CliError::Core(tourney_core::Error::TooLarge { .. }) => 4,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::invalid("n", "zero").exit_code(), 2);
        assert_eq!(CliError::Identity(1).exit_code(), 3);
        assert_eq!(CliError::OracleCap { what: "exact_dp", cap: 20, got: 21 }.exit_code(), 4);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "x");
        assert_eq!(CliError::from(tourney_core::Error::from(io)).exit_code(), 1);
    }
}
