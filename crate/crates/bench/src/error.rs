use thiserror::Error;
use xdo_core::{GameError, SolveError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 3 when a game or strategy
    /// space is too large to enumerate, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Config(_) | BenchError::Toml(_) => 2,
            BenchError::Game(GameError::InvalidConfig(_)) => 2,
            BenchError::Solve(
                SolveError::InvalidConfig(_) | SolveError::Game(GameError::InvalidConfig(_)),
            ) => 2,
            BenchError::Game(GameError::BudgetExceeded(_)) => 3,
            BenchError::Solve(
                SolveError::TooManyStrategies(_) | SolveError::Game(GameError::BudgetExceeded(_)),
            ) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn config_err(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}
