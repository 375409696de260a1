use thiserror::Error;

use crate::game_core::GameError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("policy has no entry for reachable infostate {0}")]
    MissingInfostate(String),
    #[error("invalid policy row at {key}: {reason}")]
    BadRow { key: String, reason: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix game has no rows or no columns")]
    Empty,
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("simplex did not converge within {0} pivots")]
    PivotLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("population for player {0} is empty")]
    EmptyPopulation(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("game has more than {0} pure strategies for one player")]
    TooManyStrategies(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Game(#[from] GameError),
}
