use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ServiceError {
    #[error("no session with id {0}")]
    UnknownSession(String),
    #[error("no fixture named {0}")]
    UnknownFixture(String),
    #[error("invalid points: {0}")]
    InvalidPoints(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("it is not your turn")]
    NotYourTurn,
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("the game is over")]
    GameOver,
    #[error("storage failure: {0}")]
    Storage(String),
}

/// Wire shape of every error.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "unknown-session",
            ServiceError::UnknownFixture(_) => "unknown-fixture",
            ServiceError::InvalidPoints(_) => "invalid-points",
            ServiceError::InvalidConfig(_) => "invalid-config",
            ServiceError::NotYourTurn => "not-your-turn",
            ServiceError::IllegalMove(_) => "illegal-move",
            ServiceError::GameOver => "game-over",
            ServiceError::Storage(_) => "storage",
        }
    }

    pub fn status(&self) -> u16 {
        match self {
            ServiceError::UnknownSession(_) | ServiceError::UnknownFixture(_) => 404,
            ServiceError::NotYourTurn | ServiceError::GameOver => 409,
            ServiceError::Storage(_) => 500,
            _ => 400,
        }
    }

    pub fn body(&self) -> ErrorBody {
        let detail = match self {
            ServiceError::IllegalMove(reason) => json!({ "reason": reason }),
            ServiceError::UnknownSession(id) => json!({ "id": id }),
            ServiceError::UnknownFixture(name) => json!({ "name": name }),
            _ => Value::Null,
        };
        ErrorBody { code: self.code(), message: self.to_string(), detail }
    }
}
