use thiserror::Error;

#[derive(Debug, Error)]
pub enum AuthError {
    #[error("username already registered")]
    Conflict,

    #[error("invalid request: {0}")]
    Validation(String),

    /// Deliberately carries no detail: wrong password, unknown user, bad
    /// OTP and unknown pending id all look the same.
    #[error("authentication failed")]
    AuthFailed,

    #[error("authentication request expired")]
    Expired,

    #[error("incomplete submission: {0}")]
    Incomplete(String),

    #[error("access denied")]
    Denied,

    #[error("not found")]
    NotFound,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("too many requests")]
    TooManyRequests,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("storage error: {0}")]
    Storage(String),

    #[error("mail dispatch failed: {0}")]
    Mail(String),

    #[error(transparent)]
    Core(#[from] proxauth_core::Error),
}

impl AuthError {
    /// Stable machine-readable code for the wire format.
    pub fn code(&self) -> &'static str {
        match self {
            AuthError::Conflict => "conflict",
            AuthError::Validation(_) => "validation_error",
            AuthError::AuthFailed => "auth_failed",
            AuthError::Expired => "expired",
            AuthError::Incomplete(_) => "incomplete",
            AuthError::Denied => "access_denied",
            AuthError::NotFound => "not_found",
            AuthError::InvalidState(_) => "invalid_state",
            AuthError::TooManyRequests => "too_many_requests",
            AuthError::Config(_) => "config_error",
            AuthError::Storage(_) | AuthError::Mail(_) | AuthError::Core(_) => "internal_error",
        }
    }
}

impl From<std::io::Error> for AuthError {
    fn from(e: std::io::Error) -> Self {
        AuthError::Storage(e.to_string())
    }
}

pub type AuthResult<T> = std::result::Result<T, AuthError>;
