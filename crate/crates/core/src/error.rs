use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside an operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Instance exceeds the size admitted by a brute-force oracle.
    #[error("instance too large: {0}")]
    TooLarge(String),
    /// A conditional bound whose hypothesis does not hold for this sample.
    #[error("not applicable: {0}")]
    NotApplicable(String),
    /// Numerical machinery failed where it must not for valid inputs.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
