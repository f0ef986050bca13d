use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("declaration error: {0}")]
    Declaration(String),
    #[error("unsupported monomial: {0}")]
    Support(String),
    #[error("unsupported localization: {0}")]
    Localization(String),
    #[error("relation error: {0}")]
    Relation(String),
    #[error("invalid ring definition: {0}")]
    Definition(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("sample rejected: {0}")]
    Sample(String),
}

pub type Result<T> = core::result::Result<T, Error>;
