use thiserror::Error;

#[derive(Debug, Error)]
pub enum VdwError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("modulus mismatch: expected {expected}, found {found}")]
    ModulusMismatch { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size guard exceeded: {what} is {actual}, limit {limit}")]
    Guard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("refused: {0}")]
    Refused(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, VdwError>;

pub(crate) fn check_modulus(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(VdwError::ModulusMismatch { expected, found });
    }
    Ok(())
}
