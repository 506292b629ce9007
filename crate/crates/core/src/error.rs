use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {letter} at position {position} does not name a declared generator")]
    UnknownGenerator { letter: i32, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("undeclared generator `{name}` at {line}:{column}")]
    UndeclaredGenerator { name: String, line: usize, column: usize },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("coset enumeration did not close within {max_cosets} cosets")]
    LimitExceeded { max_cosets: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{0} is not prime")]
    NotPrime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("tower levels start at 1, got {0}")]
    LevelOutOfRange(u32),
    #[error("holomorphic Euler characteristic is zero")]
    ZeroChi,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed {what}: {message}")]
    Malformed { what: &'static str, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
