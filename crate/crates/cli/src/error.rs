use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// A located problem in an input file. Line and column are 1-based and the
/// column points at the first character of the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(file: &str, line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            file: file.to_owned(),
            line,
            column: column.max(1),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", render(.0))]
    Parse(Vec<ParseError>),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Engine(#[from] proxfence::Error),
    #[error("{0}")]
    Runtime(String),
}

fn render(errors: &[ParseError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(vec![e])
    }
}

impl From<Vec<ParseError>> for CliError {
    fn from(e: Vec<ParseError>) -> Self {
        CliError::Parse(e)
    }
}

impl CliError {
    /// 1 for malformed input, 2 for everything that goes wrong afterwards.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            _ => 2,
        }
    }
}
