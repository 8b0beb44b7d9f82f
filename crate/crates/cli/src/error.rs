use std::fmt;

pub const PARSE: i32 = 2;
pub const DIMENSION: i32 = 3;
pub const SOLVER: i32 = 4;
pub const PARAMETER: i32 = 5;
pub const NOT_SEPARABLE: i32 = 6;
pub const NOT_ULTRAMETRIC: i32 = 7;

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError::new(PARSE, message)
    }

    pub fn parameter(message: impl Into<String>) -> Self {
        CliError::new(PARAMETER, message)
    }

    pub fn kind(&self) -> &'static str {
        match self.code {
            PARSE => "PARSE",
            DIMENSION => "DIMENSION",
            SOLVER => "SOLVER",
            PARAMETER => "PARAMETER",
            NOT_SEPARABLE => "NOT_SEPARABLE",
            NOT_ULTRAMETRIC => "NOT_ULTRAMETRIC",
            _ => "INTERNAL",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<tropstat::Error> for CliError {
    fn from(e: tropstat::Error) -> Self {
        use tropstat::Error::*;
        let code = match &e {
            Parse { .. } | NonFinite(_) => PARSE,
            DimensionMismatch { .. } | TooShort(_) => DIMENSION,
            Solver(_) | MalformedLp(_) => SOLVER,
            Empty(_) | InvalidParameter(_) => PARAMETER,
            NotSeparable => NOT_SEPARABLE,
            NotUltrametric(_) => NOT_ULTRAMETRIC,
        };
        CliError::new(code, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
