use std::fmt;

/// Exit status classes: bad input flags vs failures while running.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Validation,
    Runtime,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Validation => 1,
            Kind::Runtime => 2,
        }
    }
}

/// An error tagged with the pipeline stage it came from.
#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub stage: &'static str,
    pub message: String,
}

impl CliError {
    pub fn validation(stage: &'static str, message: impl fmt::Display) -> Self {
        CliError {
            kind: Kind::Validation,
            stage,
            message: message.to_string(),
        }
    }

    pub fn runtime(stage: &'static str, message: impl fmt::Display) -> Self {
        CliError {
            kind: Kind::Runtime,
            stage,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// `map_err` shorthand for runtime failures in `stage`.
pub fn at<E: fmt::Display>(stage: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::runtime(stage, e)
}
