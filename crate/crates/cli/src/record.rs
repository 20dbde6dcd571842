//! The JSON run record written to `<out>/run.json` for every run.

use serde::Serialize;
use serde_json::Value;

use mixlap_core::Error;

use crate::config::{ConfigError, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBlock {
    pub kind: String,
    pub message: String,
}

/// What a command produced before the record is assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: Value,
    pub files: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub exit_code: i32,
    pub error: ErrorBlock,
    pub result: Value,
    pub files: Vec<String>,
}

impl Failure {
    pub fn new(exit_code: i32, kind: &str, message: impl Into<String>) -> Self {
        Failure {
            exit_code,
            error: ErrorBlock {
                kind: kind.into(),
                message: message.into(),
            },
            result: Value::Null,
            files: Vec::new(),
        }
    }

    /// Keep what was computed before the failure.
    pub fn with_result(mut self, result: Value, files: Vec<String>) -> Self {
        self.result = result;
        self.files = files;
        self
    }
}

fn variant_name(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSize(_)
            | Error::DimensionOutOfRange(..)
            | Error::InvalidParameter(_)
            | Error::AlphaOutOfRange { .. }
            | Error::UnsupportedGrid(_)
            | Error::WindowOutsideTrust(..)
            | Error::TestSupportViolation
            | Error::OffLatticePlane(_)
            | Error::RegionEmpty
            | Error::ShapeMismatch { .. } => EXIT_CONFIG,
            Error::MethodDisagreement(_) | Error::NonpositiveValues { .. } => EXIT_VERIFICATION,
            _ => EXIT_NUMERICAL,
        };
        Failure::new(code, &variant_name(&e), e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let kind = match e {
            ConfigError::Parse { .. } => "ParseError",
            ConfigError::Missing(_) => "MissingFile",
            ConfigError::Constraint(_) => "ConstraintViolation",
        };
        Failure::new(EXIT_CONFIG, kind, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub config: Option<RunConfig>,
    pub status: String,
    pub exit_code: i32,
    pub result: Value,
    pub files: Vec<String>,
    pub error: Option<ErrorBlock>,
}

impl RunRecord {
    pub fn new(config: Option<RunConfig>, outcome: Result<Outcome, Failure>) -> Self {
        let (exit_code, result, files, error) = match outcome {
            Ok(o) if o.pass => (EXIT_OK, o.result, o.files, None),
            Ok(o) => (
                EXIT_VERIFICATION,
                o.result,
                o.files,
                Some(ErrorBlock {
                    kind: "VerificationFailed".into(),
                    message: "at least one check is outside its tolerance".into(),
                }),
            ),
            Err(f) => (f.exit_code, f.result, f.files, Some(f.error)),
        };
        let status = match exit_code {
            EXIT_OK => "ok",
            EXIT_VERIFICATION => "verification-failed",
            EXIT_CONFIG => "config-error",
            _ => "numerical-failure",
        };
        RunRecord {
            tool: "mixlap".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            status: status.into(),
            exit_code,
            result,
            files,
            error,
        }
    }
}
