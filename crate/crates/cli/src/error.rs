use thiserror::Error;

/// Failure classes with their process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Failure {
    Usage,
    Certification,
    OracleDisagreement,
}

impl Failure {
    pub fn exit_code(self) -> i32 {
        match self {
            Failure::Usage => 1,
            Failure::Certification => 2,
            Failure::OracleDisagreement => 3,
        }
    }
}

#[derive(Debug, Clone, Error)]
#[error("[{module}] {message}{}", hint.as_ref().map(|h| format!("\n  hint: {h}")).unwrap_or_default())]
pub struct CliError {
    pub failure: Failure,
    pub module: &'static str,
    pub message: String,
    pub hint: Option<String>,
}

impl CliError {
    pub fn new(failure: Failure, module: &'static str, message: impl Into<String>) -> Self {
        CliError {
            failure,
            module,
            message: message.into(),
            hint: None,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Failure::Usage, "config", message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Failure::Usage, "io", message)
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.failure.exit_code()
    }
}
