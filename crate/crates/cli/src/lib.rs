//! Library side of the `soe` command-line tool: argument types, command
//! implementations and run manifests. The binary in `main.rs` only parses
//! and dispatches, so integration tests can exercise everything here.

pub mod commands;
pub mod manifest;

/// Command failures mapped onto the tool's exit-code contract:
/// 2 input error, 3 I/O error, 4 infeasible calibration targets.
#[derive(Debug)]
pub enum AppError {
    Input(String),
    Io(String),
    Infeasible(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Input(_) => 2,
            AppError::Io(_) => 3,
            AppError::Infeasible(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            AppError::Input(m) | AppError::Io(m) | AppError::Infeasible(m) => m,
        }
    }
}

impl From<soe_core::Error> for AppError {
    fn from(err: soe_core::Error) -> Self {
        match err {
            soe_core::Error::InfeasibleTargets { .. } => AppError::Infeasible(err.to_string()),
            other => AppError::Input(other.to_string()),
        }
    }
}
