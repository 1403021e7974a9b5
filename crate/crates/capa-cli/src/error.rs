//! Command errors classified by exit code.

use std::fmt;

/// Exit codes: 0 ok, 1 usage, 2 convergence failure, 3 verification failure.
#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Convergence(String),
    Verification(String),
}

impl CmdError {
    pub fn usage(msg: impl fmt::Display) -> Self {
        CmdError::Usage(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 1,
            CmdError::Convergence(_) => 2,
            CmdError::Verification(_) => 3,
        }
    }

    /// Classify a core error: quadrature non-convergence is its own exit
    /// code, everything else at this boundary is a usage problem.
    pub fn from_core(err: capa_core::Error) -> Self {
        match err {
            capa_core::Error::QuadratureNotConverged { .. } => {
                CmdError::Convergence(err.to_string())
            }
            other => CmdError::Usage(other.to_string()),
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(m) => write!(f, "usage error: {m}"),
            CmdError::Convergence(m) => write!(f, "convergence failure: {m}"),
            CmdError::Verification(m) => write!(f, "verification failure: {m}"),
        }
    }
}

impl std::error::Error for CmdError {}
