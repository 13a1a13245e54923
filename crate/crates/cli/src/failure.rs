use std::fmt;

/// Exit code for input and validation problems.
pub const EXIT_INPUT: i32 = 2;
/// Exit code for solver failures.
pub const EXIT_SOLVER: i32 = 3;
/// Exit code when a work cap refuses the request.
pub const EXIT_CAP: i32 = 4;

/// A command failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    pub fn solver(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_SOLVER, message: message.into() }
    }

    pub fn cap(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_CAP, message: message.into() }
    }

    /// Machine-readable form printed to stderr before exiting.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "code": self.code, "message": self.message } })
            .to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<partls::Error> for Failure {
    fn from(err: partls::Error) -> Failure {
        match &err {
            partls::Error::EnumerationCap { .. } => Failure::cap(format!(
                "{err}; rerun with --solver bnb or raise --enumeration-cap"
            )),
            partls::Error::IterationCap { .. } | partls::Error::AllSubproblemsFailed(_) => {
                Failure::solver(err.to_string())
            }
            _ => Failure::input(err.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Failure {
        Failure::input(err.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(err: csv::Error) -> Failure {
        Failure::input(err.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(err: serde_json::Error) -> Failure {
        Failure::input(err.to_string())
    }
}
