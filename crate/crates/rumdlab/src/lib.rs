//! Command-line front end for `rumdlab-core`: verification suites, sweeps
//! over the depth `n` and single estimates.

pub mod commands;
pub mod config;
pub mod io;

/// An error caused by the invocation rather than by the computation.
/// The binary maps it to exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit status for an error: 2 for usage and cap violations, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use rumdlab_core::Error;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            if matches!(
                e,
                Error::DepthOutOfRange { .. }
                    | Error::ExactCapExceeded { .. }
                    | Error::InvalidExponent(_)
                    | Error::ZeroDimension
            ) {
                return 2;
            }
        }
    }
    1
}
