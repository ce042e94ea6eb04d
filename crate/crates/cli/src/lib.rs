//! Command-line front end: argument parsing, run configuration and the
//! command implementations behind the `spherelab` binary.

pub mod commands;
pub mod config;

pub use commands::{run, Outcome, Report};
pub use config::{Cli, RunConfig};

/// Exit code for invalid inputs.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERIC: i32 = 3;

/// Exit code for a library error.
pub fn exit_code(e: &spherelab::Error) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}
