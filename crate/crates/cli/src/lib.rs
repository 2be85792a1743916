//! Library side of the `infocomp` command: sweeps, figure tables, the
//! verification report and simulated tomography runs.

pub mod error;
pub mod figure;
pub mod output;
pub mod sweep;
pub mod tomo_run;
pub mod verify;

pub use error::{CliError, EXIT_USAGE, EXIT_VERIFY_FAILED};
