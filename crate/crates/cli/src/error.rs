use infocomp::frontier::FrontierError;
use infocomp::measures::MeasureError;
use infocomp::search::SearchError;
use infocomp::states::StateError;
use infocomp::tomo::TomoError;
use thiserror::Error;

/// Exit status for a run that completed but failed verification.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Exit status for bad arguments and any other error.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Frontier(#[from] FrontierError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Tomo(#[from] TomoError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
