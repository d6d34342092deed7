//! Losses, the Monte Carlo engine and risk reports.

mod loss;
mod mc;
mod report;

pub use loss::{ls_mse_closed_form, model_error, LossSpec};
pub use mc::{run_mc, run_sweep, McOptions, FAILURE_LIMIT};
pub use report::{write_file_checked, FigureMeasure, RiskReport, RiskRow, BOOTSTRAP_RESAMPLES};
