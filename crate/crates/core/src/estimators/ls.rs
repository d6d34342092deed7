use nalgebra::{DMatrix, DVector};

use super::{FitResult, Normal};
use crate::error::Result;

/// Ordinary least squares on the full model via the normal equations.
pub fn fit_least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitResult> {
    let theta = Normal::new(x, y)?.least_squares()?;
    Ok(FitResult::exact(theta))
}
