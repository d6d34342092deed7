use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Nonnegative losses of an estimate against the truth at sample size `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum LossSpec {
    /// `n * ||theta_hat - theta||^2`
    ScaledQuadratic,
    /// `(theta_hat - theta)' Sigma (theta_hat - theta)`
    ModelError(DMatrix<f64>),
    /// `|sqrt(n) (theta_hat - theta)_i|`
    AbsCoordinate(usize),
    /// `(c' sqrt(n) (theta_hat - theta))^2`
    Contrast(DVector<f64>),
}

impl LossSpec {
    pub fn evaluate(&self, theta_hat: &DVector<f64>, theta: &DVector<f64>, n: usize) -> Result<f64> {
        check_len(theta_hat.len(), theta.len())?;
        let d = theta_hat - theta;
        let nf = n as f64;
        match self {
            LossSpec::ScaledQuadratic => Ok(nf * d.norm_squared()),
            LossSpec::ModelError(sigma) => model_error(theta_hat, theta, sigma),
            LossSpec::AbsCoordinate(i) => d
                .get(*i)
                .map(|v| nf.sqrt() * v.abs())
                .ok_or_else(|| Error::invalid(format!("coordinate {i} out of range"))),
            LossSpec::Contrast(c) => {
                check_len(d.len(), c.len())?;
                Ok(nf * c.dot(&d).powi(2))
            }
        }
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `ME = (theta_hat - theta)' Sigma (theta_hat - theta)`.
pub fn model_error(theta_hat: &DVector<f64>, theta_true: &DVector<f64>, sigma: &DMatrix<f64>) -> Result<f64> {
    check_len(theta_hat.len(), theta_true.len())?;
    check_len(theta_hat.len(), sigma.nrows())?;
    check_len(theta_hat.len(), sigma.ncols())?;
    let d = theta_hat - theta_true;
    // a PSD form can dip below zero only by rounding
    Ok((d.transpose() * sigma * &d)[(0, 0)].max(0.0))
}

/// Exact least-squares MSE `E||theta_ls - theta||^2 = trace(Sigma^{-1}) / (n - 9)`
/// for the 8-regressor AR(0.5) Gaussian design, i.e. `38 / (3n - 27)`.
pub fn ls_mse_closed_form(n: usize) -> Result<f64> {
    if n <= 9 {
        return Err(Error::invalid(format!(
            "the least-squares MSE is infinite for n <= 9, got {n}"
        )));
    }
    Ok(38.0 / (3.0 * n as f64 - 27.0))
}
