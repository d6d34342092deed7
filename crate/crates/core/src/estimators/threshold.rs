use nalgebra::{DMatrix, DVector};

use super::{residual_sum_of_squares, FitResult, Normal};
use crate::error::{Error, Result};

/// Hodges' estimator: the sample mean, set to zero unless it strictly
/// exceeds `n^{-1/4}` in magnitude.
pub fn hodges_scalar(ybar: f64, n: usize) -> f64 {
    let threshold = (n.max(1) as f64).powf(-0.25);
    if ybar.abs() > threshold {
        ybar
    } else {
        0.0
    }
}

/// Hodges' rule applied to the single least-squares coefficient of a
/// one-column design (the sample mean for a column of ones).
pub fn fit_scalar_hodges(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitResult> {
    if x.ncols() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: x.ncols(),
        });
    }
    let normal = Normal::new(x, y)?;
    let ls = normal.least_squares()?;
    Ok(FitResult::exact(DVector::from_element(1, hodges_scalar(ls[0], normal.n))))
}

/// Componentwise hard thresholding of the full least-squares fit: a
/// coordinate is zeroed when `|theta_ls_j| <= n^{-exponent} sqrt(n) se_j`,
/// with `se_j` the usual least-squares standard error.
pub fn fit_hard_threshold(x: &DMatrix<f64>, y: &DVector<f64>, exponent: f64) -> Result<FitResult> {
    if !(exponent > 0.0 && exponent < 0.5) {
        return Err(Error::invalid(format!(
            "hard-threshold exponent must lie in (0, 1/2), got {exponent}"
        )));
    }
    let normal = Normal::new(x, y)?;
    let (n, k) = (normal.n, normal.k());
    if n <= k {
        return Err(Error::invalid("hard thresholding needs n > k for standard errors"));
    }
    let chol = normal.chol()?;
    let theta = chol.solve(&normal.xty);
    let sigma2 = residual_sum_of_squares(x, y, &theta) / (n - k) as f64;
    let inv = chol.inverse();
    let nf = n as f64;
    let scale = nf.powf(-exponent) * nf.sqrt();
    let out = DVector::from_fn(k, |j, _| {
        let se = (sigma2 * inv[(j, j)]).sqrt();
        if theta[j].abs() <= scale * se {
            0.0
        } else {
            theta[j]
        }
    });
    Ok(FitResult::exact(out))
}
