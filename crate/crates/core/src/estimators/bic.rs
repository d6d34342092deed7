use nalgebra::{Cholesky, DMatrix, DVector};

use super::{residual_sum_of_squares, FitResult, Normal};
use crate::error::{Error, Result};

/// Largest `k` accepted by the all-subsets search.
pub const BIC_MAX_REGRESSORS: usize = 20;

// RSS values below this fraction of y'y are rounding noise and treated as equal.
const RSS_FLOOR: f64 = 1e-20;

/// Post-model-selection least squares: search all `2^k` submodels for the
/// one minimizing `n log(RSS/n) + log(n) * |model|`, then refit on it.
///
/// Ties go to the smaller model, then to the lexicographically smaller
/// indicator vector.
pub fn fit_bic_select(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitResult> {
    let normal = Normal::new(x, y)?;
    let k = normal.k();
    if k > BIC_MAX_REGRESSORS {
        return Err(Error::TooManyRegressors {
            k,
            limit: BIC_MAX_REGRESSORS,
        });
    }
    normal.chol()?;
    let nf = normal.n as f64;
    let floor = (RSS_FLOOR * y.norm_squared()).max(f64::MIN_POSITIVE);

    let mut best: Option<(f64, usize, Vec<bool>, DVector<f64>)> = None;
    for mask in 0u32..(1u32 << k) {
        let cols: Vec<usize> = (0..k).filter(|j| mask & (1 << j) != 0).collect();
        let theta = restricted_fit(&normal, &cols)?;
        let rss = residual_sum_of_squares(x, y, &theta).max(floor);
        let bic = nf * (rss / nf).ln() + nf.ln() * cols.len() as f64;
        let bits: Vec<bool> = (0..k).map(|j| mask & (1 << j) != 0).collect();
        let better = match &best {
            None => true,
            Some((b, size, b_bits, _)) => {
                bic < *b || (bic == *b && (cols.len(), &bits) < (*size, b_bits))
            }
        };
        if better {
            best = Some((bic, cols.len(), bits, theta));
        }
    }
    let (_, _, _, theta) = best.expect("at least the empty model is scored");
    Ok(FitResult::exact(theta))
}

fn restricted_fit(normal: &Normal, cols: &[usize]) -> Result<DVector<f64>> {
    let mut theta = DVector::zeros(normal.k());
    if cols.is_empty() {
        return Ok(theta);
    }
    let gram = DMatrix::from_fn(cols.len(), cols.len(), |r, c| normal.xtx[(cols[r], cols[c])]);
    let rhs = DVector::from_fn(cols.len(), |r, _| normal.xty[cols[r]]);
    let sol = Cholesky::new(gram).ok_or(Error::SingularDesign)?.solve(&rhs);
    for (r, &j) in cols.iter().enumerate() {
        theta[j] = sol[r];
    }
    Ok(theta)
}
