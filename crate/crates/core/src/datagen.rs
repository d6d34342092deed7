//! Designs, errors and local parameter paths for the linear model
//! `y = X theta + eps` with standard normal errors.

use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// How the n x k regressor matrix is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignKind {
    /// Rows i.i.d. N(0, Sigma) with `Sigma_ij = rho^|i-j|`, redrawn per stream.
    GaussianAr { rho: f64 },
    /// A stored nonstochastic design returned unchanged.
    FixedMatrix(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    n: usize,
    k: usize,
    kind: DesignKind,
}

impl DesignSpec {
    pub fn gaussian_ar(n: usize, k: usize, rho: f64) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::invalid("design needs n >= 1 and k >= 1"));
        }
        check_rho(rho)?;
        Ok(Self {
            n,
            k,
            kind: DesignKind::GaussianAr { rho },
        })
    }

    /// Wraps a fixed design; requires `n >= k` and full column rank.
    pub fn fixed(x: DMatrix<f64>) -> Result<Self> {
        let (n, k) = x.shape();
        if k == 0 || n < k {
            return Err(Error::invalid(format!(
                "fixed design must have n >= k >= 1, got {n} x {k}"
            )));
        }
        if Cholesky::new(x.transpose() * &x).is_none() {
            return Err(Error::SingularDesign);
        }
        Ok(Self {
            n,
            k,
            kind: DesignKind::FixedMatrix(x),
        })
    }

    /// Loads a fixed design from a row-major CSV file without header.
    pub fn fixed_from_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::fixed(read_matrix_csv(path)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> &DesignKind {
        &self.kind
    }

    /// Same design family at another sample size. Fixed designs cannot be resized.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        match self.kind {
            DesignKind::GaussianAr { rho } => Self::gaussian_ar(n, self.k, rho),
            DesignKind::FixedMatrix(_) if n == self.n => Ok(self.clone()),
            DesignKind::FixedMatrix(_) => Err(Error::invalid(
                "a fixed design matrix cannot be resized to another sample size",
            )),
        }
    }

    /// The regressor second-moment matrix used in the model error:
    /// the population Sigma for Gaussian designs, X'X/n for fixed ones.
    pub fn covariance(&self) -> DMatrix<f64> {
        match &self.kind {
            DesignKind::GaussianAr { rho } => ar1_covariance(self.k, *rho)
                .expect("rho validated at construction"),
            DesignKind::FixedMatrix(x) => x.transpose() * x / self.n as f64,
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::invalid(format!("AR correlation must satisfy |rho| < 1, got {rho}")));
    }
    Ok(())
}

/// Toeplitz covariance with entries `rho^|i-j|`.
pub fn ar1_covariance(k: usize, rho: f64) -> Result<DMatrix<f64>> {
    if k == 0 {
        return Err(Error::invalid("covariance dimension must be positive"));
    }
    check_rho(rho)?;
    Ok(DMatrix::from_fn(k, k, |i, j| rho.powi(i.abs_diff(j) as i32)))
}

fn lower_factor(sigma: DMatrix<f64>) -> Result<DMatrix<f64>> {
    Cholesky::new(sigma)
        .map(|c| c.l())
        .ok_or_else(|| Error::Numeric("covariance factorization failed".into()))
}

fn standard_normal_matrix(n: usize, k: usize, stream: &RngStream) -> DMatrix<f64> {
    let mut rng = stream.rng();
    // row-major fill: the first m rows do not depend on n
    let mut z = DMatrix::zeros(n, k);
    for t in 0..n {
        for j in 0..k {
            z[(t, j)] = rng.sample(StandardNormal);
        }
    }
    z
}

/// Draws the regressor matrix for `spec` from `stream`.
pub fn sample_design(spec: &DesignSpec, stream: &RngStream) -> Result<DMatrix<f64>> {
    match &spec.kind {
        DesignKind::FixedMatrix(x) => Ok(x.clone()),
        DesignKind::GaussianAr { rho } => {
            let l = lower_factor(ar1_covariance(spec.k, *rho)?)?;
            let z = standard_normal_matrix(spec.n, spec.k, stream);
            Ok(z * l.transpose())
        }
    }
}

/// A nonstochastic design whose empirical second moment `X'X/n` equals
/// `Sigma = ar1_covariance(k, rho)` exactly. A Gaussian draw is whitened
/// against its own sample moment and recoloured with Sigma's factor.
pub fn exact_moment_design(n: usize, k: usize, rho: f64, stream: &RngStream) -> Result<DMatrix<f64>> {
    if n < k {
        return Err(Error::invalid("exact-moment design needs n >= k"));
    }
    let target = lower_factor(ar1_covariance(k, rho)?)?;
    let z = standard_normal_matrix(n, k, stream);
    let sample = lower_factor(z.transpose() * &z / n as f64)?;
    // X = Z L_S^{-T} L_Sigma^T
    let whiten = sample
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("sample moment factor not invertible".into()))?;
    Ok(z * whiten * target.transpose())
}

/// `n` i.i.d. standard normal errors.
pub fn sample_errors(n: usize, stream: &RngStream) -> Result<DVector<f64>> {
    if n == 0 {
        return Err(Error::invalid("error vector needs n >= 1"));
    }
    let mut rng = stream.rng();
    Ok(DVector::from_fn(n, |_, _| rng.sample(StandardNormal)))
}

/// Local alternatives `theta(gamma) = theta0 + (gamma / sqrt(n)) eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPath {
    pub theta0: DVector<f64>,
    pub eta: DVector<f64>,
    pub gamma_grid: Vec<f64>,
    pub n: usize,
}

impl ParameterPath {
    pub fn new(theta0: DVector<f64>, eta: DVector<f64>, gamma_grid: Vec<f64>, n: usize) -> Result<Self> {
        if theta0.len() != eta.len() {
            return Err(Error::DimensionMismatch {
                expected: theta0.len(),
                got: eta.len(),
            });
        }
        if n == 0 {
            return Err(Error::invalid("path sample size must be positive"));
        }
        if gamma_grid.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::invalid("gamma values must be finite and nonnegative"));
        }
        if gamma_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("gamma grid must be strictly increasing"));
        }
        Ok(Self {
            theta0,
            eta,
            gamma_grid,
            n,
        })
    }

    pub fn k(&self) -> usize {
        self.theta0.len()
    }

    pub fn theta(&self, gamma: f64) -> Result<DVector<f64>> {
        make_theta(self, gamma)
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }
}

pub fn make_theta(path: &ParameterPath, gamma: f64) -> Result<DVector<f64>> {
    if path.theta0.len() != path.eta.len() {
        return Err(Error::DimensionMismatch {
            expected: path.theta0.len(),
            got: path.eta.len(),
        });
    }
    if !(gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
    }
    let step = gamma / (path.n as f64).sqrt();
    Ok(&path.theta0 + &path.eta * step)
}

/// `points` equidistant values from 0 to `max`, both endpoints included.
pub fn equidistant_grid(max: f64, points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(Error::invalid("grid needs at least one point")),
        1 => Ok(vec![0.0]),
        _ => {
            let step = max / (points - 1) as f64;
            Ok((0..points).map(|i| i as f64 * step).collect())
        }
    }
}

/// Reads a numeric matrix, one row per line, comma separated.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::invalid(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    got: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid(format!("{} contains no rows", path.display())));
    }
    let k = rows[0].len();
    Ok(DMatrix::from_row_iterator(rows.len(), k, rows.into_iter().flatten()))
}
