//! Point estimators for the regression coefficient vector.
//!
//! Every estimator returns a [`FitResult`] whose `pattern` is the exact
//! zero/nonzero indicator of `theta_hat`.

mod bic;
mod ls;
pub(crate) mod scad;
mod threshold;

use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::penalties::{ScadParams, DEFAULT_A};
use crate::tuning::{gcv_select, LambdaRule};

pub use bic::{fit_bic_select, BIC_MAX_REGRESSORS};
pub use ls::fit_least_squares;
pub use scad::{fit_scad, fit_scad_cd, fit_scad_lqa, scad_objective, ScadSolver, SolverOptions};
pub use threshold::{fit_hard_threshold, fit_scalar_hodges, hodges_scalar};

/// `r(theta)`: true where the coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsityPattern {
    bits: Vec<bool>,
}

impl SparsityPattern {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_nonzero(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// True when every coefficient is zero.
    pub fn is_all_zero(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// Componentwise `self <= other`: no nonzero where `other` has a zero.
    pub fn is_subset_of(&self, other: &SparsityPattern) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }
}

impl fmt::Display for SparsityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn sparsity_pattern(theta: &DVector<f64>) -> SparsityPattern {
    SparsityPattern {
        bits: theta.iter().map(|v| *v != 0.0).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: DVector<f64>,
    pub pattern: SparsityPattern,
    /// Tuning parameter actually used; 0 for untuned estimators.
    pub lambda_used: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn new(theta_hat: DVector<f64>, lambda_used: f64, iterations: usize, converged: bool) -> Self {
        let pattern = sparsity_pattern(&theta_hat);
        Self {
            theta_hat,
            pattern,
            lambda_used,
            iterations,
            converged,
        }
    }

    pub(crate) fn exact(theta_hat: DVector<f64>) -> Self {
        Self::new(theta_hat, 0.0, 0, true)
    }
}

/// Anything that maps a data set `(X, y)` to a coefficient estimate.
pub trait Estimator: Send + Sync {
    /// Short identifier used in reports.
    fn name(&self) -> String;

    fn fit(&self, x: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitResult>;
}

/// How the SCAD tuning parameter is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaChoice {
    Fixed(f64),
    /// Generalized cross-validation over the grid built by the rule.
    Gcv(LambdaRule),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorConfig {
    LeastSquares,
    Scad {
        a: f64,
        solver: ScadSolver,
        lambda: LambdaChoice,
        options: SolverOptions,
    },
    HardThreshold {
        exponent: f64,
    },
    ScalarHodges,
    BicSelect,
}

impl EstimatorConfig {
    /// SCAD with `a = 3.7`, LQA and GCV over `rule`'s grid.
    pub fn scad2(rule: LambdaRule) -> Self {
        EstimatorConfig::Scad {
            a: DEFAULT_A,
            solver: ScadSolver::Lqa,
            lambda: LambdaChoice::Gcv(rule),
            options: SolverOptions::default(),
        }
    }

    pub fn hard_threshold() -> Self {
        EstimatorConfig::HardThreshold { exponent: 0.25 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EstimatorConfig::Scad { a, lambda, options, .. } => {
                ScadParams::new(0.0, *a)?;
                options.validate()?;
                if let LambdaChoice::Fixed(l) = lambda {
                    ScadParams::new(*l, *a)?;
                }
                Ok(())
            }
            EstimatorConfig::HardThreshold { exponent } => {
                if *exponent > 0.0 && *exponent < 0.5 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "hard-threshold exponent must lie in (0, 1/2), got {exponent}"
                    )))
                }
            }
            _ => Ok(()),
        }
    }
}

impl Estimator for EstimatorConfig {
    fn name(&self) -> String {
        match self {
            EstimatorConfig::LeastSquares => "ls".into(),
            EstimatorConfig::Scad { solver, .. } => match solver {
                ScadSolver::Lqa => "scad-lqa".into(),
                ScadSolver::CoordinateDescent => "scad-cd".into(),
            },
            EstimatorConfig::HardThreshold { .. } => "hard".into(),
            EstimatorConfig::ScalarHodges => "hodges".into(),
            EstimatorConfig::BicSelect => "bic".into(),
        }
    }

    fn fit(&self, x: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitResult> {
        self.validate()?;
        match self {
            EstimatorConfig::LeastSquares => fit_least_squares(x, y),
            EstimatorConfig::Scad {
                a,
                solver,
                lambda,
                options,
            } => match lambda {
                LambdaChoice::Fixed(l) => fit_scad(x, y, &ScadParams::new(*l, *a)?, *solver, options),
                LambdaChoice::Gcv(rule) => {
                    let sigma = crate::tuning::sigma_hat(x, y)?;
                    let grid = crate::tuning::lambda_grid(rule, x.nrows(), sigma)?;
                    gcv_select(x, y, *a, &grid, *solver, options).map(|(_, fit)| fit)
                }
            },
            EstimatorConfig::HardThreshold { exponent } => fit_hard_threshold(x, y, *exponent),
            EstimatorConfig::ScalarHodges => fit_scalar_hodges(x, y),
            EstimatorConfig::BicSelect => fit_bic_select(x, y),
        }
    }
}

/// Cross products of one data set, shared by the solvers.
#[derive(Debug, Clone)]
pub(crate) struct Normal {
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
    pub n: usize,
}

impl Normal {
    pub fn new(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::invalid("empty design"));
        }
        Ok(Self {
            xtx: x.tr_mul(x),
            xty: x.tr_mul(y),
            n: x.nrows(),
        })
    }

    pub fn k(&self) -> usize {
        self.xty.len()
    }

    pub fn chol(&self) -> Result<Cholesky<f64, Dyn>> {
        if self.n < self.k() {
            return Err(Error::SingularDesign);
        }
        let chol = Cholesky::new(self.xtx.clone()).ok_or(Error::SingularDesign)?;
        // reject numerically rank-deficient designs that still factor
        let diag = chol.l_dirty().diagonal();
        let max_scale = self.xtx.diagonal().max().sqrt();
        if diag.iter().any(|d| !(*d > 1e-7 * max_scale)) {
            return Err(Error::SingularDesign);
        }
        Ok(chol)
    }

    pub fn least_squares(&self) -> Result<DVector<f64>> {
        Ok(self.chol()?.solve(&self.xty))
    }
}

pub(crate) fn residual_sum_of_squares(x: &DMatrix<f64>, y: &DVector<f64>, theta: &DVector<f64>) -> f64 {
    (y - x * theta).norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_examples() {
        let t = DVector::from_vec(vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(sparsity_pattern(&t).to_string(), "11001000");
        assert!(sparsity_pattern(&DVector::zeros(8)).is_all_zero());
        assert_eq!(sparsity_pattern(&DVector::from_element(8, 1.0)).count_nonzero(), 8);
        // -0.0 compares equal to zero
        assert!(sparsity_pattern(&DVector::from_vec(vec![-0.0])).is_all_zero());
    }

    #[test]
    fn subset_order() {
        let a = sparsity_pattern(&DVector::from_vec(vec![1.0, 0.0, 0.0]));
        let b = sparsity_pattern(&DVector::from_vec(vec![1.0, 2.0, 0.0]));
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(a.is_subset_of(&a));
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::HardThreshold { exponent: 0.5 }.validate().is_err());
        assert!(EstimatorConfig::HardThreshold { exponent: 0.25 }.validate().is_ok());
        let bad = EstimatorConfig::Scad {
            a: 2.0,
            solver: ScadSolver::Lqa,
            lambda: LambdaChoice::Fixed(0.1),
            options: SolverOptions::default(),
        };
        assert!(bad.validate().is_err());
    }
}
