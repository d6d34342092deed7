//! Lambda grids and generalized cross-validation for SCAD.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimators::scad::{effective_parameters, solve_scad};
use crate::estimators::{residual_sum_of_squares, FitResult, Normal, ScadSolver, SolverOptions};
use crate::penalties::ScadParams;

/// Multipliers of `sigma_hat / sqrt(n)` searched by GCV.
pub const DEFAULT_DELTAS: [f64; 7] = [0.9, 1.1, 1.3, 1.5, 1.7, 1.9, 2.0];

/// Sample size the rescaled grids are anchored at.
const BASE_N: f64 = 60.0;

/// Sample-size rescaling of the basic grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaScale {
    /// `log(n) / log(60)`
    LogRatio,
    /// `(n / 60)^{1/10}`
    Pow10,
    /// `(n / 60)^{1/4}`
    Pow4,
    /// No rescaling.
    Unit,
}

impl LambdaScale {
    pub fn factor(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            LambdaScale::LogRatio => n.ln() / BASE_N.ln(),
            LambdaScale::Pow10 => (n / BASE_N).powf(0.1),
            LambdaScale::Pow4 => (n / BASE_N).powf(0.25),
            LambdaScale::Unit => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRule {
    pub deltas: Vec<f64>,
    pub scale: LambdaScale,
}

impl LambdaRule {
    pub fn new(deltas: Vec<f64>, scale: LambdaScale) -> Result<Self> {
        if deltas.is_empty() || deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("lambda rule needs a nonempty set of finite deltas >= 0"));
        }
        Ok(Self { deltas, scale })
    }

    pub fn with_scale(scale: LambdaScale) -> Self {
        Self {
            deltas: DEFAULT_DELTAS.to_vec(),
            scale,
        }
    }
}

/// `sqrt(RSS / (n - k))` from the full least-squares fit.
pub fn sigma_hat(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<f64> {
    let (n, k) = x.shape();
    if n <= k {
        return Err(Error::invalid(format!("sigma_hat needs n > k, got n={n}, k={k}")));
    }
    let theta = Normal::new(x, y)?.least_squares()?;
    Ok((residual_sum_of_squares(x, y, &theta) / (n - k) as f64).sqrt())
}

/// `{delta * sigma_hat / sqrt(n) * scale(n)}`, ascending.
pub fn lambda_grid(rule: &LambdaRule, n: usize, sigma_hat: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("lambda grid needs n >= 2"));
    }
    if !(sigma_hat.is_finite() && sigma_hat >= 0.0) {
        return Err(Error::invalid(format!("sigma_hat must be finite and >= 0, got {sigma_hat}")));
    }
    let base = sigma_hat / (n as f64).sqrt() * rule.scale.factor(n);
    let mut grid: Vec<f64> = rule.deltas.iter().map(|d| d * base).collect();
    grid.sort_by(f64::total_cmp);
    Ok(grid)
}

/// `GCV(lambda) = (RSS / n) / (1 - e(lambda) / n)^2`.
pub(crate) fn gcv_score(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    normal: &Normal,
    fit: &FitResult,
    p: &ScadParams,
) -> Result<f64> {
    let nf = normal.n as f64;
    let rss = residual_sum_of_squares(x, y, &fit.theta_hat);
    let e = effective_parameters(normal, &fit.theta_hat, p)?;
    let denom = 1.0 - e / nf;
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(rss / nf / (denom * denom))
}

/// Fits SCAD for every lambda in `grid` and keeps the GCV minimizer.
/// Ties go to the smaller lambda, so the result does not depend on grid order.
pub fn gcv_select(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    a: f64,
    grid: &[f64],
    solver: ScadSolver,
    options: &SolverOptions,
) -> Result<(f64, FitResult)> {
    if grid.is_empty() {
        return Err(Error::invalid("GCV grid is empty"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let normal = Normal::new(x, y)?;

    let mut best: Option<(f64, f64, FitResult)> = None;
    for &lambda in &sorted {
        let p = ScadParams::new(lambda, a)?;
        let fit = solve_scad(&normal, &p, solver, options)?;
        let score = gcv_score(x, y, &normal, &fit, &p)?;
        if best.as_ref().is_none_or(|(s, _, _)| score < *s) {
            best = Some((score, lambda, fit));
        }
    }
    let (_, lambda, fit) = best.expect("grid is nonempty");
    Ok((lambda, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{sample_design, sample_errors, DesignSpec};
    use crate::rng::{Purpose, RngStream};
    use approx::assert_abs_diff_eq;

    fn noisy(seed: u64, n: usize) -> (DMatrix<f64>, DVector<f64>) {
        let spec = DesignSpec::gaussian_ar(n, 8, 0.5).unwrap();
        let x = sample_design(&spec, &RngStream::new(seed, 0, Purpose::Design)).unwrap();
        let theta = DVector::from_vec(vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        let y = &x * theta + sample_errors(n, &RngStream::new(seed, 0, Purpose::Errors)).unwrap();
        (x, y)
    }

    #[test]
    fn sigma_hat_cases() {
        let x = DMatrix::from_fn(20, 3, |t, j| ((t + 1) as f64 * (j + 1) as f64).sin());
        let y = &x * DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(sigma_hat(&x, &y).unwrap() < 1e-12);
        assert!(sigma_hat(&DMatrix::identity(3, 3), &DVector::zeros(3)).is_err());

        // n = k + 1 with residual sum of squares 2
        let x = DMatrix::from_element(2, 1, 1.0);
        let y = DVector::from_vec(vec![1.0, -1.0]);
        assert_abs_diff_eq!(sigma_hat(&x, &y).unwrap(), 2f64.sqrt(), epsilon = 1e-14);

        let n = 10_000;
        let spec = DesignSpec::gaussian_ar(n, 8, 0.5).unwrap();
        let x = sample_design(&spec, &RngStream::new(8, 0, Purpose::Design)).unwrap();
        let y = sample_errors(n, &RngStream::new(8, 0, Purpose::Errors)).unwrap();
        assert!((sigma_hat(&x, &y).unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn grid_scales() {
        let rule = LambdaRule::with_scale(LambdaScale::LogRatio);
        let g = lambda_grid(&rule, 60, 1.0).unwrap();
        assert_eq!(g.len(), 7);
        assert_abs_diff_eq!(g[0], 0.9 / 60f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g[6], 2.0 / 60f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(LambdaScale::Pow4.factor(960), 2.0, epsilon = 1e-14);
        assert_eq!(LambdaScale::Unit.factor(960), 1.0);
        assert_abs_diff_eq!(LambdaScale::LogRatio.factor(60), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(LambdaScale::Pow10.factor(60), 1.0, epsilon = 1e-15);
        assert!(lambda_grid(&rule, 1, 1.0).is_err());
    }

    #[test]
    fn grid_is_homogeneous_in_sigma() {
        for scale in [LambdaScale::LogRatio, LambdaScale::Pow10, LambdaScale::Pow4, LambdaScale::Unit] {
            let rule = LambdaRule::with_scale(scale);
            let g1 = lambda_grid(&rule, 240, 1.3).unwrap();
            let g2 = lambda_grid(&rule, 240, 2.6).unwrap();
            for (a, b) in g1.iter().zip(&g2) {
                assert_abs_diff_eq!(2.0 * a, *b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn log_ratio_rate_and_unit_rate() {
        let log_rule = LambdaRule::with_scale(LambdaScale::LogRatio);
        let unit_rule = LambdaRule::with_scale(LambdaScale::Unit);
        for n in [60, 120, 240, 480, 960] {
            let nf = n as f64;
            for (i, &l) in lambda_grid(&log_rule, n, 1.0).unwrap().iter().enumerate() {
                let r = nf.sqrt() * l / nf.ln();
                let d = DEFAULT_DELTAS[i];
                assert_abs_diff_eq!(r, d / 60f64.ln(), epsilon = 1e-12);
            }
            for (i, &l) in lambda_grid(&unit_rule, n, 1.0).unwrap().iter().enumerate() {
                assert_abs_diff_eq!(nf.sqrt() * l, DEFAULT_DELTAS[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn singleton_grid() {
        let (x, y) = noisy(1, 60);
        let (l, fit) = gcv_select(&x, &y, 3.7, &[0.17], ScadSolver::Lqa, &SolverOptions::default()).unwrap();
        assert_eq!(l, 0.17);
        assert_eq!(fit.lambda_used, 0.17);
        assert!(gcv_select(&x, &y, 3.7, &[], ScadSolver::Lqa, &SolverOptions::default()).is_err());
    }

    #[test]
    fn ties_go_to_smallest_lambda() {
        // with |LS coefficients| far above a * lambda every lambda leaves the fit at LS
        let (x, _) = noisy(2, 60);
        let y = &x * DVector::from_element(8, 50.0) + DVector::from_fn(60, |t, _| ((t * 3) as f64).sin());
        let grid = [0.03, 0.01, 0.02];
        let (l, _) = gcv_select(&x, &y, 3.7, &grid, ScadSolver::Lqa, &SolverOptions::default()).unwrap();
        assert_eq!(l, 0.01);
    }

    #[test]
    fn order_invariance() {
        let (x, y) = noisy(3, 60);
        let sigma = sigma_hat(&x, &y).unwrap();
        let grid = lambda_grid(&LambdaRule::with_scale(LambdaScale::Unit), 60, sigma).unwrap();
        let mut rev = grid.clone();
        rev.reverse();
        let opts = SolverOptions::default();
        let a = gcv_select(&x, &y, 3.7, &grid, ScadSolver::Lqa, &opts).unwrap();
        let b = gcv_select(&x, &y, 3.7, &rev, ScadSolver::Lqa, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gcv_rejects_overshrinking() {
        let n = 60;
        let (raw, _) = noisy(4, n);
        let x = raw.qr().q() * (n as f64).sqrt();
        let theta = DVector::from_vec(vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        let y = &x * &theta + sample_errors(n, &RngStream::new(4, 1, Purpose::Errors)).unwrap();
        let sigma = sigma_hat(&x, &y).unwrap();
        let opts = SolverOptions::default();
        let normal = Normal::new(&x, &y).unwrap();
        let score = |l: f64| {
            let p = ScadParams::with_lambda(l).unwrap();
            let fit = solve_scad(&normal, &p, ScadSolver::Lqa, &opts).unwrap();
            gcv_score(&x, &y, &normal, &fit, &p).unwrap()
        };
        let (small, huge) = (score(0.01), score(100.0 * sigma));
        assert!(small < huge, "GCV small {small} vs huge {huge}");
        let (l, fit) = gcv_select(&x, &y, 3.7, &[0.01, 100.0 * sigma], ScadSolver::Lqa, &opts).unwrap();
        assert_eq!(l, 0.01);
        assert!(fit.theta_hat[0] != 0.0);
    }
}
