//! SCAD-penalized least squares:
//! minimize `0.5 * ||y - X theta||^2 + n * sum_j p(|theta_j|)`.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{FitResult, Normal};
use crate::error::{Error, Result};
use crate::penalties::{scad_weighted_min, ScadParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScadSolver {
    /// Local quadratic approximation with coordinate deletion.
    Lqa,
    /// Cyclic coordinate descent with exact coordinate minimization.
    CoordinateDescent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the max-norm step falls below this.
    pub tol: f64,
    /// Iterations (LQA) or full sweeps (coordinate descent).
    pub max_iter: usize,
    /// LQA deletes coordinates whose magnitude drops below this.
    pub zero_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
            zero_tol: 1e-8,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.zero_tol >= 0.0) || self.max_iter == 0 {
            return Err(Error::invalid(format!("bad solver options {self:?}")));
        }
        Ok(())
    }
}

pub fn scad_objective(x: &DMatrix<f64>, y: &DVector<f64>, theta: &DVector<f64>, p: &ScadParams) -> f64 {
    let n = x.nrows() as f64;
    0.5 * (y - x * theta).norm_squared() + n * theta.iter().map(|t| p.value(t.abs())).sum::<f64>()
}

pub fn fit_scad(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    p: &ScadParams,
    solver: ScadSolver,
    options: &SolverOptions,
) -> Result<FitResult> {
    match solver {
        ScadSolver::Lqa => fit_scad_lqa(x, y, p, options),
        ScadSolver::CoordinateDescent => fit_scad_cd(x, y, p, options),
    }
}

pub fn fit_scad_lqa(x: &DMatrix<f64>, y: &DVector<f64>, p: &ScadParams, options: &SolverOptions) -> Result<FitResult> {
    options.validate()?;
    let normal = Normal::new(x, y)?;
    lqa(&normal, p, options)
}

pub fn fit_scad_cd(x: &DMatrix<f64>, y: &DVector<f64>, p: &ScadParams, options: &SolverOptions) -> Result<FitResult> {
    options.validate()?;
    let normal = Normal::new(x, y)?;
    coordinate_descent(&normal, p, options)
}

pub(crate) fn solve_scad(normal: &Normal, p: &ScadParams, solver: ScadSolver, options: &SolverOptions) -> Result<FitResult> {
    match solver {
        ScadSolver::Lqa => lqa(normal, p, options),
        ScadSolver::CoordinateDescent => coordinate_descent(normal, p, options),
    }
}

/// Ridge weight `p'(|t|)/|t|` of the local quadratic approximation.
fn lqa_weight(t: f64, p: &ScadParams) -> f64 {
    let a = t.abs();
    p.slope(a) / a
}

fn penalized_system(normal: &Normal, theta: &DVector<f64>, active: &[usize], p: &ScadParams) -> DMatrix<f64> {
    let nf = normal.n as f64;
    DMatrix::from_fn(active.len(), active.len(), |r, c| {
        let g = normal.xtx[(active[r], active[c])];
        if r == c {
            g + nf * lqa_weight(theta[active[r]], p)
        } else {
            g
        }
    })
}

fn lqa(normal: &Normal, p: &ScadParams, options: &SolverOptions) -> Result<FitResult> {
    let mut theta = normal.least_squares()?;
    if p.lambda == 0.0 {
        return Ok(FitResult::new(theta, 0.0, 0, true));
    }
    let k = normal.k();
    let mut active: Vec<usize> = (0..k).collect();
    let mut iterations = 0;

    while iterations < options.max_iter {
        for &j in &active {
            if theta[j].abs() < options.zero_tol {
                theta[j] = 0.0;
            }
        }
        active.retain(|&j| theta[j] != 0.0);
        if active.is_empty() {
            break;
        }
        iterations += 1;

        let system = penalized_system(normal, &theta, &active, p);
        let rhs = DVector::from_fn(active.len(), |r, _| normal.xty[active[r]]);
        let next = Cholesky::new(system)
            .ok_or_else(|| Error::Numeric("LQA system not positive definite".into()))?
            .solve(&rhs);

        let mut step = 0.0f64;
        for (r, &j) in active.iter().enumerate() {
            step = step.max((next[r] - theta[j]).abs());
            theta[j] = next[r];
        }
        if step < options.tol && active.iter().all(|&j| theta[j].abs() >= options.zero_tol) {
            break;
        }
    }
    for v in theta.iter_mut() {
        if v.abs() < options.zero_tol {
            *v = 0.0;
        }
    }
    // polish with exact coordinate minimization from the LQA point
    let (theta, sweeps, polished) = descend(normal, p, options, theta);
    Ok(FitResult::new(theta, p.lambda, iterations + sweeps, polished))
}

fn coordinate_descent(normal: &Normal, p: &ScadParams, options: &SolverOptions) -> Result<FitResult> {
    let theta = normal.least_squares()?;
    if p.lambda == 0.0 {
        return Ok(FitResult::new(theta, 0.0, 0, true));
    }
    let (theta, sweeps, converged) = descend(normal, p, options, theta);
    Ok(FitResult::new(theta, p.lambda, sweeps, converged))
}

fn descend(normal: &Normal, p: &ScadParams, options: &SolverOptions, mut theta: DVector<f64>) -> (DVector<f64>, usize, bool) {
    let k = normal.k();
    let nf = normal.n as f64;
    let mut fitted = &normal.xtx * &theta;
    let mut sweeps = 0;

    while sweeps < options.max_iter {
        sweeps += 1;
        let mut step = 0.0f64;
        for j in 0..k {
            let s = normal.xtx[(j, j)];
            // partial-residual least-squares value of coordinate j
            let z = theta[j] + (normal.xty[j] - fitted[j]) / s;
            let next = scad_weighted_min(z, nf / s, p);
            let delta = next - theta[j];
            if delta != 0.0 {
                fitted.axpy(delta, &normal.xtx.column(j), 1.0);
                theta[j] = next;
                step = step.max(delta.abs());
            }
        }
        if step < options.tol {
            return (theta, sweeps, true);
        }
    }
    (theta, sweeps, false)
}

/// `e(lambda) = tr[(X_A'X_A + n W_A)^{-1} X_A'X_A]` on the nonzero set A of
/// `theta`, with `W` the LQA ridge weights at `theta`.
pub(crate) fn effective_parameters(normal: &Normal, theta: &DVector<f64>, p: &ScadParams) -> Result<f64> {
    let active: Vec<usize> = (0..normal.k()).filter(|&j| theta[j] != 0.0).collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    let gram = DMatrix::from_fn(active.len(), active.len(), |r, c| normal.xtx[(active[r], active[c])]);
    let system = if p.lambda == 0.0 {
        gram.clone()
    } else {
        penalized_system(normal, theta, &active, p)
    };
    let solved = Cholesky::new(system)
        .ok_or_else(|| Error::Numeric("GCV smoother system not positive definite".into()))?
        .solve(&gram);
    Ok(solved.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{sample_design, sample_errors, DesignSpec};
    use crate::estimators::fit_least_squares;
    use crate::penalties::scad_univariate_min;
    use crate::rng::{Purpose, RngStream};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn theta0() -> DVector<f64> {
        DVector::from_vec(vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0])
    }

    fn data(seed: u64, n: usize) -> (DMatrix<f64>, DVector<f64>) {
        let spec = DesignSpec::gaussian_ar(n, 8, 0.5).unwrap();
        let x = sample_design(&spec, &RngStream::new(seed, 0, Purpose::Design)).unwrap();
        let e = sample_errors(n, &RngStream::new(seed, 0, Purpose::Errors)).unwrap();
        let y = &x * theta0() + e;
        (x, y)
    }

    /// Design with X'X = nI and least-squares coefficients equal to `z`.
    fn orthonormal_problem(z: &DVector<f64>, seed: u64) -> (DMatrix<f64>, DVector<f64>) {
        let n = 40;
        let k = z.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
        let x = raw.qr().q() * (n as f64).sqrt();
        let y = &x * z;
        (x, y)
    }

    #[test]
    fn zero_lambda_is_least_squares() {
        let (x, y) = data(1, 60);
        let ls = fit_least_squares(&x, &y).unwrap().theta_hat;
        let p = ScadParams::with_lambda(0.0).unwrap();
        let opts = SolverOptions::default();
        assert_eq!(fit_scad_lqa(&x, &y, &p, &opts).unwrap().theta_hat, ls);
        assert!((fit_scad_cd(&x, &y, &p, &opts).unwrap().theta_hat - &ls).amax() < 1e-8);
    }

    #[test]
    fn orthonormal_design_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let opts = SolverOptions::default();
        for case in 0..50 {
            let lambda = rng.random_range(0.1..2.0);
            let p = ScadParams::with_lambda(lambda).unwrap();
            let z = DVector::from_fn(4, |_, _| rng.random_range(-5.0 * lambda..5.0 * lambda));
            let (x, y) = orthonormal_problem(&z, case);
            for solver in [ScadSolver::Lqa, ScadSolver::CoordinateDescent] {
                let fit = fit_scad(&x, &y, &p, solver, &opts).unwrap();
                for j in 0..4 {
                    let exact = scad_univariate_min(z[j], &p).unwrap();
                    assert!(
                        (fit.theta_hat[j] - exact).abs() < 1e-6,
                        "{solver:?} z={} lambda={lambda}: {} vs {exact}",
                        z[j],
                        fit.theta_hat[j]
                    );
                }
            }
        }
    }

    #[test]
    fn lqa_does_not_increase_objective() {
        for seed in 0..40 {
            let (x, y) = data(seed, 60);
            let ls = fit_least_squares(&x, &y).unwrap().theta_hat;
            let p = ScadParams::with_lambda(1.5 / 60f64.sqrt()).unwrap();
            let fit = fit_scad_lqa(&x, &y, &p, &SolverOptions::default()).unwrap();
            assert!(fit.converged);
            assert!(scad_objective(&x, &y, &fit.theta_hat, &p) <= scad_objective(&x, &y, &ls, &p) + 1e-9);
        }
    }

    #[test]
    fn cd_objective_nonincreasing_per_sweep() {
        let (x, y) = data(9, 60);
        let p = ScadParams::with_lambda(0.25).unwrap();
        let mut prev = f64::INFINITY;
        for sweeps in 1..15 {
            let opts = SolverOptions {
                max_iter: sweeps,
                ..SolverOptions::default()
            };
            let fit = fit_scad_cd(&x, &y, &p, &opts).unwrap();
            let obj = scad_objective(&x, &y, &fit.theta_hat, &p);
            assert!(obj <= prev + 1e-9);
            prev = obj;
        }
    }

    #[test]
    fn lqa_sets_true_zeros_exactly() {
        let reps = 500;
        let sigma_scale = 1.0 / 60f64.sqrt();
        let mut hits = 0;
        for seed in 0..reps {
            let (x, y) = data(1000 + seed, 60);
            let sigma = crate::tuning::sigma_hat(&x, &y).unwrap();
            let p = ScadParams::with_lambda(sigma * sigma_scale).unwrap();
            let fit = fit_scad_lqa(&x, &y, &p, &SolverOptions::default()).unwrap();
            hits += [2, 3, 5, 6, 7].iter().filter(|&&j| fit.theta_hat[j] == 0.0).count();
        }
        let rate = hits as f64 / (5 * reps) as f64;
        // P(|Z| <= 1) for a null coordinate with the others held fixed
        assert!(rate >= 0.6827, "zero rate {rate}");
    }

    #[test]
    fn solvers_agree_on_objective() {
        let opts = SolverOptions::default();
        let mut worst = 0.0f64;
        for seed in 0..100 {
            let (x, y) = data(500 + seed, 60);
            let sigma = crate::tuning::sigma_hat(&x, &y).unwrap();
            let p = ScadParams::with_lambda(1.5 * sigma / 60f64.sqrt()).unwrap();
            let a = fit_scad_lqa(&x, &y, &p, &opts).unwrap();
            let b = fit_scad_cd(&x, &y, &p, &opts).unwrap();
            let d = (scad_objective(&x, &y, &a.theta_hat, &p) - scad_objective(&x, &y, &b.theta_hat, &p)).abs();
            worst = worst.max(d);
        }
        assert!(worst < 1e-4, "max objective gap {worst}");
    }

    #[test]
    fn effective_parameters_bounds() {
        let (x, y) = data(4, 60);
        let normal = Normal::new(&x, &y).unwrap();
        let p0 = ScadParams::with_lambda(0.0).unwrap();
        let ls = normal.least_squares().unwrap();
        assert!((effective_parameters(&normal, &ls, &p0).unwrap() - 8.0).abs() < 1e-10);
        let p = ScadParams::with_lambda(0.2).unwrap();
        let fit = lqa(&normal, &p, &SolverOptions::default()).unwrap();
        let e = effective_parameters(&normal, &fit.theta_hat, &p).unwrap();
        assert!(e > 0.0 && e <= fit.pattern.count_nonzero() as f64 + 1e-12);
        assert_eq!(effective_parameters(&normal, &DVector::zeros(8), &p).unwrap(), 0.0);
    }
}
