//! Replication engine.
//!
//! Replication `r` draws its design and errors from the streams
//! `(master_seed, r, Design)` and `(master_seed, r, Errors)`, every estimator
//! is fitted to the same `(X, y)`, and results are gathered in replication
//! order. Reports are therefore identical for any worker count.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use super::loss::model_error;
use super::report::{RiskReport, RiskRow, BOOTSTRAP_RESAMPLES};
use crate::datagen::{sample_design, sample_errors, DesignSpec, ParameterPath};
use crate::error::{Error, Result};
use crate::estimators::{fit_least_squares, sparsity_pattern, Estimator};
use crate::rng::{Purpose, RngStream};

/// Reports whose failed-replication share exceeds this are flagged.
pub const FAILURE_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy)]
struct FitOutcome {
    model_error: f64,
    sq_error: f64,
    sparse_ok: bool,
    all_zero: bool,
    converged: bool,
}

/// Index 0 is the least-squares reference, then one entry per estimator.
/// `Err` carries the positions of the estimators that failed.
type Replication = std::result::Result<Vec<FitOutcome>, Vec<usize>>;

/// Options shared by every cell of a run.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub replications: usize,
    pub master_seed: u64,
}

fn check_inputs(design: &DesignSpec, path: &ParameterPath, replications: usize) -> Result<()> {
    if replications == 0 {
        return Err(Error::invalid("at least one replication is required"));
    }
    if design.n() != path.n {
        return Err(Error::invalid(format!(
            "design sample size {} differs from path sample size {}",
            design.n(),
            path.n
        )));
    }
    if design.k() != path.k() {
        return Err(Error::DimensionMismatch {
            expected: design.k(),
            got: path.k(),
        });
    }
    Ok(())
}

fn draw(design: &DesignSpec, master_seed: u64, rep: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let x = sample_design(design, &RngStream::replication(master_seed, rep, Purpose::Design))?;
    let e = sample_errors(design.n(), &RngStream::replication(master_seed, rep, Purpose::Errors))?;
    Ok((x, e))
}

fn outcome(fit_theta: &DVector<f64>, theta: &DVector<f64>, sigma: &DMatrix<f64>, converged: bool) -> FitOutcome {
    let truth = sparsity_pattern(theta);
    let pattern = sparsity_pattern(fit_theta);
    FitOutcome {
        model_error: model_error(fit_theta, theta, sigma).unwrap_or(f64::NAN),
        sq_error: (fit_theta - theta).norm_squared(),
        sparse_ok: pattern.is_subset_of(&truth),
        all_zero: pattern.is_all_zero(),
        converged,
    }
}

fn replicate(
    x: &DMatrix<f64>,
    errors: &DVector<f64>,
    theta: &DVector<f64>,
    sigma: &DMatrix<f64>,
    estimators: &[Box<dyn Estimator>],
) -> Replication {
    let y = x * theta + errors;
    let mut outcomes = Vec::with_capacity(estimators.len() + 1);
    let mut failed = Vec::new();
    match fit_least_squares(x, &y) {
        Ok(fit) => outcomes.push(outcome(&fit.theta_hat, theta, sigma, true)),
        Err(_) => failed.push(0),
    }
    for (i, est) in estimators.iter().enumerate() {
        match est.fit(x, &y) {
            Ok(fit) if fit.theta_hat.len() == theta.len() => {
                outcomes.push(outcome(&fit.theta_hat, theta, sigma, fit.converged))
            }
            _ => failed.push(i + 1),
        }
    }
    if failed.is_empty() {
        Ok(outcomes)
    } else {
        Err(failed)
    }
}

/// Monte Carlo risk of each estimator at `theta(gamma)` on `path`.
pub fn run_mc(
    design: &DesignSpec,
    path: &ParameterPath,
    gamma: f64,
    estimators: &[Box<dyn Estimator>],
    replications: usize,
    master_seed: u64,
) -> Result<RiskReport> {
    check_inputs(design, path, replications)?;
    let theta = path.theta(gamma)?;
    let sigma = design.covariance();
    let reps: Vec<Replication> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let (x, e) = draw(design, master_seed, r)?;
            Ok(replicate(&x, &e, &theta, &sigma, estimators))
        })
        .collect::<Result<_>>()?;
    let opts = McOptions {
        replications,
        master_seed,
    };
    Ok(aggregate_cell(&reps, design.n(), gamma, estimators, &opts))
}

/// [`run_mc`] for every gamma on the path's grid. Each replication's design
/// and errors are drawn once and reused across gamma, which yields exactly
/// the rows separate [`run_mc`] calls would.
pub fn run_sweep(
    design: &DesignSpec,
    path: &ParameterPath,
    estimators: &[Box<dyn Estimator>],
    replications: usize,
    master_seed: u64,
) -> Result<RiskReport> {
    check_inputs(design, path, replications)?;
    let thetas: Vec<DVector<f64>> = path
        .gamma_grid
        .iter()
        .map(|&g| path.theta(g))
        .collect::<Result<_>>()?;
    let sigma = design.covariance();
    let by_rep: Vec<Vec<Replication>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let (x, e) = draw(design, master_seed, r)?;
            Ok(thetas
                .iter()
                .map(|theta| replicate(&x, &e, theta, &sigma, estimators))
                .collect())
        })
        .collect::<Result<_>>()?;

    let opts = McOptions {
        replications,
        master_seed,
    };
    let mut report = RiskReport::empty(master_seed, replications);
    for (gi, &gamma) in path.gamma_grid.iter().enumerate() {
        let cell: Vec<Replication> = by_rep.iter().map(|reps| reps[gi].clone()).collect();
        report.extend(aggregate_cell(&cell, design.n(), gamma, estimators, &opts));
    }
    Ok(report)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cell_key(n: usize, gamma: f64) -> u64 {
    splitmix(splitmix(n as u64) ^ gamma.to_bits())
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

fn std_dev(values: &[f64]) -> f64 {
    let m = values.len();
    if m < 2 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
}

fn me_ratio(est: f64, ls: f64) -> f64 {
    if est == ls {
        1.0
    } else {
        est / ls
    }
}

fn aggregate_cell(
    reps: &[Replication],
    n: usize,
    gamma: f64,
    estimators: &[Box<dyn Estimator>],
    opts: &McOptions,
) -> RiskReport {
    let valid: Vec<&Vec<FitOutcome>> = reps.iter().filter_map(|r| r.as_ref().ok()).collect();
    let failed = reps.len() - valid.len();
    let m = valid.len();
    let nf = n as f64;

    // per estimator: ME ratios and squared errors in replication order
    let ratios: Vec<Vec<f64>> = (1..=estimators.len())
        .map(|e| valid.iter().map(|o| me_ratio(o[e].model_error, o[0].model_error)).collect())
        .collect();
    let sq: Vec<Vec<f64>> = (0..=estimators.len())
        .map(|e| valid.iter().map(|o| o[e].sq_error).collect())
        .collect();

    let mut boot_median = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); estimators.len()];
    let mut boot_rel_mse = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); estimators.len()];
    let mut boot_scaled = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); estimators.len()];
    if m > 0 {
        let mut rng = RngStream::new(opts.master_seed, cell_key(n, gamma), Purpose::Bootstrap).rng();
        let mut idx = vec![0usize; m];
        let mut scratch = vec![0.0; m];
        for _ in 0..BOOTSTRAP_RESAMPLES {
            for i in idx.iter_mut() {
                *i = rng.random_range(0..m);
            }
            let ls_sum: f64 = idx.iter().map(|&i| sq[0][i]).sum();
            for e in 0..estimators.len() {
                for (s, &i) in scratch.iter_mut().zip(&idx) {
                    *s = ratios[e][i];
                }
                boot_median[e].push(median(&mut scratch));
                let est_sum: f64 = idx.iter().map(|&i| sq[e + 1][i]).sum();
                boot_rel_mse[e].push(if est_sum == ls_sum { 1.0 } else { est_sum / ls_sum });
                boot_scaled[e].push(nf * est_sum / m as f64);
            }
        }
    }

    let ls_total: f64 = sq[0].iter().sum();
    let rows = estimators
        .iter()
        .enumerate()
        .map(|(e, est)| {
            let est_total: f64 = sq[e + 1].iter().sum();
            let frac = |f: &dyn Fn(&FitOutcome) -> bool| {
                valid.iter().filter(|o| f(&o[e + 1])).count() as f64 / m as f64
            };
            RiskRow {
                setup: "custom".into(),
                n,
                gamma,
                estimator: est.name(),
                rel_median_me: median(&mut ratios[e].clone()),
                rel_mse: if est_total == ls_total { 1.0 } else { est_total / ls_total },
                sparsity_rate: frac(&|o| o.sparse_ok),
                mc_se: std_dev(&boot_median[e]),
                rel_mse_se: std_dev(&boot_rel_mse[e]),
                scaled_mse: nf * est_total / m as f64,
                scaled_mse_se: std_dev(&boot_scaled[e]),
                zero_rate: frac(&|o| o.all_zero),
                replications: m,
                failures: reps
                    .iter()
                    .filter(|r| matches!(r, Err(f) if f.contains(&(e + 1))))
                    .count(),
                nonconverged: valid.iter().filter(|o| !o[e + 1].converged).count(),
                seed: opts.master_seed,
            }
        })
        .collect();

    RiskReport {
        rows,
        master_seed: opts.master_seed,
        replications: opts.replications,
        failed_replications: failed,
        attempted_replications: reps.len(),
    }
}
