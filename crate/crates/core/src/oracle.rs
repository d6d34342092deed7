//! Brute-force reference computations used by `sparse-risk oracle-check`.
//! Nothing here shares code with the solvers it checks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::estimators::{fit_scad, ScadSolver, SolverOptions};
use crate::penalties::{scad_univariate_min, ScadParams, DEFAULT_A};

/// Minimizes `0.5 (z - t)^2 + p(|t|)` by scanning `[-10, 10]` at step 1e-3
/// and then the neighbourhood of the best point at step 1e-6.
pub fn grid_search_min(z: f64, p: &ScadParams) -> f64 {
    let obj = |t: f64| 0.5 * (z - t) * (z - t) + p.value(t.abs());
    let scan = |lo: f64, hi: f64, step: f64| {
        let m = ((hi - lo) / step).round() as usize;
        (0..=m)
            .map(|i| lo + i as f64 * step)
            .fold((lo, f64::INFINITY), |best, t| {
                let v = obj(t);
                if v < best.1 {
                    (t, v)
                } else {
                    best
                }
            })
            .0
    };
    let coarse = scan(-10.0, 10.0, 1e-3);
    scan(coarse - 2e-3, coarse + 2e-3, 1e-6)
}

/// Largest gap between the closed-form minimizer and grid search over
/// `cases` random `(z, lambda)` pairs with `lambda` in [0.1, 2], `|z| < 8`.
pub fn closed_form_vs_grid(cases: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let p = ScadParams::new(rng.random_range(0.1..2.0), DEFAULT_A)?;
        let z = rng.random_range(-8.0..8.0);
        worst = worst.max((scad_univariate_min(z, &p)? - grid_search_min(z, &p)).abs());
    }
    Ok(worst)
}

/// Largest coordinate gap between a SCAD solver and the closed-form
/// minimizer on designs with `X'X = nI`, over `cases` random
/// `(z, lambda)` draws (one coordinate of interest per case).
pub fn solver_vs_closed_form(solver: ScadSolver, cases: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, k) = (30, 3);
    let opts = SolverOptions::default();
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let lambda = rng.random_range(0.1..2.0);
        let p = ScadParams::new(lambda, DEFAULT_A)?;
        let z = DVector::from_fn(k, |_, _| rng.random_range(-5.0 * lambda..5.0 * lambda));
        let raw = DMatrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
        let x = raw.qr().q() * (n as f64).sqrt();
        let y = &x * &z;
        let fit = fit_scad(&x, &y, &p, solver, &opts)?;
        for j in 0..k {
            worst = worst.max((fit.theta_hat[j] - scad_univariate_min(z[j], &p)?).abs());
        }
    }
    Ok(worst)
}
