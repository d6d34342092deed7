//! GCV scores over the Setup I lambda grid at several sample sizes.

use sparse_risk::datagen::{sample_design, sample_errors, DesignSpec};
use sparse_risk::estimators::{ScadSolver, SolverOptions};
use sparse_risk::experiments::theta0;
use sparse_risk::rng::{Purpose, RngStream};
use sparse_risk::tuning::{gcv_select, lambda_grid, sigma_hat, LambdaRule, LambdaScale};

fn main() -> sparse_risk::Result<()> {
    let rule = LambdaRule::with_scale(LambdaScale::LogRatio);
    for n in [60, 240, 960] {
        let spec = DesignSpec::gaussian_ar(n, 8, 0.5)?;
        let x = sample_design(&spec, &RngStream::new(5, n as u64, Purpose::Design))?;
        let y = &x * theta0() + sample_errors(n, &RngStream::new(5, n as u64, Purpose::Errors))?;
        let s = sigma_hat(&x, &y)?;
        let grid = lambda_grid(&rule, n, s)?;
        let (lambda, fit) = gcv_select(&x, &y, 3.7, &grid, ScadSolver::Lqa, &SolverOptions::default())?;
        println!(
            "n = {n:>4}  sigma_hat = {s:.3}  grid = [{:.4}, {:.4}]  chosen = {lambda:.4}  pattern = {}",
            grid[0],
            grid[grid.len() - 1],
            fit.pattern
        );
    }
    Ok(())
}
