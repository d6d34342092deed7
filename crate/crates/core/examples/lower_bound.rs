//! The lower bound s's * P(theta_hat = 0) at theta = -s/sqrt(n), for SCAD and
//! for the always-zero estimator, next to least squares.

use nalgebra::DVector;
use sparse_risk::estimators::EstimatorConfig;
use sparse_risk::experiments::{benchmark_design, lower_bound_diagnostic, SetupDef, SetupId};

fn main() -> sparse_risk::Result<()> {
    let s = DVector::from_fn(8, |j, _| if j == 2 { 2.0 } else { 0.0 });
    let scad = SetupDef::new(SetupId::I).scad2();
    for n in [60, 240, 960] {
        let design = benchmark_design(n, 1)?;
        let sc = lower_bound_diagnostic(&s, &design, scad.clone(), 500, 1)?;
        let ls = lower_bound_diagnostic(&s, &design, EstimatorConfig::LeastSquares, 500, 1)?;
        println!(
            "n = {n:>4}  P(0) {:.3}  bound {:.3}  SCAD n*MSE {:.2}  LS n*MSE {:.2}",
            sc.p_hat, sc.bound, sc.scaled_risk, ls.scaled_risk
        );
    }
    Ok(())
}
