//! Risk of SCAD relative to least squares at a single parameter value.

use nalgebra::DVector;
use sparse_risk::datagen::{DesignSpec, ParameterPath};
use sparse_risk::estimators::{Estimator, EstimatorConfig};
use sparse_risk::experiments::{theta0, SetupDef, SetupId, ETA_I};
use sparse_risk::risk::{ls_mse_closed_form, run_mc};

fn main() -> sparse_risk::Result<()> {
    let n = 60;
    let design = DesignSpec::gaussian_ar(n, 8, 0.5)?;
    let path = ParameterPath::new(theta0(), DVector::from_row_slice(&ETA_I), vec![0.0, 3.0], n)?;
    let ests: Vec<Box<dyn Estimator>> = vec![
        Box::new(SetupDef::new(SetupId::I).scad2()),
        Box::new(EstimatorConfig::LeastSquares),
    ];
    for gamma in [0.0, 3.0] {
        let report = run_mc(&design, &path, gamma, &ests, 400, 1)?;
        for row in &report.rows {
            println!(
                "gamma {gamma:.1} {:<9} median rel ME {:.3} (se {:.3})  rel MSE {:.3}  n*MSE {:.2}",
                row.estimator, row.rel_median_me, row.mc_se, row.rel_mse, row.scaled_mse
            );
        }
    }
    println!("LS closed form MSE at n = {n}: {:.4}", ls_mse_closed_form(n)?);
    Ok(())
}
