//! Least-squares risk on a nonstochastic design read from CSV equals trace((X'X/n)^{-1}).

use nalgebra::DVector;
use sparse_risk::datagen::{DesignKind, DesignSpec, ParameterPath};
use sparse_risk::estimators::{Estimator, EstimatorConfig};
use sparse_risk::experiments::benchmark_design;
use sparse_risk::risk::run_mc;

fn main() -> sparse_risk::Result<()> {
    let n = 120;
    let x = match benchmark_design(n, 4)?.kind() {
        DesignKind::FixedMatrix(m) => m.clone(),
        DesignKind::GaussianAr { .. } => unreachable!(),
    };
    let path = std::env::temp_dir().join("sparse-risk-fixed-design.csv");
    let rows: Vec<String> = x
        .row_iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    std::fs::write(&path, rows.join("\n")).expect("temp dir is writable");

    let design = DesignSpec::fixed_from_csv(&path)?;
    let q_inv = design.covariance().try_inverse().expect("full rank").trace();
    let origin = ParameterPath::new(DVector::zeros(8), DVector::zeros(8), vec![0.0], n)?;
    let ests: Vec<Box<dyn Estimator>> = vec![Box::new(EstimatorConfig::LeastSquares)];
    let row = run_mc(&design, &origin, 0.0, &ests, 2000, 4)?.rows.remove(0);
    println!("trace(Q^-1) = {q_inv:.3}   MC n*MSE = {:.3} (se {:.3})", row.scaled_mse, row.scaled_mse_se);
    Ok(())
}
