//! Fit every estimator to one simulated data set and compare them with the truth.

use sparse_risk::datagen::{sample_design, sample_errors, DesignSpec};
use sparse_risk::estimators::{sparsity_pattern, Estimator, EstimatorConfig};
use sparse_risk::experiments::{theta0, SetupDef, SetupId};
use sparse_risk::rng::{Purpose, RngStream};

fn main() -> sparse_risk::Result<()> {
    let n = 60;
    let spec = DesignSpec::gaussian_ar(n, 8, 0.5)?;
    let x = sample_design(&spec, &RngStream::new(11, 0, Purpose::Design))?;
    let theta = theta0();
    let y = &x * &theta + sample_errors(n, &RngStream::new(11, 0, Purpose::Errors))?;

    println!("truth      {}  {:?}", sparsity_pattern(&theta), theta.as_slice());
    let estimators = [
        EstimatorConfig::LeastSquares,
        SetupDef::new(SetupId::I).scad2(),
        EstimatorConfig::hard_threshold(),
        EstimatorConfig::BicSelect,
    ];
    for est in &estimators {
        let fit = est.fit(&x, &y)?;
        let coefs: Vec<String> = fit.theta_hat.iter().map(|v| format!("{v:6.3}")).collect();
        println!("{:<10} {}  [{}]", est.name(), fit.pattern, coefs.join(" "));
    }
    Ok(())
}
