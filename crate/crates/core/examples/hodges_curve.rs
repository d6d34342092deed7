//! Scaled risk of Hodges' estimator: the peak grows without bound in n.

use sparse_risk::experiments::{hodges_max_risk, hodges_risk_curve};

fn main() -> sparse_risk::Result<()> {
    let mu: Vec<f64> = (0..=300).map(|i| -3.0 + 0.02 * i as f64).collect();
    let n_list = [100, 1_000, 10_000, 100_000];
    let points = hodges_risk_curve(&n_list, &mu, 1000, 3)?;
    for n in n_list {
        let p = hodges_max_risk(&points, n).expect("n is on the grid");
        println!("n = {n:>6}  max n*MSE {:>8.2} at mu = {:+.2}", p.risk, p.mu);
    }
    Ok(())
}
