//! Maximal risk over shrinking balls of radius n^{-1/4} around the origin.

use sparse_risk::datagen::DesignSpec;
use sparse_risk::estimators::EstimatorConfig;
use sparse_risk::experiments::ball_restricted_sweep;

fn main() -> sparse_risk::Result<()> {
    let design = |n| DesignSpec::gaussian_ar(n, 8, 0.5);
    for (label, est) in [("hard", EstimatorConfig::hard_threshold()), ("ls", EstimatorConfig::LeastSquares)] {
        for b in ball_restricted_sweep(-0.25, &[60, 240, 960], est.clone(), design, 200, 9)? {
            println!(
                "{label:<5} n = {:>4}  radius {:.3}  max n*MSE {:.2} (se {:.2}) at t = {:.3} e_{}",
                b.n,
                b.radius,
                b.max_risk,
                b.se,
                b.t,
                b.direction + 1
            );
        }
    }
    Ok(())
}
