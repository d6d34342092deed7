use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::AR_RHO;
use crate::datagen::{exact_moment_design, DesignSpec, ParameterPath};
use crate::error::{Error, Result};
use crate::estimators::{hodges_scalar, Estimator};
use crate::risk::{run_mc, run_sweep};
use crate::rng::{Purpose, RngStream};

const BENCHMARK_STREAM_BASE: u64 = 1 << 40;

/// Nonstochastic 8-regressor design with `X'X/n` equal to the AR(0.5)
/// covariance, so least squares has scaled risk exactly `trace(Sigma^{-1}) = 38/3`.
pub fn benchmark_design(n: usize, seed: u64) -> Result<DesignSpec> {
    let stream = RngStream::new(seed, BENCHMARK_STREAM_BASE + n as u64, Purpose::Design);
    DesignSpec::fixed(exact_moment_design(n, 8, AR_RHO, &stream)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub n: usize,
    /// Estimated `P(theta_hat = 0)` at `theta_n = -s / sqrt(n)`.
    pub p_hat: f64,
    /// `||s||^2 * p_hat`.
    pub bound: f64,
    /// Estimated `E n ||theta_hat - theta_n||^2` from the same replications.
    pub scaled_risk: f64,
    pub scaled_risk_se: f64,
}

/// Lower bound `l(s) P(theta_hat = 0)` on the scaled quadratic risk at the
/// local parameter `-s / sqrt(n)`, with `l(s) = s's`.
pub fn lower_bound_diagnostic<E: Estimator + 'static>(
    s: &DVector<f64>,
    design: &DesignSpec,
    estimator: E,
    replications: usize,
    master_seed: u64,
) -> Result<LowerBound> {
    let n = design.n();
    let path = ParameterPath::new(DVector::zeros(s.len()), -s, vec![1.0], n)?;
    let ests: Vec<Box<dyn Estimator>> = vec![Box::new(estimator)];
    let report = run_mc(design, &path, 1.0, &ests, replications, master_seed)?;
    let row = &report.rows[0];
    Ok(LowerBound {
        n,
        p_hat: row.zero_rate,
        bound: s.norm_squared() * row.zero_rate,
        scaled_risk: row.scaled_mse,
        scaled_risk_se: row.scaled_mse_se,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMax {
    pub n: usize,
    pub radius: f64,
    pub max_risk: f64,
    pub se: f64,
    /// Basis direction and distance from the origin where the max occurred.
    pub direction: usize,
    pub t: f64,
}

pub const BALL_RADIAL_POINTS: usize = 50;

/// Maximal scaled quadratic risk over `theta = t e_i`, `0 < t <= rho_n`, with
/// `rho_n = n^{rho_exponent}` and `t` on a 50-point radial grid.
pub fn ball_restricted_sweep<E, D>(
    rho_exponent: f64,
    n_list: &[usize],
    estimator: E,
    design_for: D,
    replications: usize,
    master_seed: u64,
) -> Result<Vec<BallMax>>
where
    E: Estimator + 'static,
    D: Fn(usize) -> Result<DesignSpec>,
{
    if !(rho_exponent > -0.5 && rho_exponent <= 0.0) {
        return Err(Error::invalid(format!(
            "ball radius exponent must lie in (-1/2, 0], got {rho_exponent}"
        )));
    }
    let ests: Vec<Box<dyn Estimator>> = vec![Box::new(estimator)];
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let design = design_for(n)?;
        let k = design.k();
        let radius = (n as f64).powf(rho_exponent);
        let root_n = (n as f64).sqrt();
        let gammas: Vec<f64> = (1..=BALL_RADIAL_POINTS)
            .map(|j| radius * j as f64 / BALL_RADIAL_POINTS as f64 * root_n)
            .collect();
        let mut best: Option<BallMax> = None;
        for i in 0..k {
            let eta = DVector::from_fn(k, |j, _| if i == j { 1.0 } else { 0.0 });
            let path = ParameterPath::new(DVector::zeros(k), eta, gammas.clone(), n)?;
            let report = run_sweep(&design, &path, &ests, replications, master_seed)?;
            for row in &report.rows {
                if best.is_none_or(|b| row.scaled_mse > b.max_risk) {
                    best = Some(BallMax {
                        n,
                        radius,
                        max_risk: row.scaled_mse,
                        se: row.scaled_mse_se,
                        direction: i,
                        t: row.gamma / root_n,
                    });
                }
            }
        }
        out.extend(best);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HodgesPoint {
    pub n: usize,
    pub mu: f64,
    /// Estimated `n E (theta_hat - mu)^2`.
    pub risk: f64,
    pub se: f64,
}

/// Scaled MSE of Hodges' estimator for the mean of `n` i.i.d. `N(mu, 1)`
/// observations. The sample mean is drawn directly as `mu + Z / sqrt(n)`;
/// replication `r` uses the same `Z` at every `(n, mu)`.
pub fn hodges_risk_curve(n_list: &[usize], mu_grid: &[f64], replications: usize, master_seed: u64) -> Result<Vec<HodgesPoint>> {
    if replications < 2 {
        return Err(Error::invalid("Hodges curve needs at least two replications"));
    }
    if n_list.contains(&0) {
        return Err(Error::invalid("sample sizes must be positive"));
    }
    let mut sorted = mu_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let symmetric = sorted
        .iter()
        .zip(sorted.iter().rev())
        .all(|(a, b)| (a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    if sorted.is_empty() || !symmetric {
        return Err(Error::invalid("mu grid must be nonempty and symmetric about 0"));
    }

    let z: Vec<f64> = (0..replications)
        .map(|r| RngStream::replication(master_seed, r, Purpose::Scalar).rng().sample(StandardNormal))
        .collect();
    let cells: Vec<(usize, f64)> = n_list
        .iter()
        .flat_map(|&n| mu_grid.iter().map(move |&mu| (n, mu)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(n, mu)| {
            let nf = n as f64;
            let losses: Vec<f64> = z
                .iter()
                .map(|zr| {
                    let ybar = mu + zr / nf.sqrt();
                    nf * (hodges_scalar(ybar, n) - mu).powi(2)
                })
                .collect();
            let m = losses.len() as f64;
            let mean = losses.iter().sum::<f64>() / m;
            let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (m - 1.0);
            HodgesPoint {
                n,
                mu,
                risk: mean,
                se: (var / m).sqrt(),
            }
        })
        .collect())
}

/// Largest risk on the curve at sample size `n`.
pub fn hodges_max_risk(points: &[HodgesPoint], n: usize) -> Option<HodgesPoint> {
    points
        .iter()
        .filter(|p| p.n == n)
        .copied()
        .reduce(|a, b| if b.risk > a.risk { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{EstimatorConfig, FitResult};
    use nalgebra::DMatrix;

    struct Zero;

    impl Estimator for Zero {
        fn name(&self) -> String {
            "zero".into()
        }
        fn fit(&self, x: &DMatrix<f64>, _: &DVector<f64>) -> Result<FitResult> {
            Ok(FitResult::new(DVector::zeros(x.ncols()), 0.0, 0, true))
        }
    }

    fn s5() -> DVector<f64> {
        DVector::from_fn(8, |j, _| if j == 2 { 5.0 } else { 0.0 })
    }

    #[test]
    fn zero_estimator_attains_the_loss() {
        let d = benchmark_design(60, 1).unwrap();
        let lb = lower_bound_diagnostic(&s5(), &d, Zero, 50, 2).unwrap();
        assert_eq!(lb.p_hat, 1.0);
        assert!((lb.bound - 25.0).abs() < 1e-12);
        assert!((lb.scaled_risk - 25.0).abs() < 1e-9);
    }

    #[test]
    fn least_squares_is_never_zero() {
        let d = benchmark_design(60, 1).unwrap();
        let lb = lower_bound_diagnostic(&s5(), &d, EstimatorConfig::LeastSquares, 200, 2).unwrap();
        assert_eq!(lb.p_hat, 0.0);
        assert_eq!(lb.bound, 0.0);
        assert!(lb.bound <= lb.scaled_risk);
    }

    #[test]
    fn ball_sweep_zero_and_ls() {
        let ns = [60, 240];
        let zero = ball_restricted_sweep(-0.25, &ns, Zero, |n| benchmark_design(n, 4), 5, 1).unwrap();
        for b in &zero {
            let nf = b.n as f64;
            assert!((b.max_risk - nf * b.radius * b.radius).abs() < 1e-9 * nf);
            assert!((b.max_risk - nf.powf(0.5)).abs() < 1e-9 * nf);
        }
        assert!(zero[1].max_risk > zero[0].max_risk);
        assert!(ball_restricted_sweep(-0.5, &ns, Zero, |n| benchmark_design(n, 4), 5, 1).is_err());
    }

    #[test]
    fn hodges_curve_shapes() {
        let mu: Vec<f64> = (-300..=300).map(|i| i as f64 * 0.01).collect();
        let pts = hodges_risk_curve(&[100, 10_000], &mu, 2000, 3).unwrap();
        let at = |n: usize, m: f64| *pts.iter().find(|p| p.n == n && (p.mu - m).abs() < 1e-9).unwrap();
        assert!(at(10_000, 0.0).risk < 0.05);
        assert!((at(10_000, 3.0).risk - 1.0).abs() < 0.15);
        let small = hodges_max_risk(&pts, 100).unwrap().risk;
        let large = hodges_max_risk(&pts, 10_000).unwrap().risk;
        assert!(large > 5.0 * small, "{large} vs {small}");
        assert!(hodges_risk_curve(&[100], &[0.0, 1.0], 100, 1).is_err());
    }
}
