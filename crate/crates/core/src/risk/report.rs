use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Bootstrap resamples behind every Monte Carlo standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Aggregated Monte Carlo results for one (n, gamma, estimator) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRow {
    pub setup: String,
    pub n: usize,
    pub gamma: f64,
    pub estimator: String,
    /// Median over replications of `ME(theta_hat) / ME(theta_ls)`.
    pub rel_median_me: f64,
    /// `mean ||theta_hat - theta||^2 / mean ||theta_ls - theta||^2`.
    pub rel_mse: f64,
    /// Fraction of replications with `r(theta_hat) <= r(theta)`.
    pub sparsity_rate: f64,
    /// Bootstrap standard error of `rel_median_me`.
    pub mc_se: f64,
    /// Bootstrap standard error of `rel_mse`.
    pub rel_mse_se: f64,
    /// `n * mean ||theta_hat - theta||^2`.
    pub scaled_mse: f64,
    /// Bootstrap standard error of `scaled_mse`.
    pub scaled_mse_se: f64,
    /// Fraction of replications with `theta_hat = 0`.
    pub zero_rate: f64,
    /// Replications entering the averages.
    pub replications: usize,
    /// Replications in which this estimator failed.
    pub failures: usize,
    /// Replications where the solver hit its iteration cap.
    pub nonconverged: usize,
    pub seed: u64,
}

/// Which per-row measure a figure file plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureMeasure {
    RelMedianMe,
    RelMse,
    ScaledMse,
}

impl FigureMeasure {
    pub fn value(self, row: &RiskRow) -> (f64, f64) {
        match self {
            FigureMeasure::RelMedianMe => (row.rel_median_me, row.mc_se),
            FigureMeasure::RelMse => (row.rel_mse, row.rel_mse_se),
            FigureMeasure::ScaledMse => (row.scaled_mse, row.scaled_mse_se),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub rows: Vec<RiskRow>,
    pub master_seed: u64,
    /// Replications requested per cell.
    pub replications: usize,
    /// Replications that failed for at least one estimator, summed over cells.
    pub failed_replications: usize,
    /// Cells times replications attempted.
    pub attempted_replications: usize,
}

impl RiskReport {
    pub fn empty(master_seed: u64, replications: usize) -> Self {
        Self {
            rows: Vec::new(),
            master_seed,
            replications,
            failed_replications: 0,
            attempted_replications: 0,
        }
    }

    pub fn with_setup_label(mut self, label: &str) -> Self {
        for row in &mut self.rows {
            row.setup = label.to_string();
        }
        self
    }

    pub fn extend(&mut self, other: RiskReport) {
        self.rows.extend(other.rows);
        self.failed_replications += other.failed_replications;
        self.attempted_replications += other.attempted_replications;
    }

    pub fn failure_rate(&self) -> f64 {
        if self.attempted_replications == 0 {
            0.0
        } else {
            self.failed_replications as f64 / self.attempted_replications as f64
        }
    }

    /// More than [`super::FAILURE_LIMIT`] of replications failed.
    pub fn is_flagged(&self) -> bool {
        self.failure_rate() > super::FAILURE_LIMIT
    }

    pub fn rows_for<'a>(&'a self, estimator: &'a str) -> impl Iterator<Item = &'a RiskRow> + 'a {
        self.rows.iter().filter(move |r| r.estimator == estimator)
    }

    pub fn row(&self, n: usize, gamma: f64, estimator: &str) -> Option<&RiskRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.gamma == gamma && r.estimator == estimator)
    }

    pub fn sample_sizes(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    fn header_comment(&self) -> String {
        format!(
            "# sparse-risk {} seed={} R={}\n",
            env!("CARGO_PKG_VERSION"),
            self.master_seed,
            self.replications
        )
    }

    /// The report as CSV, preceded by one `#` header line.
    pub fn to_csv(&self) -> String {
        let mut out = self.header_comment();
        out.push_str("setup,n,gamma,estimator,rel_median_me,rel_mse,sparsity_rate,mc_se,R,seed\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{},{},{},{},{},{},{}",
                r.setup, r.n, r.gamma, r.estimator, r.rel_median_me, r.rel_mse, r.sparsity_rate, r.mc_se,
                r.replications, r.seed
            );
        }
        out
    }

    /// Plot-ready `n,gamma,value,mc_se` series for one estimator.
    pub fn figure_csv(&self, estimator: &str, measure: FigureMeasure) -> String {
        let mut out = self.header_comment();
        out.push_str("n,gamma,value,mc_se\n");
        for r in self.rows_for(estimator) {
            let (v, se) = measure.value(r);
            let _ = writeln!(out, "{},{:.6},{},{}", r.n, r.gamma, v, se);
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), &self.to_csv())
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Like [`write_file`], exposed for the command-line layer.
pub fn write_file_checked(path: &Path, contents: &str) -> Result<()> {
    write_file(path, contents)
}
