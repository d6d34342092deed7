//! The six simulation setups, worst-case curves and the diagnostics that
//! exhibit the divergence of maximal risk for sparse estimators.

mod curves;
mod diagnostics;
mod setups;

use nalgebra::DVector;

pub use curves::{local_maxima, measure_curve, prominences, prominent_maxima, smooth3, worst_case_curve, WorstCase};
pub use diagnostics::{
    ball_restricted_sweep, benchmark_design, hodges_max_risk, hodges_risk_curve, lower_bound_diagnostic, BallMax,
    HodgesPoint, LowerBound,
};
pub use setups::{run_setup, SetupDef, SetupId, SetupOverrides, DEFAULT_SEED};

/// Base parameter of the simulation study.
pub const THETA0: [f64; 8] = [3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0];
/// Direction of Setups I, IV, V and VI.
pub const ETA_I: [f64; 8] = [0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0];
pub const ETA_II: [f64; 8] = [0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
pub const ETA_III: [f64; 8] = [0.0, 0.0, 1.0, 1.0, 0.0, 0.1, 0.1, 0.1];

pub const SAMPLE_SIZES: [usize; 5] = [60, 120, 240, 480, 960];
pub const DEFAULT_REPLICATIONS: usize = 500;
pub const DEFAULT_GAMMA_POINTS: usize = 101;
pub const AR_RHO: f64 = 0.5;

pub fn theta0() -> DVector<f64> {
    DVector::from_row_slice(&THETA0)
}
