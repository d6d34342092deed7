use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use super::{AR_RHO, DEFAULT_GAMMA_POINTS, DEFAULT_REPLICATIONS, ETA_I, ETA_II, ETA_III, SAMPLE_SIZES, THETA0};
use crate::datagen::{equidistant_grid, DesignSpec, ParameterPath};
use crate::error::{Error, Result};
use crate::estimators::{Estimator, EstimatorConfig};
use crate::risk::{run_sweep, RiskReport};
use crate::tuning::{LambdaRule, LambdaScale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetupId {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl SetupId {
    pub const ALL: [SetupId; 6] = [SetupId::I, SetupId::II, SetupId::III, SetupId::IV, SetupId::V, SetupId::VI];

    /// Figure number the setup's curves correspond to, if any.
    pub fn figure(self) -> Option<u8> {
        match self {
            SetupId::I => Some(1),
            SetupId::II => None,
            SetupId::III => Some(2),
            SetupId::IV => Some(3),
            SetupId::V => Some(4),
            SetupId::VI => Some(5),
        }
    }
}

impl fmt::Display for SetupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetupId::I => "I",
            SetupId::II => "II",
            SetupId::III => "III",
            SetupId::IV => "IV",
            SetupId::V => "V",
            SetupId::VI => "VI",
        })
    }
}

impl FromStr for SetupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(SetupId::I),
            "II" | "2" => Ok(SetupId::II),
            "III" | "3" => Ok(SetupId::III),
            "IV" | "4" => Ok(SetupId::IV),
            "V" | "5" => Ok(SetupId::V),
            "VI" | "6" => Ok(SetupId::VI),
            other => Err(Error::Usage(format!("unknown setup id {other:?}; expected I..VI"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetupDef {
    pub id: SetupId,
    pub eta: DVector<f64>,
    pub gamma_max: f64,
    pub lambda_rule: LambdaRule,
    pub n_list: Vec<usize>,
    pub replications: usize,
}

impl SetupDef {
    pub fn new(id: SetupId) -> Self {
        let (eta, gamma_max) = match id {
            SetupId::II => (ETA_II, 8.0),
            SetupId::III => (ETA_III, 80.0),
            _ => (ETA_I, 8.0),
        };
        let scale = match id {
            SetupId::I | SetupId::II | SetupId::III => LambdaScale::LogRatio,
            SetupId::IV => LambdaScale::Pow10,
            SetupId::V => LambdaScale::Pow4,
            SetupId::VI => LambdaScale::Unit,
        };
        Self {
            id,
            eta: DVector::from_row_slice(&eta),
            gamma_max,
            lambda_rule: LambdaRule::with_scale(scale),
            n_list: SAMPLE_SIZES.to_vec(),
            replications: DEFAULT_REPLICATIONS,
        }
    }

    /// SCAD with `a = 3.7`, tuned by GCV over this setup's grid.
    pub fn scad2(&self) -> EstimatorConfig {
        EstimatorConfig::scad2(self.lambda_rule.clone())
    }

    pub fn path(&self, n: usize, gamma_points: usize) -> Result<ParameterPath> {
        ParameterPath::new(
            DVector::from_row_slice(&THETA0),
            self.eta.clone(),
            equidistant_grid(self.gamma_max, gamma_points)?,
            n,
        )
    }
}

/// Departures from a setup's defaults.
#[derive(Debug, Clone, Default)]
pub struct SetupOverrides {
    pub n_list: Option<Vec<usize>>,
    pub replications: Option<usize>,
    pub gamma_points: Option<usize>,
    pub seed: Option<u64>,
    /// Replaces the default `[SCAD2, LS]` list.
    pub estimators: Option<Vec<EstimatorConfig>>,
}

pub const DEFAULT_SEED: u64 = 20070301;

/// Full sweep of a setup over its sample sizes and gamma grid.
pub fn run_setup(id: SetupId, overrides: &SetupOverrides) -> Result<RiskReport> {
    let def = SetupDef::new(id);
    let n_list = overrides.n_list.clone().unwrap_or_else(|| def.n_list.clone());
    let reps = overrides.replications.unwrap_or(def.replications);
    let points = overrides.gamma_points.unwrap_or(DEFAULT_GAMMA_POINTS);
    let seed = overrides.seed.unwrap_or(DEFAULT_SEED);
    if n_list.is_empty() {
        return Err(Error::invalid("setup needs at least one sample size"));
    }
    if let Some(&bad) = n_list.iter().find(|&&n| n <= 9) {
        return Err(Error::invalid(format!("sample size {bad} too small for 8 regressors")));
    }

    let configs = overrides
        .estimators
        .clone()
        .unwrap_or_else(|| vec![def.scad2(), EstimatorConfig::LeastSquares]);
    for c in &configs {
        c.validate()?;
    }
    let estimators: Vec<Box<dyn Estimator>> = configs
        .into_iter()
        .map(|c| Box::new(c) as Box<dyn Estimator>)
        .collect();

    let mut report = RiskReport::empty(seed, reps);
    for n in n_list {
        let design = DesignSpec::gaussian_ar(n, THETA0.len(), AR_RHO)?;
        let path = def.path(n, points)?;
        report.extend(run_sweep(&design, &path, &estimators, reps, seed)?);
    }
    Ok(report.with_setup_label(&id.to_string()))
}
