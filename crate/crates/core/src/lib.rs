//! Sparse penalized-regression estimators (SCAD, hard thresholding,
//! Hodges, BIC post-model-selection) together with a reproducible Monte
//! Carlo harness for their risk under local alternatives
//! `theta_n = theta_0 + (gamma / sqrt(n)) eta`.
//!
//! Estimators that find the zero coordinates of the truth with probability
//! tending to one have a worst-case scaled risk that grows without bound in
//! `n`, while least squares stays at `trace(Q^{-1})`. The
//! [`experiments`] module reproduces that contrast; the building blocks
//! live in [`datagen`], [`penalties`], [`estimators`], [`tuning`] and
//! [`risk`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod oracle;
pub mod penalties;
pub mod risk;
pub mod rng;
pub mod tuning;

pub use error::{Error, Result};
