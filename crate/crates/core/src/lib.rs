//! Early-warning indicators for bifurcation-induced tipping in slowly
//! ramped planar stochastic systems.
//!
//! The crate simulates three benchmark fast-slow systems (fold, subcritical
//! Hopf, singular Hopf), fits VAR(2,1) models on sliding windows, recovers
//! the local Jacobian through the matrix logarithm, and reports eigenvalue
//! real parts with delta-method or Monte Carlo standard errors alongside
//! the classical lag-1 autocorrelation indicator.

// `!(v > 0.0)` is used deliberately so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod portrait;
pub mod sde;
pub mod trend;
pub mod uncertainty;
pub mod var;

pub use error::{Error, Result};
pub use linalg::{eigen_pair, principal_log, EigenPair, Mat2};
pub use model::{Dynamics, ModelKind, ModelSpec};
pub use pipeline::{
    extrapolate_crossing, run_pipeline, Crossing, PipelineConfig, PipelineRun, StopRule, Which,
    WindowEstimate, WindowRecord,
};
pub use sde::{integrate, wiener_increments, SimConfig, TimeSeriesFrame};
pub use uncertainty::{delta_se, monte_carlo_se, McConfig, SeChoice, SePair};
pub use var::{
    ar1_rate, fit_var, jacobian_from_var, lag1_autocorrelation, Channel, Detrend, JacobianEstimate,
    LogMethod, VarFit, Window,
};
