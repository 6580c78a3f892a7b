//! End-to-end early-warning analysis: simulate, subsample, slide windows,
//! fit VAR and AR(1) per window, attach standard errors and the analytic
//! eigenvalues at the tracked equilibrium.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{EigenPair, Mat2};
use crate::model::{Dynamics, ModelKind, ModelSpec};
use crate::sde::{integrate, NoiseScaling, SimConfig, TimeSeriesFrame};
use crate::trend::fit_line;
use crate::uncertainty::{delta_se, monte_carlo_se, McConfig, SeChoice};
use crate::var::{
    ar1_rate, fit_var, jacobian_from_var, lag1_autocorrelation, Channel, Detrend, LogMethod, Window,
};

/// Noise multiple used for the departure threshold when none is given.
pub const DEFAULT_DEPARTURE_MULTIPLE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum StopRule {
    /// Keep windows ending while `λ > 0`.
    #[default]
    LambdaZero,
    /// Keep windows ending before the state first leaves the tracked
    /// equilibrium by more than the threshold (default 20× noise amplitude).
    Departure(Option<f64>),
    EndOfSeries,
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "lambda_zero" => return Ok(StopRule::LambdaZero),
            "end_of_series" => return Ok(StopRule::EndOfSeries),
            "departure" => return Ok(StopRule::Departure(None)),
            _ => {}
        }
        let inner = s
            .strip_prefix("departure(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("departure:"));
        match inner.map(|v| v.trim().parse::<f64>()) {
            Some(Ok(d)) if d > 0.0 && d.is_finite() => Ok(StopRule::Departure(Some(d))),
            Some(_) => Err(Error::config("stop_rule", "departure threshold must be a positive number")),
            None => Err(Error::config(
                "stop_rule",
                format!("expected lambda_zero, departure, departure(<delta>) or end_of_series, got `{s}`"),
            )),
        }
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopRule::LambdaZero => f.write_str("lambda_zero"),
            StopRule::Departure(None) => f.write_str("departure"),
            StopRule::Departure(Some(d)) => write!(f, "departure({d})"),
            StopRule::EndOfSeries => f.write_str("end_of_series"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub model: ModelKind,
    pub sim: SimConfig,
    /// Keep every `sub`-th integration step.
    pub sub: usize,
    /// Window length in subsampled points.
    pub block_size: usize,
    pub stride: usize,
    pub detrend: Detrend,
    pub se_method: SeChoice,
    pub mc: McConfig,
    pub stop_rule: StopRule,
}

impl PipelineConfig {
    /// Parameter sets of the three reference experiments.
    pub fn preset(model: ModelKind) -> Self {
        let (sim, sub, block_size) = match model {
            ModelKind::Fold => (
                SimConfig {
                    epsilon: 0.1,
                    r: 0.001,
                    dt: 0.002,
                    lambda0: 0.3,
                    alpha_x: 0.01,
                    alpha_y: 0.01,
                    omega: 0.0,
                    tspan: 350.0,
                    seed: 0,
                    noise_scaling: NoiseScaling::default(),
                },
                10,
                1250,
            ),
            ModelKind::SubcriticalHopf => (
                SimConfig {
                    epsilon: 1.0,
                    r: 0.01,
                    dt: 0.01,
                    lambda0: 3.0,
                    alpha_x: 0.05,
                    alpha_y: 0.05,
                    omega: 0.3,
                    tspan: 350.0,
                    seed: 0,
                    noise_scaling: NoiseScaling::default(),
                },
                10,
                250,
            ),
            ModelKind::SingularHopf => (
                SimConfig {
                    epsilon: 0.01,
                    r: 0.005,
                    dt: 0.001,
                    lambda0: 0.4,
                    alpha_x: 0.005,
                    alpha_y: 0.005,
                    omega: 0.0,
                    tspan: 90.0,
                    seed: 0,
                    noise_scaling: NoiseScaling::default(),
                },
                5,
                1000,
            ),
        };
        PipelineConfig {
            model,
            sim,
            sub,
            block_size,
            stride: 1,
            detrend: Detrend::Mean,
            se_method: SeChoice::MonteCarlo,
            mc: McConfig::default(),
            stop_rule: StopRule::LambdaZero,
        }
    }

    /// Same configuration with simulation and Monte Carlo seeds set.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sim.seed = seed;
        self.mc.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if self.sub < 1 {
            return Err(Error::config("sub", "must be at least 1"));
        }
        if self.block_size < 8 {
            return Err(Error::config(
                "block_size",
                format!("must be at least 8, got {}", self.block_size),
            ));
        }
        if self.stride < 1 {
            return Err(Error::config("stride", "must be at least 1"));
        }
        if let StopRule::Departure(Some(d)) = self.stop_rule {
            if !(d > 0.0) {
                return Err(Error::config(
                    "stop_rule",
                    "departure threshold must be positive",
                ));
            }
        }
        if self.se_method != SeChoice::Delta {
            self.mc.validate()?;
        }
        Ok(())
    }

    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec::from_config(self.model, &self.sim)
    }

    /// Departure threshold resolved against the noise amplitude.
    pub fn departure_threshold(&self) -> Option<f64> {
        match self.stop_rule {
            StopRule::Departure(Some(d)) => Some(d),
            StopRule::Departure(None) => {
                Some(DEFAULT_DEPARTURE_MULTIPLE * self.sim.alpha_x.max(self.sim.alpha_y))
            }
            _ => None,
        }
    }
}

/// Successful estimates of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEstimate {
    pub eigen: EigenPair,
    pub method: LogMethod,
    pub a_hat: Mat2,
    pub se_a: Mat2,
    /// Reported standard errors of `Re(μ₁)`, `Re(μ₂)`; absent when the
    /// Monte Carlo population was mostly inadmissible.
    pub se_re_mu: Option<[f64; 2]>,
    /// Delta-method standard errors, computed when comparison is requested.
    pub se_delta: Option<[f64; 2]>,
}

/// One row of pipeline output.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowRecord {
    pub end_time: f64,
    pub end_lambda: f64,
    /// `None` when the VAR fit failed; see `failure`.
    pub estimate: Option<WindowEstimate>,
    pub failure: Option<Error>,
    pub ar1: [Option<f64>; 2],
    pub ar1_rate: [Option<f64>; 2],
    /// Real parts of the analytic eigenvalues at the frozen-λ equilibrium.
    pub analytic_re: Option<[f64; 2]>,
}

impl WindowRecord {
    pub fn failed(&self) -> bool {
        self.estimate.is_none()
    }

    pub fn re_mu(&self) -> Option<[f64; 2]> {
        self.estimate.map(|e| e.eigen.re())
    }

    pub fn is_complex_pair(&self) -> bool {
        self.estimate.is_some_and(|e| e.eigen.is_complex_pair)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    /// The subsampled trajectory the windows were cut from.
    pub frame: TimeSeriesFrame,
    pub records: Vec<WindowRecord>,
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    let model = cfg.model_spec();
    let frame = integrate(&model, &cfg.sim)?.subsample(cfg.sub)?;
    let records = analyze_frame(cfg, &model, &frame)?;
    Ok(PipelineRun { frame, records })
}

/// Window start indices, `floor((n − block)/stride) + 1` of them.
pub fn window_starts(n: usize, block_size: usize, stride: usize) -> Vec<usize> {
    if n < block_size || stride == 0 {
        return Vec::new();
    }
    (0..=(n - block_size)).step_by(stride).collect()
}

/// First sample whose distance from the tracked equilibrium exceeds
/// `threshold`, or where the tracked equilibrium no longer exists.
pub fn first_departure<D: Dynamics + ?Sized>(
    frame: &TimeSeriesFrame,
    model: &D,
    threshold: f64,
) -> Option<usize> {
    (0..frame.len()).find(|&i| match model.equilibrium(frame.lambda[i]) {
        Ok(eq) => {
            let dx = frame.x[i] - eq[0];
            let dy = frame.y[i] - eq[1];
            dx.hypot(dy) > threshold
        }
        Err(_) => true,
    })
}

fn window_seed(seed: u64, start: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the window analysis on an already subsampled frame.
pub fn analyze_frame(
    cfg: &PipelineConfig,
    model: &ModelSpec,
    frame: &TimeSeriesFrame,
) -> Result<Vec<WindowRecord>> {
    cfg.validate()?;
    if frame.len() < cfg.block_size {
        return Err(Error::InsufficientData {
            needed: cfg.block_size,
            got: frame.len(),
        });
    }
    let mut starts = window_starts(frame.len(), cfg.block_size, cfg.stride);
    let last = |s: usize| s + cfg.block_size - 1;
    match cfg.stop_rule {
        StopRule::LambdaZero => starts.retain(|&s| frame.lambda[last(s)] > 0.0),
        StopRule::Departure(_) => {
            let threshold = cfg.departure_threshold().unwrap_or(f64::INFINITY);
            if let Some(dep) = first_departure(frame, model, threshold) {
                starts.retain(|&s| last(s) < dep);
            }
        }
        StopRule::EndOfSeries => {}
    }
    Ok(starts
        .par_iter()
        .map(|&s| analyze_window(cfg, model, frame, s))
        .collect())
}

fn analyze_window(
    cfg: &PipelineConfig,
    model: &ModelSpec,
    frame: &TimeSeriesFrame,
    start: usize,
) -> WindowRecord {
    let end = start + cfg.block_size;
    let end_time = frame.t[end - 1];
    let end_lambda = frame.lambda[end - 1];
    let dt = frame.dt_sample;
    let analytic_re = model.analytic_eigen(end_lambda).ok().map(|e| e.re());
    let window = match Window::new(
        &frame.x[start..end],
        &frame.y[start..end],
        dt,
        end_time,
        end_lambda,
    ) {
        Ok(w) => w,
        Err(e) => {
            return WindowRecord {
                end_time,
                end_lambda,
                estimate: None,
                failure: Some(e),
                ar1: [None, None],
                ar1_rate: [None, None],
                analytic_re,
            }
        }
    };

    let ar1 = [Channel::X, Channel::Y].map(|c| lag1_autocorrelation(&window, c, cfg.detrend).ok());
    let ar1_rate = ar1.map(|r| r.and_then(|r| ar1_rate(r, dt).ok()));

    let (estimate, failure) = match estimate_window(cfg, &window, start) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e)),
    };
    WindowRecord {
        end_time,
        end_lambda,
        estimate,
        failure,
        ar1,
        ar1_rate,
        analytic_re,
    }
}

fn estimate_window(
    cfg: &PipelineConfig,
    window: &Window<'_>,
    start: usize,
) -> Result<WindowEstimate> {
    let fit = fit_var(window)?;
    let jac = jacobian_from_var(&fit, window.dt_sample)?;
    let mc = |fit: &crate::var::VarFit| {
        let mc_cfg = McConfig {
            seed: window_seed(cfg.mc.seed, start),
            ..cfg.mc
        };
        monte_carlo_se(&fit.a_hat, &fit.se_a, window.dt_sample, &mc_cfg)
            .ok()
            .map(|p| p.values())
    };
    let delta = || delta_se(&jac.j, &jac.se_j).ok().map(|p| p.values());
    let (se_re_mu, se_delta) = match cfg.se_method {
        SeChoice::MonteCarlo => (mc(&fit), None),
        SeChoice::Delta => {
            let d = delta();
            (d, d)
        }
        SeChoice::Both => (mc(&fit), delta()),
    };
    Ok(WindowEstimate {
        eigen: jac.eigen,
        method: jac.method,
        a_hat: fit.a_hat,
        se_a: fit.se_a,
        se_re_mu,
        se_delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Leading,
    Nonleading,
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "leading" => Ok(Which::Leading),
            "nonleading" | "non_leading" => Ok(Which::Nonleading),
            other => Err(Error::InvalidArgument(format!(
                "expected leading or nonleading, got `{other}`"
            ))),
        }
    }
}

/// Linear extrapolation of an eigenvalue real-part trend to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Time at which the fitted line reaches zero; absent unless the slope is positive.
    pub t_cross: Option<f64>,
    pub lambda_cross: Option<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub se_slope: f64,
    pub n_used: usize,
}

/// Minimum successful records inside the fit range.
pub const MIN_EXTRAPOLATION_RECORDS: usize = 10;

pub fn extrapolate_crossing(
    records: &[WindowRecord],
    which: Which,
    fit_range: (f64, f64),
) -> Result<Crossing> {
    let (t0, t1) = fit_range;
    let k = match which {
        Which::Leading => 0,
        Which::Nonleading => 1,
    };
    let pts: Vec<(f64, f64, f64)> = records
        .iter()
        .filter(|r| r.end_time >= t0 && r.end_time <= t1)
        .filter_map(|r| r.re_mu().map(|re| (r.end_time, re[k], r.end_lambda)))
        .collect();
    if pts.len() < MIN_EXTRAPOLATION_RECORDS {
        return Err(Error::InsufficientData {
            needed: MIN_EXTRAPOLATION_RECORDS,
            got: pts.len(),
        });
    }
    let ts: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let re: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let lam: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let line = fit_line(&ts, &re)?;
    let t_cross = (line.slope > 0.0).then(|| -line.intercept / line.slope);
    // λ is affine in t, so its own fit maps the crossing time to a forcing value
    let lambda_cross = match (t_cross, fit_line(&ts, &lam)) {
        (Some(t), Ok(l)) => Some(l.at(t)),
        _ => None,
    };
    Ok(Crossing {
        t_cross,
        lambda_cross,
        slope: line.slope,
        intercept: line.intercept,
        se_slope: line.se_slope,
        n_used: pts.len(),
    })
}
