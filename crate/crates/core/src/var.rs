//! VAR(2,1) fitting on a single window, Jacobian recovery and the lag-1
//! autocorrelation indicator.
//!
//! A window of a stationary planar OU process sampled every `Δt` satisfies
//! `X_{n+1} = c + A·X_n + ξ_n` with `A = exp(J·Δt)`, so the local Jacobian is
//! recovered as `J = ln(A)/Δt`. When the principal logarithm of the fitted
//! `Â` does not exist the estimator falls back to `(Â − I)/Δt`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3};

use crate::error::{Error, Result};
use crate::linalg::{eigen_pair, principal_log, EigenPair, Mat2};
use crate::uncertainty::SePair;

/// Rows needed for OLS with intercept plus residual degrees of freedom (`k² + k + 2`).
pub const MIN_WINDOW_LEN: usize = 8;

/// A contiguous block of a planar series.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub dt_sample: f64,
    pub end_time: f64,
    pub end_lambda: f64,
}

impl<'a> Window<'a> {
    pub fn new(
        x: &'a [f64],
        y: &'a [f64],
        dt_sample: f64,
        end_time: f64,
        end_lambda: f64,
    ) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(
                "window channels differ in length".into(),
            ));
        }
        if x.len() < MIN_WINDOW_LEN {
            return Err(Error::InsufficientData {
                needed: MIN_WINDOW_LEN,
                got: x.len(),
            });
        }
        if !(dt_sample > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt_sample must be positive, got {dt_sample}"
            )));
        }
        Ok(Window {
            x,
            y,
            dt_sample,
            end_time,
            end_lambda,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn channel(&self, c: Channel) -> &'a [f64] {
        match c {
            Channel::X => self.x,
            Channel::Y => self.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    X,
    Y,
}

/// Least-squares VAR(2,1) fit of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarFit {
    pub c_hat: [f64; 2],
    pub a_hat: Mat2,
    /// Entrywise standard errors of `a_hat`.
    pub se_a: Mat2,
    pub resid_cov: Mat2,
    pub n_obs: usize,
}

/// Regresses `X_{n+1}` on `(1, x_n, y_n)` via Householder QR.
pub fn fit_var(window: &Window<'_>) -> Result<VarFit> {
    let len = window.len();
    if len < MIN_WINDOW_LEN {
        return Err(Error::InsufficientData {
            needed: MIN_WINDOW_LEN,
            got: len,
        });
    }
    if window.x.iter().chain(window.y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = len - 1;
    let (x, y) = (window.x, window.y);

    let z = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => x[i],
        _ => y[i],
    });
    let mut rhs = DMatrix::from_fn(n, 2, |i, j| if j == 0 { x[i + 1] } else { y[i + 1] });

    let col_norms: Vec<f64> = (0..3).map(|j| z.column(j).norm()).collect();
    let qr = z.qr();
    let r_full = qr.r();
    let r = Matrix3::from_fn(|i, j| r_full[(i, j)]);
    for i in 0..3 {
        if !(r[(i, i)].abs() > 1e-10 * col_norms[i]) {
            return Err(Error::RankDeficient);
        }
    }
    qr.q_tr_mul(&mut rhs);
    let r_inv = r.try_inverse().ok_or(Error::RankDeficient)?;
    // rows: intercept, coefficient on x, coefficient on y; columns: equation
    let top = nalgebra::Matrix3x2::from_fn(|i, j| rhs[(i, j)]);
    let coef = r_inv * top;

    let mut resid_cov = Mat2::zeros();
    for i in 0..n {
        let u0 = x[i + 1] - (coef[(0, 0)] + coef[(1, 0)] * x[i] + coef[(2, 0)] * y[i]);
        let u1 = y[i + 1] - (coef[(0, 1)] + coef[(1, 1)] * x[i] + coef[(2, 1)] * y[i]);
        resid_cov[(0, 0)] += u0 * u0;
        resid_cov[(0, 1)] += u0 * u1;
        resid_cov[(1, 1)] += u1 * u1;
    }
    resid_cov[(1, 0)] = resid_cov[(0, 1)];
    resid_cov /= (n - 3) as f64;

    // (ZᵀZ)⁻¹ = R⁻¹R⁻ᵀ
    let ztz_inv = r_inv * r_inv.transpose();
    let a_hat = Mat2::new(coef[(1, 0)], coef[(2, 0)], coef[(1, 1)], coef[(2, 1)]);
    let se_a = Mat2::from_fn(|i, j| {
        (resid_cov[(i, i)] * ztz_inv[(j + 1, j + 1)])
            .max(0.0)
            .sqrt()
    });

    Ok(VarFit {
        c_hat: [coef[(0, 0)], coef[(0, 1)]],
        a_hat,
        se_a,
        resid_cov,
        n_obs: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogMethod {
    MatrixLog,
    LinearTruncation,
}

impl LogMethod {
    pub fn name(self) -> &'static str {
        match self {
            LogMethod::MatrixLog => "log",
            LogMethod::LinearTruncation => "truncation",
        }
    }
}

impl fmt::Display for LogMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" | "matrix_log" => Ok(LogMethod::MatrixLog),
            "truncation" | "linear_truncation" => Ok(LogMethod::LinearTruncation),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianEstimate {
    pub j: Mat2,
    pub se_j: Mat2,
    pub method: LogMethod,
    pub eigen: EigenPair,
    pub se_re_mu: Option<SePair>,
}

/// `ln(Â)/Δt` through the principal logarithm, `(Â − I)/Δt` when it is inadmissible.
pub fn jacobian_from_matrix(a: &Mat2, dt_sample: f64) -> (Mat2, LogMethod) {
    match principal_log(a) {
        Some(l) => (l / dt_sample, LogMethod::MatrixLog),
        None => (
            (a - Mat2::identity()) / dt_sample,
            LogMethod::LinearTruncation,
        ),
    }
}

pub fn jacobian_from_var(fit: &VarFit, dt_sample: f64) -> Result<JacobianEstimate> {
    if !(dt_sample > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt_sample must be positive, got {dt_sample}"
        )));
    }
    let (j, method) = jacobian_from_matrix(&fit.a_hat, dt_sample);
    Ok(JacobianEstimate {
        j,
        se_j: fit.se_a / dt_sample,
        method,
        eigen: eigen_pair(&j),
        se_re_mu: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Detrend {
    #[default]
    Mean,
    Linear,
}

impl FromStr for Detrend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mean" => Ok(Detrend::Mean),
            "linear" => Ok(Detrend::Linear),
            other => Err(Error::config(
                "detrend",
                format!("expected mean or linear, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for Detrend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detrend::Mean => "mean",
            Detrend::Linear => "linear",
        })
    }
}

fn detrended(s: &[f64], detrend: Detrend) -> Vec<f64> {
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    match detrend {
        Detrend::Mean => s.iter().map(|v| v - mean).collect(),
        Detrend::Linear => {
            let t_mean = (n - 1.0) / 2.0;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (i, v) in s.iter().enumerate() {
                let dt = i as f64 - t_mean;
                sxy += dt * (v - mean);
                sxx += dt * dt;
            }
            let slope = sxy / sxx;
            s.iter()
                .enumerate()
                .map(|(i, v)| v - mean - slope * (i as f64 - t_mean))
                .collect()
        }
    }
}

/// Pearson correlation of the detrended series with itself shifted by one sample.
pub fn lag1_autocorrelation(
    window: &Window<'_>,
    channel: Channel,
    detrend: Detrend,
) -> Result<f64> {
    lag1_autocorrelation_of(window.channel(channel), detrend)
}

pub fn lag1_autocorrelation_of(series: &[f64], detrend: Detrend) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let s = detrended(series, detrend);
    let (a, b) = (&s[..s.len() - 1], &s[1..]);
    let m = a.len() as f64;
    let ma = a.iter().sum::<f64>() / m;
    let mb = b.iter().sum::<f64>() / m;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (u, v) in a.iter().zip(b) {
        let (du, dv) = (u - ma, v - mb);
        sab += du * dv;
        saa += du * du;
        sbb += dv * dv;
    }
    let scale = s
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let floor = (1e-13 * scale).powi(2) * m;
    if saa <= floor || sbb <= floor {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Continuous-time rate implied by a lag-1 autocorrelation, `ln(ρ₁)/Δt`.
pub fn ar1_rate(rho1: f64, dt_sample: f64) -> Result<f64> {
    if !(rho1 > 0.0 && rho1 <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rho1 must lie in (0, 1], got {rho1}"
        )));
    }
    if !(dt_sample > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt_sample must be positive, got {dt_sample}"
        )));
    }
    Ok(rho1.ln() / dt_sample)
}
