//! Stochastic Heun integration of ramped planar systems with additive noise.
//!
//! The forcing follows `λ(t) = λ₀ − r·t` in closed form. Each step draws one
//! Wiener increment per component and reuses it in predictor and corrector:
//!
//! ```text
//! x̃  = x + f(x, λ_n)·dt + g·ΔW
//! x' = x + dt/2·(f(x, λ_n) + f(x̃, λ_{n+1})) + g·ΔW
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Dynamics;

/// States beyond this magnitude are treated as a post-tipping blowup.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// How the noise on a fast variable relates to the timescale ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseScaling {
    /// `dx = (f/ε) dt + α_x dW`: the amplitude is the one seen by `x`.
    #[default]
    Unscaled,
    /// `ε·dx = f dt + α_x dW`, i.e. `dx = (f/ε) dt + (α_x/ε) dW`.
    Epsilon,
}

impl NoiseScaling {
    pub fn name(self) -> &'static str {
        match self {
            NoiseScaling::Unscaled => "unscaled",
            NoiseScaling::Epsilon => "epsilon",
        }
    }
}

impl fmt::Display for NoiseScaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unscaled" => Ok(NoiseScaling::Unscaled),
            "epsilon" => Ok(NoiseScaling::Epsilon),
            other => Err(Error::config(
                "sim.noise_scaling",
                format!("unknown value `{other}` (expected unscaled or epsilon)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Timescale ratio; ignored by models without a fast variable.
    pub epsilon: f64,
    /// Ramp rate of the forcing.
    pub r: f64,
    pub dt: f64,
    pub lambda0: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    /// Rotation frequency of the Hopf model.
    pub omega: f64,
    pub tspan: f64,
    pub seed: u64,
    pub noise_scaling: NoiseScaling,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sim.dt", self.dt),
            ("sim.tspan", self.tspan),
            ("sim.epsilon", self.epsilon),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(
                    field,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        let non_negative = [
            ("sim.r", self.r),
            ("sim.alpha_x", self.alpha_x),
            ("sim.alpha_y", self.alpha_y),
        ];
        for (field, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(
                    field,
                    format!("must be non-negative, got {v}"),
                ));
            }
        }
        for (field, v) in [("sim.lambda0", self.lambda0), ("sim.omega", self.omega)] {
            if !v.is_finite() {
                return Err(Error::config(field, "must be finite"));
            }
        }
        Ok(())
    }

    /// Number of samples in a trajectory, `floor(tspan/dt) + 1`.
    pub fn n_samples(&self) -> usize {
        // guard against tspan/dt landing just below an integer
        let steps = self.tspan / self.dt;
        (steps + steps * 1e-12).floor() as usize + 1
    }

    pub fn lambda_at(&self, t: f64) -> f64 {
        self.lambda0 - self.r * t
    }
}

/// Uniformly sampled trajectory with its forcing values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesFrame {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: Vec<f64>,
    pub dt_sample: f64,
}

impl TimeSeriesFrame {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn state(&self, i: usize) -> [f64; 2] {
        [self.x[i], self.y[i]]
    }

    /// Keeps every `sub`-th sample starting at index 0.
    pub fn subsample(&self, sub: usize) -> Result<TimeSeriesFrame> {
        if sub == 0 {
            return Err(Error::config("sub", "must be at least 1"));
        }
        let pick = |v: &[f64]| v.iter().step_by(sub).copied().collect::<Vec<_>>();
        Ok(TimeSeriesFrame {
            t: pick(&self.t),
            x: pick(&self.x),
            y: pick(&self.y),
            lambda: pick(&self.lambda),
            dt_sample: self.dt_sample * sub as f64,
        })
    }
}

/// Seeded source of Wiener increments with standard deviation `√dt`.
pub struct WienerSource {
    rng: ChaCha8Rng,
    scale: f64,
}

impl WienerSource {
    pub fn new(dt: f64, seed: u64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        Ok(WienerSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
            scale: dt.sqrt(),
        })
    }

    pub fn next_increment(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        z * self.scale
    }

    pub fn next_pair(&mut self) -> [f64; 2] {
        [self.next_increment(), self.next_increment()]
    }
}

pub fn wiener_increments(n: usize, dt: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut src = WienerSource::new(dt, seed)?;
    Ok((0..n).map(|_| src.next_increment()).collect())
}

/// Integrates from the stable equilibrium at `λ₀` with seeded noise.
pub fn integrate<D: Dynamics + ?Sized>(model: &D, cfg: &SimConfig) -> Result<TimeSeriesFrame> {
    cfg.validate()?;
    let start = model.equilibrium(cfg.lambda0)?;
    integrate_from(model, cfg, start)
}

/// Integrates from an arbitrary initial state with seeded noise.
pub fn integrate_from<D: Dynamics + ?Sized>(
    model: &D,
    cfg: &SimConfig,
    start: [f64; 2],
) -> Result<TimeSeriesFrame> {
    cfg.validate()?;
    let mut src = WienerSource::new(cfg.dt, cfg.seed)?;
    integrate_with_noise(model, cfg, start, || src.next_pair())
}

/// Integrates with caller-supplied Wiener increments (one pair per step).
pub fn integrate_with_noise<D, F>(
    model: &D,
    cfg: &SimConfig,
    start: [f64; 2],
    mut increments: F,
) -> Result<TimeSeriesFrame>
where
    D: Dynamics + ?Sized,
    F: FnMut() -> [f64; 2],
{
    cfg.validate()?;
    let n = cfg.n_samples();
    let dt = cfg.dt;
    let g = model.diffusion();

    let mut t = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);

    let mut s = start;
    for i in 0..n {
        let ti = i as f64 * dt;
        let li = cfg.lambda_at(ti);
        t.push(ti);
        x.push(s[0]);
        y.push(s[1]);
        lambda.push(li);
        if i + 1 == n {
            break;
        }
        let l_next = cfg.lambda_at((i + 1) as f64 * dt);
        let dw = increments();
        let noise = [g[0] * dw[0], g[1] * dw[1]];
        let f0 = model.drift(s, li);
        let pred = [s[0] + f0[0] * dt + noise[0], s[1] + f0[1] * dt + noise[1]];
        let f1 = model.drift(pred, l_next);
        s = [
            s[0] + 0.5 * dt * (f0[0] + f1[0]) + noise[0],
            s[1] + 0.5 * dt * (f0[1] + f1[1]) + noise[1],
        ];
        let mag = s[0].abs().max(s[1].abs());
        if !(mag <= DIVERGENCE_LIMIT) {
            return Err(Error::Divergence {
                t: (i + 1) as f64 * dt,
                limit: DIVERGENCE_LIMIT,
            });
        }
    }

    Ok(TimeSeriesFrame {
        t,
        x,
        y,
        lambda,
        dt_sample: dt,
    })
}
