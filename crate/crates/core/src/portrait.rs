//! Phase-portrait data at a frozen forcing value.

use crate::error::Result;
use crate::model::{critical_manifold_and_nullclines, linspace, ModelKind, ModelSpec};
use crate::sde::{integrate_from, NoiseScaling, SimConfig};

/// Default reference forcing values for each model's portraits.
pub fn default_lambdas(kind: ModelKind) -> Vec<f64> {
    match kind {
        ModelKind::Fold => vec![0.1, 0.0, -0.1],
        ModelKind::SubcriticalHopf => vec![0.4, 0.15, -0.25],
        ModelKind::SingularHopf => vec![0.2, 0.05, 0.0, -0.05, -0.2],
    }
}

/// Initial conditions spread over the model's state box.
pub fn default_starts(model: &ModelSpec) -> Vec<[f64; 2]> {
    let [lo, hi] = model.state_box();
    let g = linspace(0.8 * lo, 0.8 * hi, 3);
    g.iter()
        .flat_map(|&x| g.iter().map(move |&y| [x, y]))
        .collect()
}

/// Deterministic trajectory (no noise, no ramp) from `start`, thinned to
/// every `keep_every`-th step.
pub fn frozen_trajectory(
    model: &ModelSpec,
    lambda: f64,
    start: [f64; 2],
    duration: f64,
    dt: f64,
    keep_every: usize,
) -> Result<Vec<[f64; 2]>> {
    let cfg = SimConfig {
        epsilon: model.epsilon,
        r: 0.0,
        dt,
        lambda0: lambda,
        alpha_x: 0.0,
        alpha_y: 0.0,
        omega: model.omega,
        tspan: duration,
        seed: 0,
        noise_scaling: NoiseScaling::default(),
    };
    let frame = integrate_from(&model.deterministic(), &cfg, start)?;
    Ok((0..frame.len())
        .step_by(keep_every.max(1))
        .map(|i| frame.state(i))
        .collect())
}

/// Named point sets: `critical_manifold`, `nullcline_y` (fast-slow models
/// only) and `trajectory_i` for each start that stays bounded.
pub fn phase_portrait(
    model: &ModelSpec,
    lambda: f64,
    starts: &[[f64; 2]],
    duration: f64,
) -> Result<Vec<(String, Vec<[f64; 2]>)>> {
    let mut sets = Vec::new();
    if model.kind != ModelKind::SubcriticalHopf {
        let grid = linspace(-1.5, 1.5, 301);
        let curves = critical_manifold_and_nullclines(model.kind, lambda, &grid)?;
        sets.push(("critical_manifold".to_string(), curves.critical_manifold));
        sets.push(("nullcline_y".to_string(), curves.nullcline_y));
    }
    let dt = match model.kind {
        ModelKind::SubcriticalHopf => 0.01,
        _ => 0.1 * model.epsilon.min(1.0),
    };
    for (i, &s) in starts.iter().enumerate() {
        if let Ok(points) = frozen_trajectory(model, lambda, s, duration, dt, 10) {
            sets.push((format!("trajectory_{i}"), points));
        }
    }
    Ok(sets)
}
