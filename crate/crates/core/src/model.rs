//! Benchmark fast-slow systems: a fold on a stable slow manifold, a path
//! through the Bautin normal form giving a subcritical Hopf bifurcation,
//! and a reduced singular Hopf system.
//!
//! All three share the forcing parameter `lambda` and lose stability of the
//! tracked equilibrium at `lambda = 0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
pub use crate::linalg::EigenPair;
use crate::linalg::{eigen_pair, Mat2};
use crate::sde::{NoiseScaling, SimConfig};

/// Deterministic drift, additive noise and linearization of a planar system.
pub trait Dynamics: Sync {
    fn drift(&self, state: [f64; 2], lambda: f64) -> [f64; 2];

    /// Effective additive noise amplitudes multiplying `dW_x`, `dW_y`.
    fn diffusion(&self) -> [f64; 2];

    fn jacobian(&self, state: [f64; 2], lambda: f64) -> Mat2;

    /// Starting point for the equilibrium Newton solve, `None` when the
    /// tracked equilibrium does not exist at `lambda`.
    fn equilibrium_seed(&self, lambda: f64) -> Option<[f64; 2]>;

    /// Tracked equilibrium at `lambda` by Newton iteration from the seed.
    fn equilibrium(&self, lambda: f64) -> Result<[f64; 2]> {
        let seed = self
            .equilibrium_seed(lambda)
            .ok_or_else(|| Error::NoEquilibrium {
                lambda,
                reason: "tracked branch does not exist".into(),
            })?;
        newton(self, seed, lambda)
    }
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 100;

fn newton<D: Dynamics + ?Sized>(model: &D, seed: [f64; 2], lambda: f64) -> Result<[f64; 2]> {
    let mut s = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let f = model.drift(s, lambda);
        if f[0].abs().max(f[1].abs()) < NEWTON_TOL {
            return Ok(s);
        }
        let inv = model
            .jacobian(s, lambda)
            .try_inverse()
            .ok_or_else(|| Error::NoEquilibrium {
                lambda,
                reason: "singular jacobian in newton step".into(),
            })?;
        let dx = inv[(0, 0)] * f[0] + inv[(0, 1)] * f[1];
        let dy = inv[(1, 0)] * f[0] + inv[(1, 1)] * f[1];
        s = [s[0] - dx, s[1] - dy];
        if dx.abs().max(dy.abs()) < NEWTON_TOL * (1.0 + s[0].abs().max(s[1].abs())) {
            return Ok(s);
        }
    }
    Err(Error::NoEquilibrium {
        lambda,
        reason: format!("newton did not converge in {NEWTON_MAX_ITER} iterations"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Fold,
    SubcriticalHopf,
    SingularHopf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::Fold,
        ModelKind::SubcriticalHopf,
        ModelKind::SingularHopf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Fold => "fold",
            ModelKind::SubcriticalHopf => "subcritical_hopf",
            ModelKind::SingularHopf => "singular_hopf",
        }
    }

    /// Whether the model carries a timescale ratio.
    pub fn has_epsilon(self) -> bool {
        !matches!(self, ModelKind::SubcriticalHopf)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fold" => Ok(ModelKind::Fold),
            "subcritical_hopf" | "hopf" => Ok(ModelKind::SubcriticalHopf),
            "singular_hopf" => Ok(ModelKind::SingularHopf),
            other => Err(Error::config(
                "model",
                format!(
                    "unknown model `{other}` (expected fold, subcritical_hopf or singular_hopf)"
                ),
            )),
        }
    }
}

/// One benchmark system with its parameters fixed.
///
/// The drift of a fast variable is divided by `ε`; its noise amplitude is
/// divided too only under [`NoiseScaling::Epsilon`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub epsilon: f64,
    pub omega: f64,
    diffusion: [f64; 2],
}

impl ModelSpec {
    /// Model with noise amplitudes applied as given.
    pub fn new(kind: ModelKind, epsilon: f64, omega: f64, alpha_x: f64, alpha_y: f64) -> Self {
        Self::with_scaling(
            kind,
            epsilon,
            omega,
            [alpha_x, alpha_y],
            NoiseScaling::Unscaled,
        )
    }

    pub fn with_scaling(
        kind: ModelKind,
        epsilon: f64,
        omega: f64,
        [alpha_x, alpha_y]: [f64; 2],
        scaling: NoiseScaling,
    ) -> Self {
        let diffusion = if kind.has_epsilon() && scaling == NoiseScaling::Epsilon {
            [alpha_x / epsilon, alpha_y]
        } else {
            [alpha_x, alpha_y]
        };
        ModelSpec {
            kind,
            epsilon,
            omega,
            diffusion,
        }
    }

    pub fn from_config(kind: ModelKind, cfg: &SimConfig) -> Self {
        Self::with_scaling(
            kind,
            cfg.epsilon,
            cfg.omega,
            [cfg.alpha_x, cfg.alpha_y],
            cfg.noise_scaling,
        )
    }

    /// Noise-free copy, used for phase portraits.
    pub fn deterministic(&self) -> Self {
        ModelSpec {
            diffusion: [0.0, 0.0],
            ..*self
        }
    }

    /// Box containing every attractor of the model, used for sampling checks.
    pub fn state_box(&self) -> [f64; 2] {
        match self.kind {
            ModelKind::SubcriticalHopf => [-1.2, 1.2],
            _ => [-1.5, 1.5],
        }
    }

    /// Eigenvalues of the Jacobian at the tracked equilibrium.
    pub fn analytic_eigen(&self, lambda: f64) -> Result<EigenPair> {
        let eq = self.equilibrium(lambda)?;
        Ok(eigen_pair(&self.jacobian(eq, lambda)))
    }
}

impl Dynamics for ModelSpec {
    fn drift(&self, [x, y]: [f64; 2], lambda: f64) -> [f64; 2] {
        match self.kind {
            ModelKind::Fold => fold_drift(x, y, lambda, self.epsilon),
            ModelKind::SubcriticalHopf => hopf_drift(x, y, lambda, self.omega),
            ModelKind::SingularHopf => singular_hopf_drift(x, y, lambda, self.epsilon),
        }
    }

    fn diffusion(&self) -> [f64; 2] {
        self.diffusion
    }

    fn jacobian(&self, [x, y]: [f64; 2], lambda: f64) -> Mat2 {
        match self.kind {
            ModelKind::Fold => fold_jacobian(y, self.epsilon),
            ModelKind::SubcriticalHopf => hopf_jacobian(x, y, lambda, self.omega),
            ModelKind::SingularHopf => singular_hopf_jacobian(x, self.epsilon),
        }
    }

    fn equilibrium_seed(&self, lambda: f64) -> Option<[f64; 2]> {
        match self.kind {
            // upper branch, the one destroyed at the fold
            ModelKind::Fold => (lambda >= 0.0).then(|| [lambda, lambda.sqrt()]),
            ModelKind::SubcriticalHopf => Some([0.0, 0.0]),
            ModelKind::SingularHopf => Some([lambda, lambda * lambda * (1.0 + lambda)]),
        }
    }
}

pub fn fold_drift(x: f64, y: f64, lambda: f64, epsilon: f64) -> [f64; 2] {
    [(y * y * (1.0 + y) - x) / epsilon, lambda - x]
}

pub fn fold_jacobian(y: f64, epsilon: f64) -> Mat2 {
    Mat2::new(-1.0 / epsilon, (2.0 * y + 3.0 * y * y) / epsilon, -1.0, 0.0)
}

/// `(−1 ± √(1 − 4ε(2y + 3y²))) / 2ε`, the fold Jacobian's eigenvalues along
/// the critical manifold.
pub fn fold_eigenvalues(y: f64, epsilon: f64) -> EigenPair {
    let disc = 1.0 - 4.0 * epsilon * (2.0 * y + 3.0 * y * y);
    let den = 2.0 * epsilon;
    if disc < 0.0 {
        EigenPair::complex(-1.0 / den, (-disc).sqrt() / den)
    } else {
        let s = disc.sqrt();
        EigenPair::real((-1.0 + s) / den, (-1.0 - s) / den)
    }
}

/// Cartesian form of `ż = (−λ + iω)z + |z|²z − |z|⁴z`.
pub fn hopf_drift(x: f64, y: f64, lambda: f64, omega: f64) -> [f64; 2] {
    let (x2, y2) = (x * x, y * y);
    [
        -lambda * x - omega * y + x2 * x + x * y2 - x2 * x2 * x - 2.0 * x2 * x * y2 - x * y2 * y2,
        -lambda * y + omega * x + y2 * y + x2 * y - x2 * x2 * y - y2 * y2 * y - 2.0 * x2 * y2 * y,
    ]
}

pub fn hopf_jacobian(x: f64, y: f64, lambda: f64, omega: f64) -> Mat2 {
    let (x2, y2) = (x * x, y * y);
    let dfx_dx = -lambda + 3.0 * x2 + y2 - 5.0 * x2 * x2 - 6.0 * x2 * y2 - y2 * y2;
    let dfx_dy = -omega + 2.0 * x * y - 4.0 * x2 * x * y - 4.0 * x * y2 * y;
    let dfy_dx = omega + 2.0 * x * y - 4.0 * x2 * x * y - 4.0 * x * y2 * y;
    let dfy_dy = -lambda + 3.0 * y2 + x2 - x2 * x2 - 5.0 * y2 * y2 - 6.0 * x2 * y2;
    Mat2::new(dfx_dx, dfx_dy, dfy_dx, dfy_dy)
}

/// Radii of the circular invariant sets of the Bautin path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCycles {
    pub rho0: f64,
    /// Unstable cycle; `Some(0.0)` at `lambda = 0` where it merges with the origin.
    pub rho_minus: Option<f64>,
    pub rho_plus: Option<f64>,
}

/// Zeros of `−λρ + ρ³ − ρ⁵`: `ρ± = √((1 ± √(1 − 4λ))/2)` where real.
pub fn hopf_limit_cycles(lambda: f64) -> LimitCycles {
    let disc = 1.0 - 4.0 * lambda;
    if disc < 0.0 {
        return LimitCycles {
            rho0: 0.0,
            rho_minus: None,
            rho_plus: None,
        };
    }
    let s = disc.sqrt();
    let plus = (0.5 * (1.0 + s)).sqrt();
    let inner_minus = 0.5 * (1.0 - s);
    let rho_minus = if lambda >= 0.0 && inner_minus >= 0.0 {
        Some(inner_minus.sqrt())
    } else {
        None
    };
    LimitCycles {
        rho0: 0.0,
        rho_minus,
        rho_plus: Some(plus),
    }
}

pub fn singular_hopf_drift(x: f64, y: f64, lambda: f64, epsilon: f64) -> [f64; 2] {
    [(y - x * x * (1.0 + x)) / epsilon, lambda - x]
}

pub fn singular_hopf_jacobian(x: f64, epsilon: f64) -> Mat2 {
    Mat2::new((-2.0 * x - 3.0 * x * x) / epsilon, 1.0 / epsilon, -1.0, 0.0)
}

/// Point sets for phase portraits of the fast-slow models.
#[derive(Debug, Clone, PartialEq)]
pub struct PortraitCurves {
    /// The critical manifold `{ẋ = 0}`.
    pub critical_manifold: Vec<[f64; 2]>,
    /// The `ẏ = 0` nullcline, the vertical line `x = λ`.
    pub nullcline_y: Vec<[f64; 2]>,
}

/// Samples the critical manifold and the `ẏ`-nullcline over `grid`.
///
/// For the fold the grid parametrizes `y` (manifold `x = y²(1+y)`); for the
/// singular Hopf system it parametrizes `x` (manifold `y = x²(1+x)`). The
/// nullcline is sampled at the same grid values along its free coordinate.
pub fn critical_manifold_and_nullclines(
    kind: ModelKind,
    lambda: f64,
    grid: &[f64],
) -> Result<PortraitCurves> {
    let (critical_manifold, nullcline_y) = match kind {
        ModelKind::Fold => (
            grid.iter().map(|&y| [y * y * (1.0 + y), y]).collect(),
            grid.iter().map(|&y| [lambda, y]).collect(),
        ),
        ModelKind::SingularHopf => {
            let manifold: Vec<[f64; 2]> = grid.iter().map(|&x| [x, x * x * (1.0 + x)]).collect();
            let (lo, hi) = manifold
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[1]), hi.max(p[1]))
                });
            let n = grid.len().max(2);
            let nullcline = (0..n)
                .map(|i| [lambda, lo + (hi - lo) * i as f64 / (n - 1) as f64])
                .collect();
            (manifold, nullcline)
        }
        ModelKind::SubcriticalHopf => {
            return Err(Error::InvalidArgument(
                "subcritical_hopf has no timescale split and no critical manifold".into(),
            ))
        }
    };
    Ok(PortraitCurves {
        critical_manifold,
        nullcline_y,
    })
}

/// `n` evenly spaced values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn fold_drift_examples() {
        assert_eq!(fold_drift(0.0, 0.0, 0.0, 0.1), [0.0, 0.0]);
        let d = fold_drift(0.0, 1.0, 0.0, 0.1);
        assert!(close(d[0], 20.0, 1e-12) && d[1] == 0.0);
    }

    #[test]
    fn fold_eigenvalues_at_bifurcation() {
        let e = fold_eigenvalues(0.0, 0.1);
        assert!(close(e.mu1.re, 0.0, 1e-12) && close(e.mu2.re, -10.0, 1e-12));
        assert!(!e.is_complex_pair);
    }

    #[test]
    fn fold_eigenvalues_complex_branch() {
        let e = fold_eigenvalues(1.0, 0.1);
        assert!(e.is_complex_pair);
        assert!(close(e.mu1.re, -5.0, 1e-12) && close(e.mu2.re, -5.0, 1e-12));
        assert!(close(e.mu1.im, 5.0, 1e-12));
    }

    #[test]
    fn fold_equilibrium_is_on_upper_branch() {
        let m = ModelSpec::new(ModelKind::Fold, 0.1, 0.0, 0.0, 0.0);
        let [x, y] = m.equilibrium(0.3).unwrap();
        assert!(close(x, 0.3, 1e-14));
        assert!(y > 0.0 && close(y * y * (1.0 + y), 0.3, 1e-12));
        assert!(matches!(
            m.equilibrium(-0.01),
            Err(Error::NoEquilibrium { .. })
        ));
    }

    #[test]
    fn hopf_origin_and_cycles() {
        assert_eq!(hopf_drift(0.0, 0.0, 0.4, 0.3), [0.0, 0.0]);
        let c = hopf_limit_cycles(0.25);
        assert!(close(c.rho_minus.unwrap(), 0.5f64.sqrt(), 1e-15));
        assert!(close(c.rho_plus.unwrap(), 0.5f64.sqrt(), 1e-15));
        let c = hopf_limit_cycles(0.0);
        assert_eq!(c.rho_plus, Some(1.0));
        assert_eq!(c.rho_minus, Some(0.0));
        let c = hopf_limit_cycles(-0.25);
        assert!(c.rho_minus.is_none() && c.rho_plus.is_some());
        let c = hopf_limit_cycles(0.3);
        assert!(c.rho_minus.is_none() && c.rho_plus.is_none());
    }

    #[test]
    fn hopf_radial_drift_vanishes_on_outer_cycle() {
        let lambda = 0.15;
        let rho = hopf_limit_cycles(lambda).rho_plus.unwrap();
        for k in 0..12 {
            let th = k as f64 * 0.5;
            let (x, y) = (rho * th.cos(), rho * th.sin());
            let [dx, dy] = hopf_drift(x, y, lambda, 0.3);
            let radial = (x * dx + y * dy) / rho;
            assert!(radial.abs() < 1e-10, "radial drift {radial}");
        }
    }

    #[test]
    fn singular_hopf_examples() {
        let l = 0.2;
        let d = singular_hopf_drift(l, l * l * (1.0 + l), l, 0.01);
        assert!(d[0].abs() < 1e-12 && d[1].abs() < 1e-12);
        let d = singular_hopf_drift(1.0, 0.0, 0.0, 0.01);
        assert!(close(d[0], -200.0, 1e-12) && close(d[1], -1.0, 1e-12));
        let e = eigen_pair(&singular_hopf_jacobian(0.0, 0.01));
        assert!(e.is_complex_pair);
        assert!(close(e.mu1.re, 0.0, 1e-12) && close(e.mu1.im, 10.0, 1e-12));
    }

    #[test]
    fn portrait_curves() {
        let grid = linspace(-1.5, 1.5, 31);
        let c = critical_manifold_and_nullclines(ModelKind::Fold, 0.1, &grid).unwrap();
        assert!(c.critical_manifold.contains(&[0.0, 0.0]));
        assert!(c.nullcline_y.iter().all(|p| p[0] == 0.1));
        let c = critical_manifold_and_nullclines(ModelKind::SingularHopf, 0.0, &[-1.0]).unwrap();
        assert_eq!(c.critical_manifold[0], [-1.0, 0.0]);
        assert!(critical_manifold_and_nullclines(ModelKind::SubcriticalHopf, 0.0, &grid).is_err());
    }

    #[test]
    fn model_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("saddle".parse::<ModelKind>().is_err());
    }

    #[test]
    fn noise_scaling_only_touches_fast_variable() {
        let alpha = [0.005, 0.005];
        let m = ModelSpec::with_scaling(
            ModelKind::SingularHopf,
            0.01,
            0.0,
            alpha,
            NoiseScaling::Epsilon,
        );
        assert_eq!(m.diffusion(), [0.5, 0.005]);
        let m = ModelSpec::with_scaling(
            ModelKind::SingularHopf,
            0.01,
            0.0,
            alpha,
            NoiseScaling::Unscaled,
        );
        assert_eq!(m.diffusion(), alpha);
        let h = ModelSpec::with_scaling(
            ModelKind::SubcriticalHopf,
            0.5,
            0.3,
            alpha,
            NoiseScaling::Epsilon,
        );
        assert_eq!(h.diffusion(), alpha);
    }
}
