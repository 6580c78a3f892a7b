//! Standard errors of eigenvalue real parts, by first-order delta method
//! and by Monte Carlo resampling of the VAR coefficient matrix.
//!
//! Both methods treat the four entries as independent random variables.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigen_pair, principal_log, Mat2};

/// Below this many draws the Monte Carlo loop runs on the calling thread.
const PARALLEL_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub max_discard_fraction: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 1000,
            seed: 0,
            max_discard_fraction: 0.5,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 100 {
            return Err(Error::config(
                "mc.n_samples",
                format!("must be at least 100, got {}", self.n_samples),
            ));
        }
        if !(0.0..1.0).contains(&self.max_discard_fraction) {
            return Err(Error::config(
                "mc.max_discard_fraction",
                format!("must lie in [0, 1), got {}", self.max_discard_fraction),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeMethod {
    Delta,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SePair {
    pub se_re_mu1: f64,
    pub se_re_mu2: f64,
    pub method: SeMethod,
    /// Draws retained (Monte Carlo only).
    pub n_used: usize,
    pub discard_count: usize,
    /// Set when the discriminant is close enough to zero that the real-case
    /// derivatives are unreliable.
    pub near_boundary: bool,
}

impl SePair {
    pub fn values(&self) -> [f64; 2] {
        [self.se_re_mu1, self.se_re_mu2]
    }
}

/// Which SE route the pipeline reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeChoice {
    #[default]
    MonteCarlo,
    Delta,
    /// Report Monte Carlo, compute delta alongside for comparison.
    Both,
}

impl FromStr for SeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "monte_carlo" | "mc" => Ok(SeChoice::MonteCarlo),
            "delta" => Ok(SeChoice::Delta),
            "both" => Ok(SeChoice::Both),
            other => Err(Error::config(
                "se_method",
                format!("expected monte_carlo, delta or both, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for SeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeChoice::MonteCarlo => "monte_carlo",
            SeChoice::Delta => "delta",
            SeChoice::Both => "both",
        })
    }
}

/// Partial derivatives of `Re(μ₁)`, `Re(μ₂)` with respect to `(a, b, c, d)`.
pub fn real_part_gradients(j: &Mat2) -> ([[f64; 4]; 2], f64) {
    let (a, b, c, d) = (j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)]);
    // a² + d² − 2ad + 4bc, grouped to avoid cancellation
    let disc = (a - d) * (a - d) + 4.0 * b * c;
    if disc <= 0.0 {
        let g = [0.5, 0.0, 0.0, 0.5];
        return ([g, g], disc);
    }
    let s = disc.sqrt();
    let ga = (a - d) / (2.0 * s);
    let gb = c / s;
    let gc = b / s;
    (
        [[0.5 + ga, gb, gc, 0.5 - ga], [0.5 - ga, -gb, -gc, 0.5 + ga]],
        disc,
    )
}

pub fn delta_se(j: &Mat2, se_j: &Mat2) -> Result<SePair> {
    if se_j.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidArgument(
            "standard errors must be non-negative".into(),
        ));
    }
    let (grads, disc) = real_part_gradients(j);
    let se = [se_j[(0, 0)], se_j[(0, 1)], se_j[(1, 0)], se_j[(1, 1)]];
    let combine = |g: &[f64; 4]| {
        g.iter()
            .zip(&se)
            .map(|(gi, si)| (gi * si).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let scale = j.iter().map(|v| v.abs()).sum::<f64>();
    Ok(SePair {
        se_re_mu1: combine(&grads[0]),
        se_re_mu2: combine(&grads[1]),
        method: SeMethod::Delta,
        n_used: 0,
        discard_count: 0,
        near_boundary: disc > 0.0 && disc < 1e-12 * scale * scale,
    })
}

/// Real parts, descending, of the Jacobian recovered from one perturbed draw;
/// `None` when the draw has no real principal logarithm.
fn draw_real_parts(
    base: &ChaCha8Rng,
    index: usize,
    a_hat: &Mat2,
    se_a: &Mat2,
    dt: f64,
) -> Option<[f64; 2]> {
    let mut rng = base.clone();
    rng.set_stream(index as u64);
    let mut sample = *a_hat;
    for k in 0..4 {
        let (i, j) = (k / 2, k % 2);
        let z: f64 = StandardNormal.sample(&mut rng);
        sample[(i, j)] += se_a[(i, j)] * z;
    }
    let jac = principal_log(&sample)? / dt;
    Some(eigen_pair(&jac).re())
}

/// Sample standard deviations of `Re(μ₁)`, `Re(μ₂)` over Gaussian draws of `Â`.
///
/// Draw `i` uses ChaCha stream `i` under `cfg.seed`, so results do not depend
/// on how the draws are scheduled.
pub fn monte_carlo_se(a_hat: &Mat2, se_a: &Mat2, dt_sample: f64, cfg: &McConfig) -> Result<SePair> {
    cfg.validate()?;
    if !(dt_sample > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt_sample must be positive, got {dt_sample}"
        )));
    }
    if se_a.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidArgument(
            "standard errors must be non-negative".into(),
        ));
    }
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_samples;
    let draw = |i| draw_real_parts(&base, i, a_hat, se_a, dt_sample);
    let draws: Vec<Option<[f64; 2]>> = if n >= PARALLEL_DRAWS {
        (0..n).into_par_iter().map(draw).collect()
    } else {
        (0..n).map(draw).collect()
    };
    let kept: Vec<[f64; 2]> = draws.into_iter().flatten().collect();
    let discarded = n - kept.len();
    if discarded as f64 > cfg.max_discard_fraction * n as f64 || kept.len() < 2 {
        return Err(Error::TooManyDiscards {
            discarded,
            total: n,
            limit: cfg.max_discard_fraction,
        });
    }
    // shifted by the first draw so identical draws give exactly zero
    let sd = |k: usize| {
        let m = kept.len() as f64;
        let shift = kept[0][k];
        let (s1, s2) = kept.iter().fold((0.0, 0.0), |(s1, s2), p| {
            let d = p[k] - shift;
            (s1 + d, s2 + d * d)
        });
        ((s2 - s1 * s1 / m).max(0.0) / (m - 1.0)).sqrt()
    };
    let (grads_disc, scale) = {
        let (jac, _) = crate::var::jacobian_from_matrix(a_hat, dt_sample);
        (
            real_part_gradients(&jac).1,
            jac.iter().map(|v| v.abs()).sum::<f64>(),
        )
    };
    Ok(SePair {
        se_re_mu1: sd(0),
        se_re_mu2: sd(1),
        method: SeMethod::MonteCarlo,
        n_used: kept.len(),
        discard_count: discarded,
        near_boundary: grads_disc > 0.0 && grads_disc < 1e-12 * scale * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_case_uses_half_trace() {
        let j = Mat2::new(-1.0, -2.0, 2.0, -1.0);
        let s = 0.3;
        let se = delta_se(&j, &Mat2::repeat(s)).unwrap();
        let expect = s / 2f64.sqrt();
        assert!((se.se_re_mu1 - expect).abs() < 1e-15);
        assert_eq!(se.se_re_mu1, se.se_re_mu2);
    }

    #[test]
    fn diagonal_case() {
        let j = Mat2::new(-1.0, 0.0, 0.0, -3.0);
        let se_j = Mat2::new(0.1, 0.0, 0.0, 0.1);
        let se = delta_se(&j, &se_j).unwrap();
        assert!((se.se_re_mu1 - 0.1).abs() < 1e-15);
        assert!((se.se_re_mu2 - 0.1).abs() < 1e-15);
        let (g, disc) = real_part_gradients(&j);
        assert_eq!(disc, 4.0);
        assert_eq!(g[0], [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(g[1], [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_input_uncertainty() {
        let j = Mat2::new(-1.0, 0.4, 0.2, -2.0);
        let se = delta_se(&j, &Mat2::zeros()).unwrap();
        assert_eq!(se.values(), [0.0, 0.0]);
        let a = Mat2::new(0.98, 0.004, 0.002, 0.96);
        let mc = monte_carlo_se(&a, &Mat2::zeros(), 0.02, &McConfig::default()).unwrap();
        assert_eq!(mc.values(), [0.0, 0.0]);
        assert_eq!(mc.n_used, 1000);
    }

    #[test]
    fn negative_se_rejected() {
        let j = Mat2::identity();
        assert!(delta_se(&j, &Mat2::repeat(-0.1)).is_err());
    }

    #[test]
    fn boundary_flag() {
        // tiny positive discriminant: a − d = 1e-8, b = c = 0
        let j = Mat2::new(-1.0, 0.0, 0.0, -1.0 - 1e-8);
        assert!(delta_se(&j, &Mat2::repeat(0.1)).unwrap().near_boundary);
        let j = Mat2::new(-1.0, 0.0, 0.0, -2.0);
        assert!(!delta_se(&j, &Mat2::repeat(0.1)).unwrap().near_boundary);
    }

    #[test]
    fn mc_is_deterministic() {
        let a = Mat2::new(0.98, 0.004, 0.002, 0.96);
        let se = Mat2::repeat(1e-3);
        let cfg = McConfig {
            seed: 11,
            ..McConfig::default()
        };
        let p = monte_carlo_se(&a, &se, 0.02, &cfg).unwrap();
        let q = monte_carlo_se(&a, &se, 0.02, &cfg).unwrap();
        assert_eq!(p, q);
        assert!(p.se_re_mu1 > 0.0);
    }

    #[test]
    fn mc_fails_when_most_draws_inadmissible() {
        let a = Mat2::new(-0.5, 0.0, 0.0, 0.9);
        let err = monte_carlo_se(&a, &Mat2::repeat(1e-3), 0.1, &McConfig::default()).unwrap_err();
        assert!(matches!(err, Error::TooManyDiscards { .. }));
    }

    #[test]
    fn mc_config_validation() {
        let cfg = McConfig {
            n_samples: 10,
            ..McConfig::default()
        };
        assert!(
            matches!(cfg.validate(), Err(Error::InvalidConfig { field, .. }) if field == "mc.n_samples")
        );
    }

    #[test]
    fn delta_scales_linearly() {
        let j = Mat2::new(-1.3, 0.7, 0.2, -2.1);
        let se_j = Mat2::new(0.01, 0.03, 0.02, 0.05);
        let base = delta_se(&j, &se_j).unwrap();
        let scaled = delta_se(&j, &(se_j * 3.5)).unwrap();
        assert!((scaled.se_re_mu1 - 3.5 * base.se_re_mu1).abs() < 1e-14);
        assert!((scaled.se_re_mu2 - 3.5 * base.se_re_mu2).abs() < 1e-14);
    }
}
