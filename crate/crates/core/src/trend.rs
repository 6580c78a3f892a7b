//! Trend statistics on indicator series.

use crate::error::{Error, Result};

/// Kendall's tau-b rank correlation. Returns 0 when either series is constant.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "kendall_tau needs paired series");
    let n = xs.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = xs[j] - xs[i];
            let dy = ys[j] - ys[i];
            match (dx == 0.0, dy == 0.0) {
                (true, true) => {}
                (true, false) => ties_x += 1,
                (false, true) => ties_y += 1,
                (false, false) => {
                    if (dx > 0.0) == (dy > 0.0) {
                        concordant += 1;
                    } else {
                        discordant += 1;
                    }
                }
            }
        }
    }
    let denom = (((concordant + discordant + ties_x) as f64)
        * ((concordant + discordant + ties_y) as f64))
        .sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (concordant - discordant) as f64 / denom
    }
}

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub se_slope: f64,
    pub n: usize,
}

impl LineFit {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::InvalidArgument(
            "fit_line needs paired series".into(),
        ));
    }
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        se_slope: (rss / (nf - 2.0) / sxx).sqrt(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_extremes() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let up: Vec<f64> = x.iter().map(|v| v * v).collect();
        let down: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(kendall_tau(&x, &up), 1.0);
        assert_eq!(kendall_tau(&x, &down), -1.0);
        assert_eq!(kendall_tau(&x, &[1.0; 20]), 0.0);
    }

    #[test]
    fn tau_small_case() {
        // pairs: (1,2)C (1,3)C (2,3)D → (2 − 1)/3
        let t = kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]);
        assert!((t - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..30).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|t| -1.0 + 0.01 * t).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 0.01).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-13);
        assert!(f.se_slope < 1e-12);
    }
}
