//! Closed-form 2×2 linear algebra: eigenvalues by the quadratic formula and
//! the real principal matrix logarithm.

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type Mat2 = Matrix2<f64>;

/// Eigenvalues of a real 2×2 matrix, ordered so that `Re(mu1) >= Re(mu2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub mu1: Complex64,
    pub mu2: Complex64,
    /// True when the eigenvalues form a conjugate pair with nonzero imaginary part.
    pub is_complex_pair: bool,
}

impl EigenPair {
    /// Builds a pair from two real roots in either order.
    pub fn real(r1: f64, r2: f64) -> Self {
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        EigenPair {
            mu1: Complex64::new(hi, 0.0),
            mu2: Complex64::new(lo, 0.0),
            is_complex_pair: false,
        }
    }

    /// Builds the conjugate pair `re ± i·|im|`, positive imaginary part first.
    pub fn complex(re: f64, im: f64) -> Self {
        let im = im.abs();
        EigenPair {
            mu1: Complex64::new(re, im),
            mu2: Complex64::new(re, -im),
            is_complex_pair: true,
        }
    }

    pub fn re(&self) -> [f64; 2] {
        [self.mu1.re, self.mu2.re]
    }
}

/// `(a − d)² + 4bc`, equal to `tr² − 4·det` without the cancellation of
/// forming `tr²` when the matrix is close to a multiple of the identity.
pub fn discriminant(m: &Mat2) -> f64 {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    (a - d) * (a - d) + 4.0 * b * c
}

/// Roots of `mu² − tr·mu + det = 0`.
pub fn eigen_pair(m: &Mat2) -> EigenPair {
    let tr = m.trace();
    let det = m.determinant();
    let disc = discriminant(m);
    if disc < 0.0 {
        return EigenPair::complex(0.5 * tr, 0.5 * (-disc).sqrt());
    }
    let s = disc.sqrt();
    // q carries the larger-magnitude root; det/q avoids cancellation for the other.
    let q = 0.5 * (tr + tr.signum() * s);
    if q == 0.0 {
        return EigenPair::real(0.0, 0.0);
    }
    EigenPair::real(q, det / q)
}

/// Real principal logarithm, or `None` when it does not exist (an eigenvalue
/// on the closed negative real axis, or a zero eigenvalue).
///
/// Every 2×2 logarithm here has the form `alpha·I + beta·A`:
/// - conjugate pair `p ± i·s`, modulus `r`, argument `θ ∈ (0, π)`:
///   `ln A = ln(r)·I + (θ/s)·(A − p·I)`
/// - distinct positive reals `l1 > l2`:
///   `beta = (ln l1 − ln l2)/(l1 − l2)`, `alpha = ln l1 − beta·l1`
/// - repeated positive `l`: `ln A = ln(l)·I + (A − l·I)/l`
pub fn principal_log(m: &Mat2) -> Option<Mat2> {
    let tr = m.trace();
    let det = m.determinant();
    let disc = discriminant(m);
    let p = 0.5 * tr;
    let (alpha, beta) = if disc < 0.0 {
        let s = 0.5 * (-disc).sqrt();
        let r = det.sqrt();
        let theta = s.atan2(p);
        let beta = theta / s;
        (r.ln() - beta * p, beta)
    } else if disc > 0.0 {
        let eig = eigen_pair(m);
        let (l1, l2) = (eig.mu1.re, eig.mu2.re);
        if l2 <= 0.0 {
            return None;
        }
        let gap = l1 - l2;
        let beta = (gap / l2).ln_1p() / gap;
        (l1.ln() - beta * l1, beta)
    } else {
        if p <= 0.0 {
            return None;
        }
        let beta = 1.0 / p;
        (p.ln() - 1.0, beta)
    };
    if !alpha.is_finite() || !beta.is_finite() {
        return None;
    }
    Some(Mat2::identity() * alpha + m * beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_classification() {
        let e = eigen_pair(&Mat2::new(-3.0, 0.0, 0.0, -1.0));
        assert_eq!(e.re(), [-1.0, -3.0]);
        assert!(!e.is_complex_pair);

        let e = eigen_pair(&Mat2::new(-1.0, 0.3, -0.3, -1.0));
        assert!(e.is_complex_pair);
        assert_eq!(e.mu2, e.mu1.conj());
        assert!((e.mu1.im - 0.3).abs() < 1e-15);
    }

    #[test]
    fn widely_separated_roots_keep_precision() {
        // trace −128, det 100: roots differ by two orders of magnitude
        let m = Mat2::new(-128.0, 100.0, -1.0, 0.0);
        let e = eigen_pair(&m);
        let (l1, l2) = (e.mu1.re, e.mu2.re);
        assert!((l1 * l2 - 100.0).abs() < 1e-11);
        assert!((l1 + l2 + 128.0).abs() < 1e-11);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = principal_log(&Mat2::identity()).unwrap();
        assert!(l.norm() < 1e-15);
    }

    #[test]
    fn log_of_rotation() {
        let th = 0.7_f64;
        let r = 0.9_f64;
        let m = Mat2::new(r * th.cos(), -r * th.sin(), r * th.sin(), r * th.cos());
        let l = principal_log(&m).unwrap();
        let expect = Mat2::new(r.ln(), -th, th, r.ln());
        assert!((l - expect).norm() < 1e-14);
    }

    #[test]
    fn log_of_diagonal_and_jordan() {
        let l = principal_log(&Mat2::new(2.0, 0.0, 0.0, 0.5)).unwrap();
        assert!((l - Mat2::new(2f64.ln(), 0.0, 0.0, 0.5f64.ln())).norm() < 1e-15);

        // exp([[a, 1], [0, a]]) = e^a [[1, 1], [0, 1]]
        let a = -0.2_f64;
        let m = Mat2::new(a.exp(), a.exp(), 0.0, a.exp());
        let l = principal_log(&m).unwrap();
        assert!((l - Mat2::new(a, 1.0, 0.0, a)).norm() < 1e-14);
    }

    #[test]
    fn negative_real_eigenvalue_is_inadmissible() {
        assert!(principal_log(&Mat2::new(-0.5, 0.0, 0.0, 0.9)).is_none());
        assert!(principal_log(&Mat2::new(-1.0, 0.0, 0.0, -1.0)).is_none());
        assert!(principal_log(&Mat2::new(0.0, 0.0, 0.0, 1.0)).is_none());
    }
}
