//! Reference computations shared by the integration tests. Nothing here
//! calls into the crate's own linear algebra.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Matrix exponential by scaling and squaring with a 30-term Taylor sum.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.abs().row_sum().max();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn expm2(m: &Matrix2<f64>) -> Matrix2<f64> {
    let d = expm(&DMatrix::from_column_slice(2, 2, m.as_slice()));
    Matrix2::from_column_slice(d.as_slice())
}

/// `log(I + B) = B − B²/2 + B³/3 − …`, valid for small `B`.
pub fn log_series(a: &Matrix2<f64>) -> Matrix2<f64> {
    let b = a - Matrix2::identity();
    assert!(b.norm() < 0.5, "series oracle needs ‖A − I‖ < 0.5");
    let mut pow = b;
    let mut sum = Matrix2::zeros();
    for k in 1..200 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += pow * (sign / k as f64);
        pow *= b;
    }
    sum
}

/// Exact one-step transition and noise covariance of
/// `dX = J X dt + dW` (unit noise), by Van Loan's block exponential.
pub fn ou_discretization(j: &Matrix2<f64>, dt: f64) -> (Matrix2<f64>, Matrix2<f64>) {
    let mut c = DMatrix::<f64>::zeros(4, 4);
    for r in 0..2 {
        for s in 0..2 {
            c[(r, s)] = -j[(r, s)] * dt;
            c[(r + 2, s + 2)] = j[(s, r)] * dt;
        }
        c[(r, r + 2)] = dt;
    }
    let e = expm(&c);
    let g12 = Matrix2::new(e[(0, 2)], e[(0, 3)], e[(1, 2)], e[(1, 3)]);
    let g22 = Matrix2::new(e[(2, 2)], e[(2, 3)], e[(3, 2)], e[(3, 3)]);
    let f = g22.transpose();
    let q = f * g12;
    (f, 0.5 * (q + q.transpose()))
}

/// Stationary OU sample path through its exact AR(1) recursion.
pub fn ou_path(j: &Matrix2<f64>, dt: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let (f, q) = ou_discretization(j, dt);
    let l = q.cholesky().expect("covariance is positive definite").l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = nalgebra::Vector2::zeros();
    let (mut xs, mut ys) = (Vec::with_capacity(n), Vec::with_capacity(n));
    // burn-in well past the slowest relaxation time
    for i in 0..n + 2000 {
        let z = nalgebra::Vector2::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        );
        s = f * s + l * z;
        if i >= 2000 {
            xs.push(s[0]);
            ys.push(s[1]);
        }
    }
    (xs, ys)
}

/// Random 2×2 matrix with entries uniform in `[-range, range]` whose
/// eigenvalues have negative real parts.
pub fn random_stable(rng: &mut ChaCha8Rng, range: f64) -> Matrix2<f64> {
    loop {
        let m = Matrix2::from_fn(|_, _| rng.random_range(-range..range));
        let tr = m.trace();
        let det = m.determinant();
        if tr < -0.05 && det > 0.05 {
            return m;
        }
    }
}

/// Eigenvalue real parts via nalgebra's complex eigensolver, descending.
pub fn real_parts_reference(m: &Matrix2<f64>) -> [f64; 2] {
    let ev = m.complex_eigenvalues();
    let (a, b) = (ev[0].re, ev[1].re);
    if a >= b {
        [a, b]
    } else {
        [b, a]
    }
}
