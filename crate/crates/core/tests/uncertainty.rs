mod common;

use nalgebra::Matrix2;
use proptest::prelude::*;

use tipscan::{delta_se, monte_carlo_se, McConfig};

fn mc(n_samples: usize, seed: u64) -> McConfig {
    McConfig {
        n_samples,
        seed,
        max_discard_fraction: 0.5,
    }
}

#[test]
fn diagonal_case_matches_monte_carlo() {
    let j = Matrix2::new(-1.0, 0.0, 0.0, -3.0);
    let se_j = Matrix2::new(0.1, 0.0, 0.0, 0.1);
    let delta = delta_se(&j, &se_j).unwrap();
    assert!((delta.se_re_mu1 - 0.1).abs() < 1e-15 && (delta.se_re_mu2 - 0.1).abs() < 1e-15);

    // a short step keeps the logarithm nearly linear in the perturbation
    let dt = 1e-3;
    let a = common::expm2(&(j * dt));
    let monte = monte_carlo_se(&a, &(se_j * dt), dt, &mc(1_000_000, 5)).unwrap();
    assert_eq!(monte.discard_count, 0);
    assert!((monte.se_re_mu1 - 0.1).abs() < 0.002, "{monte:?}");
    assert!((monte.se_re_mu2 - 0.1).abs() < 0.002, "{monte:?}");
}

#[test]
fn monte_carlo_agrees_with_delta_on_reference_case() {
    let dt = 0.02;
    let j = Matrix2::new(-1.0, 0.0, 0.0, -3.0);
    let a = common::expm2(&(j * dt));
    let se_a = Matrix2::repeat(1e-4);
    let delta = delta_se(&j, &(se_a / dt)).unwrap().values();
    let monte = monte_carlo_se(&a, &se_a, dt, &mc(100_000, 6))
        .unwrap()
        .values();
    for k in 0..2 {
        assert!(
            (monte[k] - delta[k]).abs() <= 0.1 * delta[k],
            "{monte:?} vs {delta:?}"
        );
    }
}

#[test]
fn relabeling_the_center_does_not_change_output() {
    let dt = 0.02;
    let a = common::expm2(&(Matrix2::new(-0.5, 0.2, 0.1, -4.0) * dt));
    let se = Matrix2::new(1e-4, 2e-4, 3e-4, 4e-4);
    let p = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    let cfg = mc(100_000, 7);
    let direct = monte_carlo_se(&a, &se, dt, &cfg).unwrap();
    let swapped = monte_carlo_se(&(p * a * p), &(p * se * p), dt, &cfg).unwrap();
    for (u, v) in direct.values().iter().zip(swapped.values()) {
        assert!((u - v).abs() < 0.02 * u, "{direct:?} vs {swapped:?}");
    }
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let dt = 0.02;
    let a = common::expm2(&(Matrix2::new(-1.0, 0.5, -0.5, -1.0) * dt));
    let se = Matrix2::repeat(2e-4);
    let cfg = mc(20_000, 8);
    let parallel = monte_carlo_se(&a, &se, dt, &cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let single = pool.install(|| monte_carlo_se(&a, &se, dt, &cfg).unwrap());
    assert_eq!(parallel, single);
}

proptest! {
    #[test]
    fn delta_se_is_linear_in_input_errors(
        entries in prop::array::uniform4(-3.0f64..3.0),
        errs in prop::array::uniform4(0.0f64..0.5),
        s in 0.01f64..100.0,
    ) {
        let j = Matrix2::new(entries[0], entries[1], entries[2], entries[3]);
        let se = Matrix2::new(errs[0], errs[1], errs[2], errs[3]);
        let base = delta_se(&j, &se).unwrap().values();
        let scaled = delta_se(&j, &(se * s)).unwrap().values();
        for k in 0..2 {
            prop_assert!((scaled[k] - s * base[k]).abs() <= 1e-12 * (1.0 + s * base[k]));
        }
    }
}
