use nalgebra::{Matrix2, Matrix3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twophase::linear::{
    compressible_symbol, eigenvalues, eigenvalues_with, expm::matmul, incompressible_symbol, propagator,
    propagator_expm, propagator_with, relative_velocity_kernel, Branch, LinearCoeffs,
};

fn oracle(xi: f64, k: &LinearCoeffs, t: f64) -> (Matrix3<f64>, Matrix2<f64>) {
    let a = compressible_symbol(xi, k);
    let b = incompressible_symbol(xi, k);
    let ma = Matrix3::from_fn(|i, j| a[i][j] * t);
    let mb = Matrix2::from_fn(|i, j| b[i][j] * t);
    (ma.exp(), mb.exp())
}

#[test]
fn paper_symbol_at_unit_viscosity() {
    let k = LinearCoeffs::new(0.25, 1.0, -1.0);
    let a = compressible_symbol(3.0, &k);
    assert_eq!(a, [[-4.0, 0.0, 4.0], [0.0, 0.0, -3.0], [0.0, 3.0, -9.0]]);
    let b = incompressible_symbol(3.0, &k);
    assert_eq!(b, [[-4.0, 4.0], [0.0, -9.0]]);
}

#[test]
fn degenerate_frequency_two() {
    let e = eigenvalues(2.0, 0.3, 1.0, -1.0);
    assert!(e.degenerate);
    assert!((e.lambda2.re + 2.0).abs() < 1e-12 && (e.lambda3.re + 2.0).abs() < 1e-12);
    assert!(e.lambda2.im.abs() < 1e-12);
}

#[test]
fn complex_pair_at_unit_frequency() {
    let e = eigenvalues(1.0, 0.1, 1.0, -1.0);
    assert!(e.complex_pair);
    assert!((e.lambda1.re + 10.0).abs() < 1e-12);
    assert!((e.lambda2.re + 0.5).abs() < 1e-12);
    assert!((e.lambda2.im.abs() - 0.866_025_403_784_438_6).abs() < 1e-12);
    let m = Matrix3::from_fn(|i, j| compressible_symbol(1.0, &LinearCoeffs::new(0.1, 1.0, -1.0))[i][j]);
    let mut ev: Vec<_> = m.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    assert!((ev[0].re + 10.0).abs() < 1e-12);
}

#[test]
fn real_pair_at_frequency_four() {
    let e = eigenvalues(4.0, 0.1, 1.0, -1.0);
    assert!(!e.complex_pair);
    assert!((e.lambda2.re - (-8.0 + 4.0 * 3f64.sqrt())).abs() < 1e-12);
    assert!((e.lambda3.re - (-8.0 - 4.0 * 3f64.sqrt())).abs() < 1e-12);
    assert!(((e.lambda2 * e.lambda3).re - 16.0).abs() < 1e-12);
}

#[test]
fn identity_at_time_zero() {
    let p = propagator(1.3, 0.1, 1.0, 0.5, 0.0);
    assert_eq!(p.a, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    assert_eq!(p.b, [[1.0, 0.0], [0.0, 1.0]]);
}

#[test]
fn matches_matrix_exponential_at_reference_point() {
    let k = LinearCoeffs::new(0.1, 1.0, -1.0);
    let p = propagator_with(1.0, &k, 1.0);
    assert_eq!(p.branch_a, Branch::ClosedForm);
    let (ea, eb) = oracle(1.0, &k, 1.0);
    for i in 0..3 {
        for j in 0..3 {
            assert!((p.a[i][j] - ea[(i, j)]).abs() < 1e-10, "A[{i}][{j}]");
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            assert!((p.b[i][j] - eb[(i, j)]).abs() < 1e-10, "B[{i}][{j}]");
        }
    }
}

#[test]
fn degenerate_fallback_matches_neighbouring_closed_form() {
    let k = LinearCoeffs::new(0.2, 1.0, -1.0);
    let p = propagator_with(2.0, &k, 0.7);
    assert_eq!(p.branch_a, Branch::Fallback);
    let lo = propagator_with(2.0 - 1e-4, &k, 0.7);
    let hi = propagator_with(2.0 + 1e-4, &k, 0.7);
    assert_eq!(lo.branch_a, Branch::ClosedForm);
    for i in 0..3 {
        for j in 0..3 {
            let lim = 0.5 * (lo.a[i][j] + hi.a[i][j]);
            assert!((p.a[i][j] - lim).abs() < 1e-5);
        }
    }
}

#[test]
fn resonant_drag_uses_fallback() {
    // 1 + τλ5 = 0 when μ|ξ|² = 1/τ
    let k = LinearCoeffs::new(0.25, 1.0, 0.0);
    let p = propagator_with(2.0, &k, 0.5);
    assert_eq!(p.branch_b, Branch::Fallback);
    let (_, eb) = oracle(2.0, &k, 0.5);
    assert!((p.b[0][1] - eb[(0, 1)]).abs() < 1e-12);
}

#[test]
fn random_samples_against_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let xi = rng.gen_range(0.0..10.0);
        let tau = rng.gen_range(0.01..1.0);
        let mu = rng.gen_range(0.1..2.0);
        let lam = rng.gen_range(-1.9 * mu..2.0);
        let t = rng.gen_range(0.0..5.0);
        let k = LinearCoeffs::new(tau, mu, lam);
        let p = propagator_with(xi, &k, t);
        let (ea, eb) = oracle(xi, &k, t);
        for i in 0..3 {
            for j in 0..3 {
                assert!((p.a[i][j] - ea[(i, j)]).abs() < 1e-10, "xi={xi} tau={tau} t={t}");
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.b[i][j] - eb[(i, j)]).abs() < 1e-10);
            }
        }
        let f = propagator_expm(xi, &k, t);
        for i in 0..3 {
            for j in 0..3 {
                assert!((f.a[i][j] - ea[(i, j)]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn kernel_is_row_difference() {
    let p = propagator(0.7, 0.1, 1.0, 0.0, 2.0);
    let kr = relative_velocity_kernel(0.7, 0.1, 1.0, 0.0, 2.0);
    for j in 0..3 {
        assert_eq!(kr.compressible[j], p.a[0][j] - p.a[2][j]);
    }
    let k0 = relative_velocity_kernel(0.7, 0.1, 1.0, 0.0, 0.0);
    assert_eq!(k0.compressible, [1.0, 0.0, -1.0]);
    assert_eq!(k0.incompressible, [1.0, -1.0]);
}

#[test]
fn exponential_layer_dominated_by_power() {
    for &tau in &[0.2, 0.1, 0.05, 0.01] {
        for i in 0..50 {
            let t = 1.0 + i as f64;
            assert!((-t / tau).exp() <= tau * tau / (t * t));
        }
    }
}

proptest! {
    #[test]
    fn semigroup(xi in 0.0f64..8.0, tau in 0.01f64..1.0, mu in 0.1f64..2.0, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let k = LinearCoeffs::new(tau, mu, 0.0);
        let p1 = propagator_with(xi, &k, t1);
        let p2 = propagator_with(xi, &k, t2);
        let p12 = propagator_with(xi, &k, t1 + t2);
        let a = matmul(&p1.a, &p2.a);
        let b = matmul(&p1.b, &p2.b);
        for i in 0..3 { for j in 0..3 { prop_assert!((a[i][j] - p12.a[i][j]).abs() < 1e-10); } }
        for i in 0..2 { for j in 0..2 { prop_assert!((b[i][j] - p12.b[i][j]).abs() < 1e-10); } }
    }

    #[test]
    fn eigen_vieta_and_stability(xi in 0.0f64..20.0, tau in 0.01f64..1.0, mu in 0.05f64..3.0, lr in -0.95f64..2.0) {
        let lam = lr * 2.0 * mu;
        let e = eigenvalues(xi, tau, mu, lam);
        let nu = 2.0 * mu + lam;
        let prod = e.lambda2 * e.lambda3;
        let sum = e.lambda2 + e.lambda3;
        prop_assert!((prod.re - xi * xi).abs() <= 1e-9 * (1.0 + xi * xi * xi * xi));
        prop_assert!((sum.re + nu * xi * xi).abs() <= 1e-9 * (1.0 + xi * xi));
        prop_assert!(e.max_real() <= 1e-12);
        prop_assert_eq!(e.lambda1, e.lambda4);
        prop_assert!((e.lambda5.re + mu * xi * xi).abs() < 1e-12);
    }

    #[test]
    fn low_frequency_spectral_gap(xi in 0.01f64..2.0, tau in 0.01f64..0.25) {
        let k = LinearCoeffs::new(tau, 1.0, -1.0);
        let e = eigenvalues_with(xi, &k);
        prop_assert!(e.max_real() <= -0.05 * xi.min(1.0).powi(2));
    }
}
