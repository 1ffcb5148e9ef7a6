use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twophase::besov::{eps_threshold, lr_sum, trapezoid, BesovSpec, BlockTimeSeries, Chi, LpFamily, Part, TimeExp};
use twophase::spectral::{Grid, SpectralField, C64};
use twophase::Error;

fn grid(d: usize, n: usize) -> Arc<Grid> {
    Grid::new(d, n, 2.0 * PI).unwrap()
}

/// `cos(k·x)` on a `2π` torus, so `|ξ| = |k|`; set coefficient-wise so
/// that no other mode picks up transform roundoff.
fn cosine(g: &Arc<Grid>, k: [i32; 2]) -> SpectralField {
    let mut f = SpectralField::scalar_zeros(g);
    f.comp_mut(0)[g.index_of([k[0], k[1], 0])] += C64::new(0.5, 0.0);
    f.comp_mut(0)[g.index_of([-k[0], -k[1], 0])] += C64::new(0.5, 0.0);
    f
}

/// Band-limited zero-mean noise with `|k_i| <= kmax`.
fn band_noise(g: &Arc<Grid>, kmax: i32, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![C64::new(0.0, 0.0); g.len()];
    for (idx, z) in data.iter_mut().enumerate() {
        let k = g.k(idx);
        if idx != 0 && k.iter().all(|ki| ki.abs() <= kmax) {
            *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut f = SpectralField::from_coeffs(g, 1, data).unwrap();
    f.enforce_hermitian();
    f
}

#[test]
fn chi_profile() {
    let chi = Chi::new();
    assert_eq!(chi.eval(0.0), 1.0);
    assert_eq!(chi.eval(0.75), 1.0);
    assert_eq!(chi.eval(4.0 / 3.0), 0.0);
    assert_eq!(chi.eval(5.0), 0.0);
    let mut last = 1.0;
    for i in 0..=2000 {
        let r = 0.7 + 0.7 * i as f64 / 2000.0;
        let v = chi.eval(r);
        assert!(v <= last + 1e-15 && (0.0..=1.0).contains(&v));
        last = v;
    }
    for r in [0.5, 0.74, 2.67, 3.0] {
        assert_eq!(chi.phi(r), 0.0, "phi({r})");
    }
    assert!(chi.phi(1.0) > 0.0 && chi.phi(2.6) > 0.0);
}

#[test]
fn partition_of_unity() {
    for g in [grid(2, 64), Grid::new(2, 128, 32.0 * PI).unwrap(), grid(3, 32)] {
        let fam = LpFamily::new(&g);
        assert!(fam.partition_residual() < 1e-10);
        for i in 1..500 {
            let r = g.dxi() * (1.0 + (g.max_xi() / g.dxi() - 1.0) * i as f64 / 500.0);
            assert!(fam.partition_residual_at(r) < 1e-10, "r = {r}");
        }
    }
}

#[test]
fn single_block_mode() {
    let g = grid(2, 64);
    let fam = LpFamily::new(&g);
    let f = cosine(&g, [0, 6]);
    // 6 = 1.5 · 2^2, strictly inside the single-block window
    for j in fam.js() {
        let b = fam.dyadic_block(&f, j);
        if j == 2 {
            assert!(b.max_abs_diff(&f) < 1e-15);
        } else {
            assert_eq!(b.l2_norm(), 0.0);
        }
    }
    let l2 = f.l2_norm();
    assert!((l2 - (2.0 * PI * PI).sqrt()).abs() < 1e-12);
    for s in [-1.0, 0.0, 0.5, 2.0] {
        let n = fam.besov_norm(&f, &BesovSpec::new(s, 2.0, 1.0)).unwrap();
        assert!((n - 4f64.powf(s) * l2).abs() < 1e-12 * n);
        let w = fam.besov_weak_norm(&f, s);
        assert!((w - n).abs() < 1e-12 * n);
    }
}

#[test]
fn two_block_mode_sums_to_l2() {
    let g = grid(2, 32);
    let fam = LpFamily::new(&g);
    let f = cosine(&g, [4, 0]);
    let n = fam.besov_norm(&f, &BesovSpec::new(0.0, 2.0, 1.0)).unwrap();
    assert!((n - f.l2_norm()).abs() < 1e-12 * n);
    let blocks = fam.block_norms(&f, 2.0).unwrap();
    assert_eq!(blocks.iter().filter(|&&b| b > 0.0).count(), 2);
}

#[test]
fn lp_block_norms_of_a_cosine() {
    let g = grid(2, 32);
    let fam = LpFamily::new(&g);
    let f = cosine(&g, [0, 3]);
    let vol = g.volume();
    // rectangle rule on the grid for p = 1, closed forms otherwise
    let l1 = g.cell_volume() * (0..g.len()).map(|i| (3.0 * g.x(i)[1]).cos().abs()).sum::<f64>();
    let exact = [(1.0, l1), (2.0, (vol / 2.0).sqrt()), (4.0, (vol * 3.0 / 8.0).powf(0.25)), (f64::INFINITY, 1.0)];
    for (p, want) in exact {
        let n = fam.besov_norm(&f, &BesovSpec::new(0.0, p, 1.0)).unwrap();
        assert!((n - want).abs() < 1e-10 * want, "p = {p}: {n} vs {want}");
    }
    assert!(matches!(fam.block_norms(&f, 3.0), Err(Error::UnsupportedP(_))));
    assert!(matches!(fam.besov_norm(&f, &BesovSpec::new(0.0, 0.5, 1.0)), Err(Error::UnsupportedP(_))));
}

#[test]
fn blocks_reassemble_the_field() {
    let g = grid(2, 32);
    let fam = LpFamily::new(&g);
    let f = band_noise(&g, 16, 1);
    let mut sum = SpectralField::scalar_zeros(&g);
    for j in fam.js() {
        let b = fam.dyadic_block(&f, j);
        for idx in 0..g.len() {
            if b.comp(0)[idx].norm() > 0.0 {
                let r = g.xi_norm(idx) / 2f64.powi(j);
                assert!((0.75..=8.0 / 3.0).contains(&r), "j = {j}, r = {r}");
            }
        }
        sum = sum.add(&b);
    }
    assert!(sum.max_abs_diff(&f) < 1e-10);
}

#[test]
fn b122_is_equivalent_to_h1() {
    let g = grid(2, 64);
    let fam = LpFamily::new(&g);
    for seed in 0..10 {
        let f = band_noise(&g, 20, seed);
        let h1 = (g.volume() * (0..g.len()).map(|i| g.xi_norm(i).powi(2) * f.comp(0)[i].norm_sqr()).sum::<f64>()).sqrt();
        let b = fam.besov_norm(&f, &BesovSpec::new(1.0, 2.0, 2.0)).unwrap();
        let ratio = b / h1;
        assert!((0.5..=2.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn low_and_high_parts() {
    let g = Grid::new(2, 64, 16.0 * PI).unwrap();
    let fam = LpFamily::new(&g);
    // |ξ| = 1/8 on a 16π torus
    let low = cosine(&g, [1, 0]);
    let (l, h) = fam.split_low_high(&low, 0.5, 2.0, 1.0, 0).unwrap();
    assert!(l > 0.0);
    assert_eq!(h, 0.0);

    let f = band_noise(&g, 24, 3);
    let plain = fam.besov_norm(&f, &BesovSpec::new(0.3, 2.0, 1.0)).unwrap();
    let blocks = fam.block_norms(&f, 2.0).unwrap();
    let overlap: f64 = fam.js().zip(&blocks).filter(|(j, _)| *j == -1 || *j == 0).map(|(j, b)| 2f64.powf(0.3 * j as f64) * b).sum();
    let (l, h) = fam.split_low_high(&f, 0.3, 2.0, 1.0, 0).unwrap();
    assert!(l + h >= plain - 1e-12 * plain);
    assert!(l + h <= plain + overlap + 1e-12 * plain);
    let hyb = fam.hybrid_norm(&f, 0.3, 0.3, 2.0, 1.0, 0).unwrap();
    assert!((hyb - (l + h)).abs() < 1e-12 * hyb);
}

#[test]
fn eps_threshold_split() {
    assert_eq!(eps_threshold(1.0 / 8.0), 3);
    assert_eq!(eps_threshold(0.1), 3);
    assert_eq!(eps_threshold(0.4), 1);
    let g = grid(2, 32);
    let fam = LpFamily::new(&g);
    let f = cosine(&g, [4, 0]);
    let j0 = eps_threshold(1.0 / 8.0);
    let (l, h) = fam.split_low_high(&f, 0.0, 2.0, 1.0, j0).unwrap();
    let full = fam.besov_norm(&f, &BesovSpec::new(0.0, 2.0, 1.0)).unwrap();
    assert!((l - full).abs() < 1e-14 * full);
    let only_high = fam.besov_norm(&f, &BesovSpec::new(0.0, 2.0, 1.0).with_part(Part::High(j0 + 2))).unwrap();
    assert_eq!(only_high, 0.0);
    assert!(h <= l);
}

#[test]
fn weak_norm_of_a_prescribed_profile() {
    let g = grid(2, 128);
    let fam = LpFamily::new(&g);
    let s = 0.7;
    // one single-block mode per j with ‖Δ_j f‖ = 2^{-js}
    let mut f = SpectralField::scalar_zeros(&g);
    for j in 1..6 {
        let m = cosine(&g, [3 << j >> 1, 0]);
        f = f.add(&m.scaled(2f64.powf(-j as f64 * s) / m.l2_norm()));
    }
    assert!((fam.besov_weak_norm(&f, s) - 1.0).abs() < 1e-12);
    let strong = fam.besov_norm(&f, &BesovSpec::new(s, 2.0, 1.0)).unwrap();
    assert!((strong - 5.0).abs() < 1e-11);
}

#[test]
fn lr_sums() {
    let v = [3.0, 4.0];
    assert_eq!(lr_sum(v.iter().copied(), 1.0), 7.0);
    assert!((lr_sum(v.iter().copied(), 2.0) - 5.0).abs() < 1e-15);
    assert_eq!(lr_sum(v.iter().copied(), f64::INFINITY), 4.0);
}

#[test]
fn dyadic_scaling() {
    let g = grid(2, 64);
    let f = band_noise(&g, 6, 5);
    for m in [1, 2] {
        let lam = 2f64.powi(m);
        let gs = Grid::new(2, 64, 2.0 * PI / lam).unwrap();
        let fl = f.with_grid(&gs).unwrap();
        for s in [-0.5, 0.0, 1.0, 1.5] {
            let a = LpFamily::new(&g).besov_norm(&f, &BesovSpec::new(s, 2.0, 1.0)).unwrap();
            let b = LpFamily::new(&gs).besov_norm(&fl, &BesovSpec::new(s, 2.0, 1.0)).unwrap();
            let want = lam.powf(s - 1.0) * a;
            assert!((b - want).abs() < 1e-8 * want, "m = {m}, s = {s}");
        }
    }
}

fn series_of(fam: &LpFamily, g: &SpectralField, profile: impl Fn(f64) -> f64, times: &[f64]) -> BlockTimeSeries {
    let base = fam.block_norms(g, 2.0).unwrap();
    let mut s = BlockTimeSeries::new(fam, 2.0);
    for &t in times {
        s.push(t, base.iter().map(|b| b * profile(t)).collect());
    }
    s
}

#[test]
fn chemin_lerner_closed_forms() {
    let grd = grid(2, 32);
    let fam = LpFamily::new(&grd);
    let g = band_noise(&grd, 10, 7);
    let spec = BesovSpec::new(0.5, 2.0, 1.0);
    let gn = fam.besov_norm(&g, &spec).unwrap();

    let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 1e-3).collect();
    let constant = series_of(&fam, &g, |_| 1.0, &times);
    let inf = constant.chemin_lerner_norm(TimeExp::Inf, 0.5, 1.0, Part::Full).unwrap();
    assert!((inf - gn).abs() < 1e-12 * gn);

    let decaying = series_of(&fam, &g, |t| (-t).exp(), &times);
    let one = decaying.chemin_lerner_norm(TimeExp::One, 0.5, 1.0, Part::Full).unwrap();
    let exact = gn * (1.0 - (-4.0f64).exp());
    assert!((one - exact).abs() < 1e-3 * exact);
    let outer = decaying.lebesgue_time_norm(TimeExp::One, 0.5, 1.0, Part::Full).unwrap();
    assert!((one - outer).abs() < 1e-12 * one);
    let two = decaying.chemin_lerner_norm(TimeExp::Two, 0.5, 1.0, Part::Full).unwrap();
    let exact2 = gn * ((1.0 - (-8.0f64).exp()) / 2.0).sqrt();
    assert!((two - exact2).abs() < 1e-3 * exact2);
    let outer2 = decaying.lebesgue_time_norm(TimeExp::Two, 0.5, 1.0, Part::Full).unwrap();
    assert!(two >= outer2 * (1.0 - 1e-12));
}

#[test]
fn series_errors_and_windows() {
    let grd = grid(2, 16);
    let fam = LpFamily::new(&grd);
    let g = band_noise(&grd, 4, 8);
    let one = series_of(&fam, &g, |_| 1.0, &[0.0]);
    assert!(matches!(
        one.chemin_lerner_norm(TimeExp::One, 0.0, 1.0, Part::Full),
        Err(Error::InsufficientSamples { needed: 2, got: 1 })
    ));
    assert!(one.chemin_lerner_norm(TimeExp::Inf, 0.0, 1.0, Part::Full).is_ok());
    let s = series_of(&fam, &g, |t| 1.0 + t, &[0.0, 1.0, 2.0, 3.0]);
    let w = s.window(1.0, 2.0);
    assert_eq!(w.times, vec![1.0, 2.0]);
    assert_eq!(trapezoid(&[0.0, 1.0, 3.0], &[1.0, 1.0, 2.0]), 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weak_norm_is_dominated(seed in 0u64..10_000, s in -1.0f64..2.0) {
        let g = grid(2, 32);
        let fam = LpFamily::new(&g);
        let f = band_noise(&g, 12, seed);
        let weak = fam.besov_weak_norm(&f, s);
        let strong = fam.besov_norm(&f, &BesovSpec::new(s, 2.0, 1.0)).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }

    #[test]
    fn interpolation_inequality(seed in 0u64..10_000, theta in 0.05f64..0.95, s1 in -1.0f64..0.5, gap in 0.2f64..2.0) {
        let g = grid(2, 32);
        let fam = LpFamily::new(&g);
        let f = band_noise(&g, 12, seed);
        let s2 = s1 + gap;
        let mid = theta * s1 + (1.0 - theta) * s2;
        let lhs = fam.besov_norm(&f, &BesovSpec::new(mid, 2.0, 1.0)).unwrap();
        let c = 10.0 / (theta * (1.0 - theta) * (s2 - s1));
        let rhs = c * fam.besov_weak_norm(&f, s1).powf(theta) * fam.besov_weak_norm(&f, s2).powf(1.0 - theta);
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(seed in 0u64..10_000, c in -3.0f64..3.0, p_idx in 0usize..4) {
        let g = grid(2, 16);
        let fam = LpFamily::new(&g);
        let p = [1.0, 2.0, 4.0, f64::INFINITY][p_idx];
        let f = band_noise(&g, 5, seed);
        let h = band_noise(&g, 5, seed + 1);
        let spec = BesovSpec::new(0.5, p, 1.0);
        let nf = fam.besov_norm(&f, &spec).unwrap();
        let nh = fam.besov_norm(&h, &spec).unwrap();
        let ncf = fam.besov_norm(&f.scaled(c), &spec).unwrap();
        prop_assert!((ncf - c.abs() * nf).abs() <= 1e-10 * nf);
        prop_assert!(fam.besov_norm(&f.add(&h), &spec).unwrap() <= (nf + nh) * (1.0 + 1e-10));
    }
}
