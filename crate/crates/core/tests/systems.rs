use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twophase::experiments::data::{gaussian, random_smooth, random_solenoidal};
use twophase::integrator::ModeTable;
use twophase::linear::{compressible_symbol, incompressible_symbol};
use twophase::spectral::{grad, laplacian, leray_project, Grid, PhysParams, SpectralField};
use twophase::systems::{
    asymptotic_profile, df_momentum_residual, effective_mixed_velocity, momentum_rate, pressure_terms,
    relative_velocity_residual, DfState, EulerNsState, System, SystemKind, TnsState,
};
use twophase::Error;

fn grid(d: usize, n: usize) -> Arc<Grid> {
    Grid::new(d, n, 2.0 * std::f64::consts::PI).unwrap()
}

fn params() -> PhysParams {
    PhysParams { tau: 0.1, eps: 1.0, mu: 1.0, lam: 0.5, gamma: 3.0 }
}

fn random_state(g: &Arc<Grid>, kind: SystemKind, amp: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = g.dim();
    let mut rho = gaussian(g, [3.0, 3.0, 3.0], 1.0, amp).add(&random_smooth(g, 1, 3.0, 0.2 * amp, &mut rng));
    rho.comp_mut(0)[0] += 0.3 * amp;
    match kind {
        SystemKind::EulerNs | SystemKind::EulerNsScaled => EulerNsState {
            rho,
            u: random_smooth(g, d, 3.0, amp, &mut rng),
            a: random_smooth(g, 1, 3.0, amp, &mut rng),
            v: random_smooth(g, d, 3.0, amp, &mut rng),
        }
        .pack()
        .unwrap(),
        SystemKind::Df | SystemKind::DfScaled => DfState {
            rho,
            a: random_smooth(g, 1, 3.0, amp, &mut rng),
            v: random_smooth(g, d, 3.0, amp, &mut rng),
        }
        .pack()
        .unwrap(),
        SystemKind::Tns => TnsState { varrho: rho, w: random_solenoidal(g, 3.0, amp, &mut rng) }.pack().unwrap(),
    }
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).l2_norm() / a.l2_norm().max(b.l2_norm()).max(1e-300)
}

#[test]
fn pressure_term_closed_forms() {
    let g = grid(2, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_smooth(&g, 1, 2.0, 0.3, &mut rng);
    let (g3, f3) = pressure_terms(&a, 3.0).unwrap();
    assert!(g3.add(&a).l2_norm() < 1e-12);
    let (g2, _) = pressure_terms(&a, 2.0).unwrap();
    assert!(g2.l2_norm() < 1e-14);
    let zero = SpectralField::scalar_zeros(&g);
    let (g0, f0) = pressure_terms(&zero, 1.4).unwrap();
    assert_eq!(g0.l2_norm(), 0.0);
    assert_eq!(f0.l2_norm(), 0.0);
    assert!(f3.l2_norm() > 0.0);
    let vac = SpectralField::from_fn(&g, 1, |_, x| -0.95 * x[0].cos());
    assert!(matches!(pressure_terms(&vac, 3.0), Err(Error::VacuumGas(_))));
}

#[test]
fn equilibria_have_zero_derivative() {
    for kind in [SystemKind::EulerNs, SystemKind::Df, SystemKind::Tns, SystemKind::DfScaled, SystemKind::EulerNsScaled] {
        let g = grid(2, 16);
        let sys = System::new(kind, &g, PhysParams { eps: 0.3, ..params() }).unwrap();
        let mut x = sys.zero_state();
        x.comp_mut(0)[0] = 0.7.into();
        let r = sys.rhs(&x).unwrap();
        assert!(r.data().iter().all(|z| z.norm() == 0.0), "{kind:?}");
    }
}

#[test]
fn linear_part_matches_symbol_table() {
    for kind in [SystemKind::EulerNs, SystemKind::Df, SystemKind::DfScaled, SystemKind::EulerNsScaled] {
        let g = grid(3, 12);
        let sys = System::new(kind, &g, PhysParams { eps: 0.5, ..params() }).unwrap();
        let x = random_state(&g, kind, 0.1, 3);
        let k = sys.linear_coeffs();
        let table = ModeTable::build(&sys, |xi| (compressible_symbol(xi, &k), incompressible_symbol(xi, &k)));
        let mut lin = table.apply(&x);
        for c in 0..x.ncomp() {
            // the transported density has no linear part
            if c == 0 {
                lin.comp_mut(0).iter_mut().for_each(|z| *z = 0.0.into());
            }
        }
        assert!(rel(&lin, &sys.apply_linear(&x)) < 1e-12, "{kind:?}");
    }
}

#[test]
fn nonlinear_remainder_is_quadratic() {
    let g = grid(2, 32);
    let sys = System::euler_ns(&g, params()).unwrap();
    let mut x = sys.zero_state();
    let d = 2;
    let lay = sys.layout();
    let mode = g.index_of([1, 2, 0]);
    let neg = g.neg(mode);
    for c in [0, lay.u.unwrap(), lay.u.unwrap() + 1, lay.a.unwrap(), lay.v, lay.v + 1] {
        x.comp_mut(c)[mode] = (0.3 + c as f64 * 0.1).into();
        x.comp_mut(c)[neg] = (0.3 + c as f64 * 0.1).into();
    }
    x.comp_mut(0)[0] = 1.0.into();
    let residual = |delta: f64| {
        let mut y = x.scaled(delta);
        y.comp_mut(0)[0] = 0.0.into();
        let r = sys.rhs(&y).unwrap();
        r.sub(&sys.apply_linear(&y)).l2_norm()
    };
    let ratio = residual(0.02) / residual(0.01);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    assert_eq!(d, g.dim());
}

#[test]
fn scaled_variants_agree_at_unit_parameters() {
    let g = grid(2, 32);
    let p = PhysParams { tau: 1.0, eps: 1.0, ..params() };
    for (a, b) in [(SystemKind::EulerNs, SystemKind::EulerNsScaled), (SystemKind::Df, SystemKind::DfScaled)] {
        for seed in 0..5 {
            let x = random_state(&g, a, 0.2, seed);
            let ra = System::new(a, &g, p).unwrap().rhs(&x).unwrap();
            let rb = System::new(b, &g, p).unwrap().rhs(&x).unwrap();
            assert!(ra.max_abs_diff(&rb) <= 1e-12 * ra.l2_norm().max(1.0));
        }
    }
}

#[test]
fn drift_flux_rescaling_matches_scaled_system() {
    // (ρ, n−1, v)(t, x) = ε (ρ^ε, a^ε, v^ε)(ε² t, ε x)
    let side = 2.0 * std::f64::consts::PI;
    let g = Grid::new(2, 32, side).unwrap();
    let p = PhysParams { eps: 1.0, ..params() };
    let x = random_state(&g, SystemKind::Df, 0.2, 11);
    let unscaled = System::df(&g, p).unwrap().rhs(&x).unwrap();
    for &eps in &[0.5, 0.25, 0.125] {
        let ge = Grid::new(2, 32, side * eps).unwrap();
        let xe = x.scaled(1.0 / eps).with_grid(&ge).unwrap();
        let scaled = System::df_scaled(&ge, PhysParams { eps, ..p }).unwrap().rhs(&xe).unwrap();
        let expect = unscaled.scaled(1.0 / eps.powi(3)).with_grid(&ge).unwrap();
        assert!(rel(&scaled, &expect) < 1e-12, "eps {eps}: {}", rel(&scaled, &expect));
    }
}

#[test]
fn relative_velocity_identity_on_random_states() {
    let g = grid(2, 32);
    for seed in 0..50 {
        let lam = -0.5 + 0.03 * seed as f64;
        let sys = System::euler_ns(&g, PhysParams { lam, gamma: 1.4 + 0.05 * seed as f64, ..params() }).unwrap();
        let x = random_state(&g, SystemKind::EulerNs, 0.3, seed);
        let r = relative_velocity_residual(&sys, &x).unwrap();
        assert!(r < 1e-9, "seed {seed}: {r:e}");
    }
}

#[test]
fn relative_velocity_identity_at_equilibrium_and_aligned_velocities() {
    let g = grid(2, 16);
    let sys = System::euler_ns(&g, params()).unwrap();
    assert_eq!(relative_velocity_residual(&sys, &sys.zero_state()).unwrap(), 0.0);
    let mut x = random_state(&g, SystemKind::EulerNs, 0.2, 5);
    let lay = sys.layout();
    for i in 0..2 {
        let v = x.comp(lay.v + i).to_vec();
        x.comp_mut(lay.u.unwrap() + i).copy_from_slice(&v);
    }
    assert!(relative_velocity_residual(&sys, &x).unwrap() < 1e-9);
}

#[test]
fn masses_and_momentum_are_conserved_by_the_right_hand_side() {
    let g = grid(2, 32);
    let sys = System::euler_ns(&g, params()).unwrap();
    for seed in 0..10 {
        let x = random_state(&g, SystemKind::EulerNs, 0.3, seed);
        let r = sys.rhs(&x).unwrap();
        assert_eq!(r.comp(0)[0].norm(), 0.0);
        assert_eq!(r.comp(sys.layout().a.unwrap())[0].norm(), 0.0);
        let rate = momentum_rate(&x, &r);
        let scale = r.l2_norm() * x.l2_norm();
        for m in rate {
            assert!(m.abs() <= 1e-10 * scale.max(1.0), "{m:e}");
        }
    }
}

#[test]
fn drift_flux_conservative_form_agrees() {
    let g = grid(2, 64);
    let sys = System::df(&g, params()).unwrap();
    for seed in 0..5 {
        let x = random_state(&g, SystemKind::Df, 0.1, seed);
        let r = df_momentum_residual(&sys, &x).unwrap();
        assert!(r < 1e-8, "seed {seed}: {r:e}");
    }
}

#[test]
fn drift_flux_without_particles_is_single_phase() {
    let g = grid(2, 32);
    let p = params();
    let sys = System::df(&g, p).unwrap();
    let mut x = random_state(&g, SystemKind::Df, 0.2, 7);
    x.comp_mut(0).iter_mut().for_each(|z| *z = 0.0.into());
    let r = sys.rhs(&x).unwrap();
    // single-phase: v' = −v·∇v − P'(n)/n ∇a + (μΔv + (μ+λ)∇div v)/n
    let st = DfState::unpack(&x);
    let ph_a = st.a.to_physical().remove(0);
    let ga = grad(&st.a).to_physical();
    let lv = laplacian(&st.v).scaled(p.mu).add(&grad(&twophase::spectral::div(&st.v)).scaled(p.mu + p.lam)).to_physical();
    let v = st.v.to_physical();
    let dv: Vec<Vec<Vec<f64>>> =
        (0..2).map(|i| grad(&st.v.component(i)).to_physical()).collect();
    let mut out = vec![vec![0.0; g.len()]; 2];
    for q in 0..g.len() {
        let n = 1.0 + ph_a[q];
        for i in 0..2 {
            let adv: f64 = (0..2).map(|j| v[j][q] * dv[i][j][q]).sum();
            out[i][q] = -adv - n.powf(p.gamma - 2.0) * ga[i][q] + lv[i][q] / n;
        }
    }
    let expect = SpectralField::from_physical(&g, &out).unwrap().dealiased();
    let got = DfState::unpack(&r).v;
    assert!(rel(&got, &expect) < 1e-12, "{}", rel(&got, &expect));
}

#[test]
fn euler_ns_without_particles_matches_single_phase() {
    let g = grid(2, 32);
    let p = params();
    let mut x = random_state(&g, SystemKind::EulerNs, 0.2, 8);
    x.comp_mut(0).iter_mut().for_each(|z| *z = 0.0.into());
    let r_two = System::euler_ns(&g, p).unwrap().rhs(&x).unwrap();
    let st = EulerNsState::unpack(&x);
    let df_state = DfState { rho: st.rho.clone(), a: st.a.clone(), v: st.v.clone() }.pack().unwrap();
    let r_df = System::df(&g, p).unwrap().rhs(&df_state).unwrap();
    let a = EulerNsState::unpack(&r_two);
    let b = DfState::unpack(&r_df);
    assert!(rel(&a.v, &b.v) < 1e-12);
    assert!(rel(&a.a, &b.a) < 1e-12);
}

#[test]
fn tns_energy_balance() {
    let g = grid(2, 32);
    let p = PhysParams { mu: 0.7, ..params() };
    let sys = System::tns(&g, p).unwrap();
    for seed in 0..5 {
        let x = random_state(&g, SystemKind::Tns, 0.5, seed);
        let r = sys.rhs(&x).unwrap();
        let w = TnsState::unpack(&x).w;
        let dw = TnsState::unpack(&r).w;
        let vol = g.volume();
        let de: f64 = vol * w.data().iter().zip(dw.data()).map(|(a, b)| (a * b.conj()).re).sum::<f64>();
        let grad_sq: f64 = (0..2).map(|i| grad(&w.component(i)).l2_norm().powi(2)).sum();
        let expect = -p.mu * grad_sq;
        assert!((de - expect).abs() <= 1e-8 * expect.abs(), "{de} vs {expect}");
        assert_eq!(r.comp(0)[0].norm(), 0.0);
    }
}

#[test]
fn taylor_green_projected_advection_vanishes() {
    let g = grid(2, 32);
    let sys = System::tns(&g, PhysParams { mu: 0.3, ..params() }).unwrap();
    let w = SpectralField::from_fn(&g, 2, |c, x| if c == 0 { x[0].sin() * x[1].cos() } else { -x[0].cos() * x[1].sin() });
    let x = TnsState { varrho: SpectralField::scalar_zeros(&g), w: w.clone() }.pack().unwrap();
    let r = sys.rhs(&x).unwrap();
    // 𝒫(w·∇w) = 0 and Δw = −2w
    let expect = w.scaled(-2.0 * 0.3);
    assert!(TnsState::unpack(&r).w.sub(&expect).l2_norm() < 1e-12);
}

#[test]
fn scaled_drift_flux_projects_to_tns() {
    let g = grid(2, 32);
    let p = PhysParams { eps: 0.2, ..params() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = random_solenoidal(&g, 3.0, 0.5, &mut rng);
    let df = DfState { rho: SpectralField::scalar_zeros(&g), a: SpectralField::scalar_zeros(&g), v: w.clone() }.pack().unwrap();
    let tn = TnsState { varrho: SpectralField::scalar_zeros(&g), w }.pack().unwrap();
    let r_df = DfState::unpack(&System::df_scaled(&g, p).unwrap().rhs(&df).unwrap()).v;
    let r_tns = TnsState::unpack(&System::tns(&g, p).unwrap().rhs(&tn).unwrap()).w;
    let (proj, _) = leray_project(&r_df).unwrap();
    assert!(rel(&proj, &r_tns) < 1e-12);
}

#[test]
fn mixed_velocity_identities() {
    let g = grid(2, 32);
    let x = random_state(&g, SystemKind::EulerNs, 0.3, 9);
    let st = EulerNsState::unpack(&x);
    let vm = effective_mixed_velocity(&x, 1.0).unwrap();
    // V − v = ρ/(ρ+n) (u − v)
    let rho = st.rho.to_physical().remove(0);
    let a = st.a.to_physical().remove(0);
    let w = st.u.sub(&st.v).to_physical();
    let out: Vec<Vec<f64>> =
        (0..2).map(|i| (0..g.len()).map(|q| rho[q] / (rho[q] + 1.0 + a[q]) * w[i][q]).collect()).collect();
    let expect = SpectralField::from_physical(&g, &out).unwrap().dealiased();
    assert!(vm.sub(&st.v).sub(&expect).l2_norm() < 1e-12 * st.v.l2_norm());

    let aligned = EulerNsState { u: st.v.clone(), ..st.clone() }.pack().unwrap();
    assert!(effective_mixed_velocity(&aligned, 1.0).unwrap().sub(&st.v).l2_norm() < 1e-13);
    let dry = EulerNsState { rho: SpectralField::scalar_zeros(&g), ..st.clone() }.pack().unwrap();
    assert!(effective_mixed_velocity(&dry, 1.0).unwrap().sub(&st.v).l2_norm() < 1e-13);
}

#[test]
fn asymptotic_profile_trivial_cases() {
    let g = grid(2, 16);
    let rho0 = gaussian(&g, [3.0, 3.0, 0.0], 1.0, 0.5);
    let zero = SpectralField::vector_zeros(&g);
    let samples: Vec<_> = (0..5).map(|k| (k as f64, rho0.clone(), zero.clone())).collect();
    let prof = asymptotic_profile(&samples, 1e-8).unwrap();
    assert!(prof.max_abs_diff(&rho0) < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u = random_smooth(&g, 2, 2.0, 0.1, &mut rng);
    let mut samples: Vec<_> = (0..5).map(|k| (k as f64, rho0.clone(), u.scaled((-(k as f64)).exp()))).collect();
    assert!(matches!(asymptotic_profile(&samples, 1e-8), Err(Error::TailNotConverged(_))));
    samples.push((6.0, rho0.clone(), zero));
    let prof = asymptotic_profile(&samples, 1e-8).unwrap();
    assert!((prof.integral(0) - rho0.integral(0)).abs() < 1e-13);
}

#[test]
fn state_checks() {
    let g = grid(2, 16);
    let sys = System::euler_ns(&g, params()).unwrap();
    let mut x = random_state(&g, SystemKind::EulerNs, 0.1, 1);
    assert!(sys.check_state(&x, 1e-10).is_ok());
    let a = sys.layout().a.unwrap();
    x.comp_mut(a)[g.index_of([1, 0, 0])] = 0.5.into();
    x.comp_mut(a)[g.index_of([-1, 0, 0])] = 0.5.into();
    assert!(matches!(sys.check_state(&x, 1e-10), Err(Error::VacuumGas(_))));

    let df = System::df(&g, params()).unwrap();
    let mut y = random_state(&g, SystemKind::Df, 0.1, 2);
    y.comp_mut(1)[0] = (-1.0).into();
    assert!(matches!(df.check_state(&y, 1e-10), Err(Error::DegenerateMixture(_))));
    assert!(matches!(df.rhs(&y), Err(Error::DegenerateMixture(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn rhs_conserves_masses(seed in 0u64..1000, amp in 0.01f64..0.4) {
        let g = grid(2, 16);
        for kind in [SystemKind::EulerNs, SystemKind::Df, SystemKind::Tns] {
            let sys = System::new(kind, &g, params()).unwrap();
            let x = random_state(&g, kind, amp, seed);
            let r = sys.rhs(&x).unwrap();
            prop_assert_eq!(r.comp(0)[0].norm(), 0.0);
            if let Some(a) = sys.layout().a {
                prop_assert_eq!(r.comp(a)[0].norm(), 0.0);
            }
            prop_assert!(r.hermitian_defect() < 1e-14 * r.l2_norm().max(1.0));
        }
    }
}
