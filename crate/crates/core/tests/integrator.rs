use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twophase::experiments::data::{gaussian, random_smooth, random_solenoidal};
use twophase::integrator::{
    cfl_limits, integrate, linear_flow, load_checkpoint, save_checkpoint, ModeTable, Observer, Quantity,
    RunOptions, Scheme, SchemeKind, Stepper,
};
use twophase::linear::propagator_with;
use twophase::spectral::{Grid, PhysParams, SpectralField};
use twophase::systems::{EulerNsState, System, SystemKind, TnsState};

fn grid(d: usize, n: usize) -> Arc<Grid> {
    Grid::new(d, n, 2.0 * std::f64::consts::PI).unwrap()
}

fn params(tau: f64) -> PhysParams {
    PhysParams { tau, eps: 1.0, mu: 1.0, lam: 0.0, gamma: 3.0 }
}

fn state(g: &Arc<Grid>, amp: f64, rho_amp: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = g.dim();
    let mut rho = gaussian(g, [3.0, 3.0, 3.0], 1.0, rho_amp);
    rho.comp_mut(0)[0] += 0.1 * rho_amp;
    EulerNsState {
        rho,
        u: random_smooth(g, d, 3.0, amp, &mut rng),
        a: random_smooth(g, 1, 3.0, amp, &mut rng),
        v: random_smooth(g, d, 3.0, amp, &mut rng),
    }
    .pack()
    .unwrap()
}

#[test]
fn zero_step_table_is_identity() {
    let g = grid(2, 16);
    let sys = System::euler_ns(&g, params(0.1)).unwrap();
    let x = state(&g, 0.1, 0.1, 1);
    let y = ModeTable::propagators(&sys, 0.0).apply(&x);
    assert!(x.max_abs_diff(&y) < 1e-15);
}

#[test]
fn table_entries_match_propagator() {
    let g = grid(3, 12);
    let sys = System::euler_ns(&g, PhysParams { lam: 0.3, ..params(0.05) }).unwrap();
    let t = ModeTable::propagators(&sys, 0.37);
    let k = sys.linear_coeffs();
    for idx in [0, 1, 5, 40, 200, 1000] {
        let p = propagator_with(g.xi_norm(idx), &k, 0.37);
        let (a, b) = t.entry(idx);
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - p.a[i][j]).abs() < 1e-12);
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((b[i][j] - p.b[i][j]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn half_steps_compose() {
    for kind in [SystemKind::EulerNs, SystemKind::Df, SystemKind::DfScaled] {
        let g = grid(2, 32);
        let sys = System::new(kind, &g, PhysParams { eps: 0.3, ..params(0.1) }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_smooth(&g, sys.layout().ncomp, 8.0, 0.1, &mut rng);
        let half = ModeTable::propagators(&sys, 0.05);
        let full = ModeTable::propagators(&sys, 0.1);
        let y = half.apply(&half.apply(&x));
        assert!(y.max_abs_diff(&full.apply(&x)) < 1e-10);
    }
}

#[test]
fn equilibrium_is_fixed() {
    let g = grid(2, 16);
    for kind in [SchemeKind::ExpEuler, SchemeKind::ExpRk2, SchemeKind::ImexBdf2] {
        let sys = System::euler_ns(&g, params(0.05)).unwrap();
        let mut x = sys.zero_state();
        x.comp_mut(0)[0] = 0.3.into();
        let mut st = Stepper::new(&sys, kind, 0.01).unwrap();
        let mut y = x.clone();
        for _ in 0..1000 {
            y = st.step(&y).unwrap();
        }
        assert!(y.max_abs_diff(&x) < 1e-14);
    }
}

#[test]
fn linear_regime_step_matches_propagator() {
    let g = grid(2, 32);
    let sys = System::euler_ns(&g, params(0.05)).unwrap();
    let mut x = state(&g, 1e-6, 1e-6, 4);
    x.dealias();
    for kind in [SchemeKind::ExpEuler, SchemeKind::ExpRk2] {
        let mut st = Stepper::new(&sys, kind, 0.2).unwrap();
        let y = st.step(&x).unwrap();
        let z = linear_flow(&sys, &x, 0.2);
        assert!(y.max_abs_diff(&z) < 1e-10);
    }
}

#[test]
fn linear_flow_is_exact_for_any_step() {
    let g = grid(2, 32);
    let sys = System::euler_ns(&g, params(0.01)).unwrap();
    let x = state(&g, 0.1, 0.1, 5).dealiased();
    let once = linear_flow(&sys, &x, 3.0);
    let mut many = x.clone();
    let t = ModeTable::propagators(&sys, 0.3);
    for _ in 0..10 {
        many = t.apply(&many);
    }
    assert!(once.max_abs_diff(&many) < 1e-10);
}

fn run_to(sys: &System, x: &SpectralField, kind: SchemeKind, dt: f64, t: f64) -> SpectralField {
    let mut st = Stepper::new(sys, kind, dt).unwrap();
    let steps = (t / dt).round() as usize;
    let mut y = x.clone();
    for _ in 0..steps {
        y = st.step(&y).unwrap();
    }
    y
}

fn observed_order(kind: SchemeKind) -> f64 {
    let g = grid(2, 32);
    let sys = System::euler_ns(&g, params(0.05)).unwrap();
    let x = state(&g, 0.3, 0.2, 6).dealiased();
    let dt = 0.02;
    let a = run_to(&sys, &x, kind, dt, 0.4);
    let b = run_to(&sys, &x, kind, dt / 2.0, 0.4);
    let c = run_to(&sys, &x, kind, dt / 4.0, 0.4);
    (a.sub(&b).l2_norm() / b.sub(&c).l2_norm()).log2()
}

#[test]
fn exp_rk2_is_second_order() {
    let p = observed_order(SchemeKind::ExpRk2);
    assert!((1.8..=2.3).contains(&p), "order {p}");
}

#[test]
fn exp_euler_is_first_order() {
    let p = observed_order(SchemeKind::ExpEuler);
    assert!((0.8..=1.3).contains(&p), "order {p}");
}

#[test]
fn imex_bdf2_is_second_order() {
    let p = observed_order(SchemeKind::ImexBdf2);
    assert!((1.7..=2.4).contains(&p), "order {p}");
}

#[test]
fn taylor_green_decays_exactly() {
    let g = grid(2, 32);
    let mu = 0.2;
    let sys = System::tns(&g, PhysParams { mu, ..params(0.1) }).unwrap();
    let w = SpectralField::from_fn(&g, 2, |c, x| {
        if c == 0 {
            (2.0 * x[0]).sin() * (2.0 * x[1]).cos()
        } else {
            -(2.0 * x[0]).cos() * (2.0 * x[1]).sin()
        }
    });
    let mut varrho = gaussian(&g, [3.0, 3.0, 0.0], 1.0, 0.5);
    varrho.comp_mut(0)[0] += 0.2;
    let x = TnsState { varrho, w: w.clone() }.pack().unwrap();
    let traj = integrate(&sys, &x, 2.0, &Scheme::default(), &[Observer::new(Quantity::V, 2.0)], &RunOptions::default())
        .unwrap();
    let wf = TnsState::unpack(traj.final_state.as_ref().unwrap()).w;
    // |ξ|² = 8 on every mode
    let exact = w.scaled((-8.0 * mu * 2.0f64).exp());
    assert!(wf.sub(&exact).l2_norm() <= 1e-6 * exact.l2_norm(), "{}", wf.sub(&exact).l2_norm());
    assert!(traj.mass_drift() < 1e-10);
}

#[test]
fn stiff_drag_runs_at_advective_step() {
    let g = grid(2, 32);
    let mut steps = Vec::new();
    for tau in [1.0, 1e-3] {
        let sys = System::euler_ns(&g, PhysParams { mu: 0.05, ..params(tau) }).unwrap();
        let x = state(&g, 0.2, 1e-4, 7).dealiased();
        let lim = cfl_limits(&sys, &x);
        assert!(lim.drag_feedback > lim.advective.max(lim.viscous));
        let scheme = Scheme { dt_max: 1.0, ..Scheme::default() };
        let traj = integrate(&sys, &x, 2.0, &scheme, &[], &RunOptions::default()).unwrap();
        assert!(traj.dt > 0.9 * 0.4 * lim.advective.min(lim.viscous) && traj.dt > 50.0 * tau.min(1e-3), "{lim:?} {}", traj.dt);
        let last = *traj.sup_norm.last().unwrap();
        assert!(last.is_finite() && last < traj.sup_norm[0]);
        steps.push(traj.dt);
    }
    assert_eq!(steps[0], steps[1]);
}

#[test]
fn zero_horizon_gives_single_sample() {
    let g = grid(2, 16);
    let sys = System::euler_ns(&g, params(0.1)).unwrap();
    let x = state(&g, 0.1, 0.1, 8);
    let traj = integrate(&sys, &x, 0.0, &Scheme::default(), &[Observer::new(Quantity::U, 2.0)], &RunOptions::default())
        .unwrap();
    assert_eq!(traj.times, vec![0.0]);
    assert_eq!(traj.series[0].len(), 1);
}

#[test]
fn masses_conserved_and_runs_reproducible() {
    let g = grid(2, 32);
    let sys = System::euler_ns(&g, params(0.05)).unwrap();
    let x = state(&g, 0.2, 0.2, 9);
    let obs = [Observer::new(Quantity::RelVel, 2.0), Observer::new(Quantity::Uv, 4.0)];
    let a = integrate(&sys, &x, 1.0, &Scheme::default(), &obs, &RunOptions::default()).unwrap();
    let b = integrate(&sys, &x, 1.0, &Scheme::default(), &obs, &RunOptions::default()).unwrap();
    assert!(a.mass_drift() < 1e-10);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn checkpoint_round_trip() {
    let g = grid(2, 16);
    let sys = System::euler_ns(&g, params(0.1)).unwrap();
    let x = state(&g, 0.1, 0.1, 10);
    let dir = tempfile::tempdir().unwrap();
    save_checkpoint(dir.path(), "c0", 1.25, &x, &sys, &Scheme::default()).unwrap();
    let (meta, y) = load_checkpoint(dir.path(), "c0").unwrap();
    assert_eq!(meta.time, 1.25);
    assert_eq!(meta.system, SystemKind::EulerNs);
    assert_eq!(x.max_abs_diff(&y), 0.0);
}

#[test]
fn tns_stays_solenoidal() {
    let g = grid(2, 32);
    let sys = System::tns(&g, params(0.1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut varrho = gaussian(&g, [3.0, 3.0, 0.0], 1.0, 0.5);
    varrho.comp_mut(0)[0] += 0.2;
    let x = TnsState { varrho, w: random_solenoidal(&g, 4.0, 0.5, &mut rng) }.pack().unwrap();
    let traj = integrate(&sys, &x, 1.0, &Scheme::default(), &[], &RunOptions::default()).unwrap();
    assert!(traj.mass_drift() < 1e-10);
}
