use std::f64::consts::E;

use proptest::prelude::*;

use twophase::experiments::{
    all_pass, coupled_euler_ns_data, decay_fit, df_limit_study, exp_fit, incompressible_study, lemma_a1_check,
    linear_decay_study, oracle_check, rate_fit, relaxation_study, self_convergence, strictly_decreasing,
    structure_check, ConvergenceConfig, DataFamily, DataRecipe, DecayCase, DfLimitConfig, GridSpec,
    IncompressibleConfig, LemmaA1Config, LinearDecayConfig, LowMachSystem, OracleConfig, RelaxationConfig,
    StructureConfig, Verdict,
};
use twophase::spectral::PhysParams;
use twophase::systems::{DfState, EulerNsState, System, SystemKind};
use twophase::Error;

#[test]
fn rate_fit_recovers_exact_power_law() {
    let pts: Vec<(f64, f64)> = [0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|&x| (x, 3.0 * f64::powf(x, -0.7))).collect();
    let fit = rate_fit(&pts).unwrap();
    assert!((fit.slope + 0.7).abs() < 1e-13);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-13);
    assert!(fit.stderr < 1e-12);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
    assert!((fit.predict(16.0) - 3.0 * 16f64.powf(-0.7)).abs() < 1e-12);
}

#[test]
fn rate_fit_matches_hand_computed_least_squares() {
    // log points (0,0), (1,1), (2,3): slope 3/2, intercept -1/6, sse 1/6
    let fit = rate_fit(&[(1.0, 1.0), (E, E), (E * E, E * E * E)]).unwrap();
    assert!((fit.slope - 1.5).abs() < 1e-14);
    assert!((fit.intercept + 1.0 / 6.0).abs() < 1e-14);
    assert!((fit.stderr - (1.0f64 / 12.0).sqrt()).abs() < 1e-14);
    assert!((fit.r_squared - 27.0 / 28.0).abs() < 1e-14);
}

#[test]
fn fit_errors() {
    assert!(matches!(rate_fit(&[(1.0, 1.0), (2.0, 2.0)]), Err(Error::TooFewPoints(2))));
    assert!(matches!(rate_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(Error::NonPositiveData(_))));
    assert!(matches!(rate_fit(&[(-1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]), Err(Error::NonPositiveData(_))));
    assert!(matches!(rate_fit(&[(2.0, 1.0), (2.0, 3.0), (2.0, 5.0)]), Err(Error::NonPositiveData(_))));
    assert!(matches!(exp_fit(&[(0.0, 1.0)]), Err(Error::TooFewPoints(1))));
    assert!(matches!(exp_fit(&[(0.0, 1.0), (1.0, f64::NAN), (2.0, 1.0)]), Err(Error::NonPositiveData(_))));
}

#[test]
fn exp_and_decay_fits() {
    let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0 * (-0.3 * i as f64).exp())).collect();
    let fit = exp_fit(&pts).unwrap();
    assert!((fit.slope + 0.3).abs() < 1e-13);
    assert!((fit.intercept - 2f64.ln()).abs() < 1e-13);

    let t: [f64; 4] = [1.0, 3.0, 7.0, 15.0];
    let y: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(-1.25)).collect();
    assert!((decay_fit(&t, &y).unwrap().slope + 1.25).abs() < 1e-13);
}

#[test]
fn verdict_bounds() {
    assert!(Verdict::within("x", 1.0, 0.0, 1.0).pass);
    assert!(!Verdict::within("x", 1.0 + 1e-15, 0.0, 1.0).pass);
    assert!(!Verdict::within("x", f64::NAN, f64::NEG_INFINITY, f64::INFINITY).pass);
    assert!(!Verdict::at_most("x", f64::INFINITY, f64::INFINITY).pass);
    assert!(Verdict::at_least("x", 5.0, 4.0).pass);
    assert!(Verdict::holds("x", true).pass && !Verdict::holds("x", false).pass);
    assert!(all_pass(&[]));
    assert!(!all_pass(&[Verdict::holds("a", true), Verdict::holds("b", false)]));
    assert!(strictly_decreasing(&[3.0, 2.0, 1.0]) && !strictly_decreasing(&[3.0, 3.0, 1.0]));
}

#[test]
fn verdict_json_uses_null_for_unbounded_sides() {
    let v = Verdict::at_most("drift", 1e-12, 1e-10);
    let s = serde_json::to_string(&v).unwrap();
    assert!(s.contains("\"lo\":null"));
    let back: Verdict = serde_json::from_str(&s).unwrap();
    assert_eq!(back, v);
}

#[test]
fn oracle_and_propagator_checks_pass_at_defaults() {
    let o = oracle_check(&OracleConfig::default()).unwrap();
    assert!(all_pass(&o.verdicts), "{:?}", o.verdicts);
    assert!(o.propagator_error < 1e-10 && o.eigen_error < 1e-10);

    let l = lemma_a1_check(&LemmaA1Config::default()).unwrap();
    assert!(all_pass(&l.verdicts), "{:?}", l.verdicts);
}

#[test]
fn linear_decay_matches_heat_rates() {
    let r = linear_decay_study(&LinearDecayConfig::default()).unwrap();
    assert!(all_pass(&r.verdicts), "{:?}", r.verdicts);
    assert!(!r.rows.is_empty());
    for row in &r.rows {
        assert!(row.lower > 0.0 && row.upper >= row.lower);
        assert_eq!(row.times.len(), row.values.len());
    }
    assert_eq!(DecayCase::new(2, -1.0, 1.0).heat_rate(), 1.0);
}

#[test]
fn structure_and_self_convergence_pass_at_defaults() {
    let s = structure_check(&StructureConfig::default()).unwrap();
    assert!(all_pass(&s.verdicts), "{:?}", s.verdicts);
    let c = self_convergence(&ConvergenceConfig::default()).unwrap();
    assert!(all_pass(&c.verdicts), "{:?}", c.verdicts);
    assert!(c.differences.1 < c.differences.0);
    assert!((c.order - (c.differences.0 / c.differences.1).log2()).abs() < 1e-12);
}

fn small_grid() -> GridSpec {
    GridSpec::pi_side(2, 16, 2.0)
}

#[test]
fn sweeps_must_be_positive_decreasing_and_long_enough() {
    for taus in [vec![0.1, 0.05], vec![0.1, 0.2, 0.05], vec![0.1, 0.05, 0.0]] {
        let cfg = RelaxationConfig { taus, ..RelaxationConfig::default() };
        assert!(matches!(relaxation_study(&cfg), Err(Error::InvalidConfig(_))));
    }
    let cfg = DfLimitConfig { taus: vec![0.1, 0.1, 0.05], ..DfLimitConfig::default() };
    assert!(matches!(df_limit_study(&cfg), Err(Error::InvalidConfig(_))));
    let cfg = IncompressibleConfig { eps: vec![0.4, 0.2], ..IncompressibleConfig::default() };
    assert!(matches!(incompressible_study(&cfg), Err(Error::InvalidConfig(_))));
}

#[test]
fn small_relaxation_sweep_conserves_and_shrinks() {
    let cfg = RelaxationConfig {
        grid: small_grid(),
        taus: vec![0.2, 0.1, 0.05],
        t_end: 0.5,
        data: DataRecipe { family: DataFamily::Gaussian { width: 1.0 }, rho_width: 1.5, ..DataRecipe::default() },
        ..RelaxationConfig::default()
    };
    let r = relaxation_study(&cfg).unwrap();
    assert_eq!(r.rows.len(), 3);
    for row in &r.rows {
        assert!(row.mass_drift < 1e-12 && row.momentum_drift < 1e-10, "{row:?}");
        assert!((row.sqrt_family - row.l1_top - row.l2_low).abs() <= 1e-12 * row.sqrt_family);
    }
    assert!(strictly_decreasing(&r.rows.iter().map(|r| r.hybrid).collect::<Vec<_>>()));
}

#[test]
fn small_df_limit_error_shrinks_with_tau() {
    let cfg = DfLimitConfig {
        grid: small_grid(),
        t_end: 0.2,
        data: DataRecipe {
            family: DataFamily::Gaussian { width: 1.0 },
            prepared: true,
            rho_width: 1.5,
            rho_floor: 0.1,
            ..DataRecipe::default()
        },
        ..DfLimitConfig::default()
    };
    let r = df_limit_study(&cfg).unwrap();
    assert_eq!(r.rows.len(), 3);
    assert!(strictly_decreasing(&r.rows.iter().map(|r| r.error).collect::<Vec<_>>()));
    assert!(r.rows.iter().all(|row| row.mass_drift < 1e-12));
}

#[test]
fn small_incompressible_sweep_has_one_row_per_member() {
    let cfg = IncompressibleConfig {
        grid: small_grid(),
        eps: vec![0.4, 0.2, 0.1],
        t_end: 0.1,
        data: DataRecipe {
            family: DataFamily::Gaussian { width: 1.0 },
            rho_width: 1.5,
            rho_floor: 0.1,
            ..DataRecipe::default()
        },
        ..IncompressibleConfig::default()
    };
    let r = incompressible_study(&cfg).unwrap();
    assert_eq!(r.rows.len(), 6);
    for row in &r.rows {
        assert!(row.a_qv.is_finite() && row.a_qv > 0.0);
        assert_eq!(row.a_qu_qv.is_some(), row.system == LowMachSystem::EulerNsScaled);
        assert!((f64::powi(2.0, row.j0) * row.eps - 1.0).abs() <= 0.5);
    }
}

#[test]
fn recipe_validation() {
    let bad = [
        DataRecipe { amp: -1.0, ..DataRecipe::default() },
        DataRecipe { mismatch: f64::NAN, ..DataRecipe::default() },
        DataRecipe { rho_width: 0.0, ..DataRecipe::default() },
        DataRecipe { rho_floor: -0.1, ..DataRecipe::default() },
        DataRecipe { family: DataFamily::Gaussian { width: 0.0 }, ..DataRecipe::default() },
        DataRecipe { family: DataFamily::Random { kmax: 0.5 }, ..DataRecipe::default() },
        DataRecipe { family: DataFamily::PowerLaw { sigma1: 0.0, cutoff: 0.0 }, ..DataRecipe::default() },
    ];
    for r in bad {
        assert!(matches!(r.validate(), Err(Error::InvalidConfig(_))), "{r:?}");
    }
    assert!(DataRecipe::default().validate().is_ok());
}

fn euler_ns(g: GridSpec) -> System {
    System::new(SystemKind::EulerNs, &g.build().unwrap(), PhysParams::default()).unwrap()
}

#[test]
fn recipe_fields_have_requested_amplitudes() {
    let g = small_grid().build().unwrap();
    let r = DataRecipe { family: DataFamily::Random { kmax: 3.0 }, amp: 0.2, mismatch: 0.5, ..DataRecipe::default() };
    let f = r.fields(&g).unwrap();
    assert!((f.a.linf_norm() - 0.2).abs() < 1e-12);
    assert!((f.v.linf_norm() - 0.2).abs() < 1e-12);
    assert!((f.w.linf_norm() - 0.1).abs() < 1e-12);
    assert!(f.a.hermitian_defect() < 1e-14);

    let again = r.fields(&g).unwrap();
    assert_eq!(f.v.data(), again.v.data());
    let other = DataRecipe { seed: r.seed + 1, ..r }.fields(&g).unwrap();
    assert!(f.v.max_abs_diff(&other.v) > 1e-3);
}

#[test]
fn prepared_data_start_without_relative_velocity() {
    let sys = euler_ns(small_grid());
    let x = DataRecipe { prepared: true, ..DataRecipe::default() }.build(&sys).unwrap();
    let s = EulerNsState::unpack(&x);
    assert!(s.u.max_abs_diff(&s.v) == 0.0);
}

#[test]
fn coupled_data_keep_drift_flux_parts() {
    let g = small_grid().build().unwrap();
    let sys = System::new(SystemKind::Df, &g, PhysParams::default()).unwrap();
    let df = DataRecipe::default().build(&sys).unwrap();
    let en = EulerNsState::unpack(&coupled_euler_ns_data(&df, 0.1, 0.0).unwrap());
    let s = DfState::unpack(&df);
    assert_eq!(en.a.data(), s.a.data());
    assert_eq!(en.v.data(), s.v.data());
    assert!(en.rho.max_abs_diff(&s.rho) == 0.0);
    assert!(matches!(coupled_euler_ns_data(&df, 0.0, 0.0), Err(Error::InvalidParams(_))));
    assert!(matches!(coupled_euler_ns_data(&df, 0.1, -1.0), Err(Error::InvalidParams(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rate_fit_is_exact_on_power_laws(slope in -3.0f64..3.0, c in 0.1f64..10.0, x0 in 0.1f64..2.0) {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| {
            let x = x0 * 1.7f64.powi(i);
            (x, c * x.powf(slope))
        }).collect();
        let fit = rate_fit(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-10);
    }

    #[test]
    fn rate_fit_slope_is_scale_invariant(ys in prop::collection::vec(0.01f64..100.0, 3..8), k in 0.01f64..100.0) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| ((i + 1) as f64, y)).collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, k * y)).collect();
        let a = rate_fit(&pts).unwrap();
        let b = rate_fit(&scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9);
        prop_assert!((b.intercept - a.intercept - k.ln()).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&a.r_squared));
    }

    #[test]
    fn verdict_within_agrees_with_interval(v in -10.0f64..10.0, lo in -10.0f64..10.0, w in 0.0f64..10.0) {
        let hi = lo + w;
        prop_assert_eq!(Verdict::within("x", v, lo, hi).pass, lo <= v && v <= hi);
    }
}
