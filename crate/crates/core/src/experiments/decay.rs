use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::common::{GridSpec, Verdict, BEYOND_THEOREM, TORUS_CAVEAT};
use super::recipe::{DataFamily, DataRecipe};
use super::{decay_fit, strictly_decreasing, RateFit};
use crate::besov::{BesovSpec, LpFamily, Part};
use crate::error::{Error, Result};
use crate::integrator::{integrate_observed, Observer, Quantity, RunOptions, Scheme};
use crate::linear::{channel, continuum_linear_norms, Channel, LinearCoeffs, RadialInit};
use crate::spectral::{PhysParams, SpectralField};
use crate::systems::{density_flux_divergence, ProfileAccumulator, System, TAIL_TOL};

/// Minimum number of samples inside a fit window.
pub const MIN_WINDOW_SAMPLES: usize = 8;

/// One `(d, σ1, σ)` triple of the continuum tier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayCase {
    pub dim: usize,
    pub sigma1: f64,
    pub sigma: f64,
}

impl DecayCase {
    pub fn new(dim: usize, sigma1: f64, sigma: f64) -> Self {
        DecayCase { dim, sigma1, sigma }
    }

    /// `(σ − σ1)/2`
    pub fn heat_rate(&self) -> f64 {
        0.5 * (self.sigma - self.sigma1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearDecayConfig {
    pub cases: Vec<DecayCase>,
    pub tau: f64,
    pub mu: f64,
    pub lam: f64,
    pub window: (f64, f64),
    /// log-spaced sample times in the window
    pub samples: usize,
    /// friction times of the `u − v` scaling check
    pub taus: Vec<f64>,
    pub exponent_tol: f64,
    pub ratio_max: f64,
}

impl Default for LinearDecayConfig {
    fn default() -> Self {
        LinearDecayConfig {
            cases: vec![DecayCase::new(2, -1.0, 0.0), DecayCase::new(2, -1.0, 1.0), DecayCase::new(3, -1.5, 0.5)],
            tau: 0.1,
            mu: 1.0,
            lam: -1.0,
            window: (10.0, 1e3),
            samples: 16,
            taus: vec![0.2, 0.1, 0.05],
            exponent_tol: 0.05,
            ratio_max: 25.0,
        }
    }
}

/// Fit of one channel of one case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub dim: usize,
    pub sigma1: f64,
    pub sigma: f64,
    pub channel: String,
    pub expected: f64,
    pub exponent: f64,
    pub r_squared: f64,
    /// `min` and `max` of `y(t)(1+t)^{expected}` over the window
    pub lower: f64,
    pub upper: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl DecayRow {
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

fn decay_row(case: DecayCase, name: &str, expected: f64, times: &[f64], values: &[f64]) -> Result<DecayRow> {
    let fit = decay_fit(times, values)?;
    let scaled: Vec<f64> = times.iter().zip(values).map(|(t, y)| y * (1.0 + t).powf(expected)).collect();
    Ok(DecayRow {
        dim: case.dim,
        sigma1: case.sigma1,
        sigma: case.sigma,
        channel: name.to_string(),
        expected,
        exponent: -fit.slope,
        r_squared: fit.r_squared,
        lower: scaled.iter().cloned().fold(f64::INFINITY, f64::min),
        upper: scaled.iter().cloned().fold(0.0, f64::max),
        times: times.to_vec(),
        values: values.to_vec(),
    })
}

/// Initial profiles satisfying the lower-bound condition: `â0`, `φ̂0` and
/// `Ψ̂0` equal `|ξ|^{-(σ1+d/2)} e^{-|ξ|²}`, and `ψ̂0 = Φ̂0 = 0`.
pub fn lower_bound_data(case: DecayCase) -> RadialInit {
    let e = case.sigma1 + case.dim as f64 / 2.0;
    let f = move |r: f64| r.powf(-e) * (-r * r).exp();
    RadialInit::default().with_a0(f).with_phi0(f).with_big_psi0(f)
}

/// `u − v` scaling with `τ` at the end of the window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauScaling {
    pub dim: usize,
    pub sigma1: f64,
    pub sigma: f64,
    pub fit: RateFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearDecayResult {
    pub config: LinearDecayConfig,
    pub rows: Vec<DecayRow>,
    pub tau_scaling: Vec<TauScaling>,
    pub verdicts: Vec<Verdict>,
}

fn log_times(window: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = (window.0.ln(), window.1.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Continuum-frequency decay of the linearized system on `ℝ^d`.
pub fn linear_decay_study(cfg: &LinearDecayConfig) -> Result<LinearDecayResult> {
    if cfg.samples < 3 || !(cfg.window.0 > 0.0 && cfg.window.1 > cfg.window.0) {
        return Err(Error::InvalidConfig("window needs 0 < t0 < t1 and at least 3 samples".into()));
    }
    let times = log_times(cfg.window, cfg.samples);
    let k = LinearCoeffs::new(cfg.tau, cfg.mu, cfg.lam);
    let mut rows = Vec::new();
    let mut tau_scaling = Vec::new();
    let mut verdicts = Vec::new();
    for &case in &cfg.cases {
        if case.sigma <= case.sigma1 {
            return Err(Error::InvalidConfig(format!("sigma {} must exceed sigma1 {}", case.sigma, case.sigma1)));
        }
        let init = lower_bound_data(case);
        let norms: Vec<Vec<_>> = times
            .par_iter()
            .map(|&t| continuum_linear_norms(case.dim, &k, &init, case.sigma, case.sigma1, t))
            .collect::<Result<_>>()?;
        let series = |ch: Channel| norms.iter().map(|n| channel(n, ch).b_sigma).collect::<Vec<f64>>();
        let rate = case.heat_rate();
        let tag = format!("d{}_s1{}_s{}", case.dim, case.sigma1, case.sigma);
        let all = decay_row(case, "uav", rate, &times, &series(Channel::All))?;
        verdicts.push(Verdict::within(format!("{tag}_uav_exponent"), all.exponent, rate - cfg.exponent_tol, rate + cfg.exponent_tol));
        verdicts.push(Verdict::at_most(format!("{tag}_sandwich_ratio"), all.ratio(), cfg.ratio_max));
        rows.push(all);
        rows.push(decay_row(case, "uv", rate, &times, &series(Channel::UV))?);
        rows.push(decay_row(case, "a", rate, &times, &series(Channel::A))?);
        rows.push(decay_row(case, "heat", rate, &times, &series(Channel::Heat))?);
        let rel = decay_row(case, "u_minus_v", rate + 0.5, &times, &series(Channel::RelVel))?;
        verdicts.push(Verdict::within(
            format!("{tag}_u_minus_v_exponent"),
            rel.exponent,
            rate + 0.5 - cfg.exponent_tol,
            rate + 0.5 + cfg.exponent_tol,
        ));
        rows.push(rel);

        if case.sigma <= case.dim as f64 / 2.0 - 1.0 && cfg.taus.len() >= 3 {
            let t_end = cfg.window.1;
            let pts: Vec<(f64, f64)> = cfg
                .taus
                .par_iter()
                .map(|&tau| {
                    let kt = LinearCoeffs::new(tau, cfg.mu, cfg.lam);
                    let n = continuum_linear_norms(case.dim, &kt, &init, case.sigma, case.sigma1, t_end)?;
                    Ok((tau, channel(&n, Channel::RelVel).b_sigma))
                })
                .collect::<Result<_>>()?;
            let fit = super::rate_fit(&pts)?;
            verdicts.push(Verdict::within(format!("{tag}_u_minus_v_tau_slope"), fit.slope, 0.85, 1.15));
            tau_scaling.push(TauScaling { dim: case.dim, sigma1: case.sigma1, sigma: case.sigma, fit });
        }
    }
    Ok(LinearDecayResult { config: cfg.clone(), rows, tau_scaling, verdicts })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearDecayConfig {
    pub grid: GridSpec,
    pub params: PhysParams,
    /// `σ1` of the data; the power-law family should use the same value
    pub sigma1: f64,
    /// regularity of the velocity norms
    pub sigma: f64,
    /// regularity of the density-profile norm
    pub rho_sigma: f64,
    pub data: DataRecipe,
    pub window: (f64, f64),
    /// horizon of the run that defines `ρ∞`
    pub t_profile: f64,
    pub scheme: Scheme,
    pub sample_interval: f64,
    pub exponent_tol: f64,
    pub enhancement_min: f64,
}

impl Default for NonlinearDecayConfig {
    fn default() -> Self {
        NonlinearDecayConfig {
            grid: GridSpec::pi_side(2, 128, 32.0),
            params: PhysParams::default(),
            sigma1: -1.0,
            sigma: 1.0,
            rho_sigma: 0.0,
            data: DataRecipe {
                family: DataFamily::PowerLaw { sigma1: -1.0, cutoff: 1.0 },
                amp: 0.01,
                mismatch: 1.0,
                rho_amp: 0.05,
                rho_width: 4.0,
                rho_floor: 0.005,
                prepared: false,
                seed: 5,
            },
            window: (5.0, 25.0),
            t_profile: 60.0,
            scheme: Scheme::default(),
            sample_interval: 0.5,
            exponent_tol: 0.15,
            enhancement_min: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearDecayResult {
    pub config: NonlinearDecayConfig,
    /// fit window after clipping to `0.1 (L/2π)²`
    pub window: (f64, f64),
    pub rows: Vec<DecayRow>,
    /// `‖ρ(t) − ρ∞‖_{Ḃ^{rho_sigma}_{2,1}}` on the window samples
    pub profile_times: Vec<f64>,
    pub profile_distance: Vec<f64>,
    /// `‖div(ρu)‖_{L²}` at `t_profile`
    pub profile_tail: f64,
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub flags: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

/// Nonlinear Euler-NS decay on a large torus over a pre-saturation window.
pub fn nonlinear_decay_study(cfg: &NonlinearDecayConfig) -> Result<NonlinearDecayResult> {
    cfg.params.validate()?;
    let grid = cfg.grid.build()?;
    let side = grid.side();
    let saturation = 0.1 * (side / (2.0 * std::f64::consts::PI)).powi(2);
    let window = (cfg.window.0, cfg.window.1.min(saturation));
    if !(cfg.sample_interval > 0.0) || !(cfg.t_profile >= window.1) {
        return Err(Error::InvalidConfig("need sample_interval > 0 and t_profile >= window end".into()));
    }
    let sys = System::euler_ns(&grid, cfg.params)?;
    let x0 = cfg.data.build(&sys)?;
    let observers = [
        Observer::new(Quantity::Uv, 2.0),
        Observer::new(Quantity::RelVel, 2.0),
        Observer::new(Quantity::A, 2.0),
    ];
    let n_samples = (cfg.t_profile / cfg.sample_interval).ceil() as usize;
    let opts = RunOptions { max_samples: n_samples, ..RunOptions::default() };
    let mut acc: Option<ProfileAccumulator> = None;
    let mut rho_window: Vec<(f64, SpectralField)> = Vec::new();
    let traj = integrate_observed(&sys, &x0, cfg.t_profile, &cfg.scheme, &observers, &opts, |t, x| {
        let rho = x.component(0);
        let a = acc.get_or_insert_with(|| ProfileAccumulator::new(rho.clone()));
        a.push(t, density_flux_divergence(&sys, x)?);
        if t >= window.0 && t <= window.1 {
            rho_window.push((t, rho));
        }
        Ok(())
    })?;
    let acc = acc.expect("the initial sample is always visited");
    let rho_inf = acc.current();

    let case = DecayCase::new(grid.dim(), cfg.sigma1, cfg.sigma);
    let rate = case.heat_rate();
    let mut rows = Vec::new();
    for (obs, name, expected) in [(0, "uv", rate), (1, "u_minus_v", rate + 0.5), (2, "a", rate)] {
        let w = traj.series[obs].window(window.0, window.1);
        if w.len() < MIN_WINDOW_SAMPLES {
            return Err(Error::WindowTooShort(w.len()));
        }
        rows.push(decay_row(case, name, expected, &w.times, &w.besov_history(cfg.sigma, 1.0, Part::Full))?);
    }
    let family = LpFamily::new(&grid);
    let spec = BesovSpec::new(cfg.rho_sigma, 2.0, 1.0);
    let profile_distance: Vec<f64> =
        rho_window.iter().map(|(_, r)| family.besov_norm(&r.sub(&rho_inf), &spec)).collect::<Result<_>>()?;
    let profile_times: Vec<f64> = rho_window.iter().map(|(t, _)| *t).collect();

    let mut flags = vec![TORUS_CAVEAT.to_string()];
    let d = grid.dim() as f64;
    let result3_scope = grid.dim() >= 3 && cfg.rho_sigma > cfg.sigma1 + 1.0 && cfg.rho_sigma <= d / 2.0 - 1.0;
    if !result3_scope {
        flags.push(format!("{BEYOND_THEOREM}:density_profile"));
    }
    if acc.last_norm() >= TAIL_TOL {
        flags.push("profile-truncated".to_string());
    }
    let uv = &rows[0];
    let rel = &rows[1];
    let verdicts = vec![
        Verdict::within("uv_exponent", uv.exponent, rate - cfg.exponent_tol, rate + cfg.exponent_tol),
        Verdict::at_least("enhancement", rel.exponent - uv.exponent, cfg.enhancement_min),
        Verdict::holds("density_profile_monotone", strictly_decreasing(&profile_distance)),
    ];
    Ok(NonlinearDecayResult {
        config: cfg.clone(),
        window,
        rows,
        profile_times,
        profile_distance,
        profile_tail: acc.last_norm(),
        mass_drift: traj.mass_drift(),
        momentum_drift: traj.momentum_drift(),
        flags,
        verdicts,
    })
}
