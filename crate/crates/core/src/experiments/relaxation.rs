use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::common::{require_sweep, GridSpec, Verdict, BEYOND_THEOREM};
use super::recipe::{DataFamily, DataRecipe};
use super::{rate_fit, RateFit};
use crate::besov::{Part, TimeExp};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Observer, Quantity, RunOptions, Scheme};
use crate::spectral::PhysParams;
use crate::systems::System;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelaxationConfig {
    pub grid: GridSpec,
    /// `tau` is overridden per sweep member
    pub params: PhysParams,
    pub taus: Vec<f64>,
    pub t_end: f64,
    pub data: DataRecipe,
    pub scheme: Scheme,
    /// steps and samples per friction time; the step is also capped by
    /// `τ / steps_per_tau`
    pub steps_per_tau: f64,
    /// low/high threshold of the hybrid norm
    pub j0: i32,
    pub sqrt_band: (f64, f64),
    pub linear_band: (f64, f64),
}

impl Default for RelaxationConfig {
    fn default() -> Self {
        RelaxationConfig {
            grid: GridSpec::pi_side(2, 64, 16.0),
            params: PhysParams::default(),
            taus: vec![0.2, 0.1, 0.05, 0.025],
            t_end: 40.0,
            data: DataRecipe {
                family: DataFamily::Gaussian { width: 6.0 },
                mismatch: 3.0,
                ..DataRecipe::default()
            },
            scheme: Scheme::default(),
            steps_per_tau: 4.0,
            j0: 0,
            sqrt_band: (0.40, 0.65),
            linear_band: (0.85, 1.15),
        }
    }
}

/// Norms of `u − v` for one friction time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationRow {
    pub tau: f64,
    /// `‖u−v‖_{L¹_T(Ḃ^{d/2}_{2,1})}`
    pub l1_top: f64,
    /// `‖u−v‖_{L̃²_T(Ḃ^{d/2−1}_{2,1})}`
    pub l2_low: f64,
    /// `l1_top + l2_low`
    pub sqrt_family: f64,
    /// `‖u−v‖_{L¹_T(Ḃ^{d/2}_{2,1} + Ḃ^{d/2−1}_{2,1})}`
    pub hybrid: f64,
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub dt: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationResult {
    pub config: RelaxationConfig,
    pub rows: Vec<RelaxationRow>,
    pub sqrt_fit: RateFit,
    pub linear_fit: RateFit,
    pub flags: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

fn member(cfg: &RelaxationConfig, tau: f64) -> Result<RelaxationRow> {
    let grid = cfg.grid.build()?;
    let d = grid.dim() as f64;
    let sys = System::euler_ns(&grid, PhysParams { tau, ..cfg.params })?;
    let x0 = cfg.data.build(&sys)?;
    let obs = Observer::new(Quantity::RelVel, 2.0);
    let cap = tau / cfg.steps_per_tau;
    let scheme = Scheme { dt_max: cfg.scheme.dt_max.min(cap), ..cfg.scheme };
    let opts = RunOptions { max_samples: (cfg.t_end / cap).ceil() as usize + 1, ..RunOptions::default() };
    let traj = integrate(&sys, &x0, cfg.t_end, &scheme, &[obs], &opts)?;
    let s = &traj.series[0];
    let l1_top = s.lebesgue_time_norm(TimeExp::One, d / 2.0, 1.0, Part::Full)?;
    let l2_low = s.chemin_lerner_norm(TimeExp::Two, d / 2.0 - 1.0, 1.0, Part::Full)?;
    let hybrid = s.lebesgue_time_hybrid(TimeExp::One, d / 2.0, d / 2.0 - 1.0, 1.0, cfg.j0)?;
    Ok(RelaxationRow {
        tau,
        l1_top,
        l2_low,
        sqrt_family: l1_top + l2_low,
        hybrid,
        mass_drift: traj.mass_drift(),
        momentum_drift: traj.momentum_drift(),
        dt: traj.dt,
        steps: traj.steps,
    })
}

/// Runs Euler-NS for every `τ` from identical data and fits the two
/// relative-velocity norm families against `τ`.
pub fn relaxation_study(cfg: &RelaxationConfig) -> Result<RelaxationResult> {
    require_sweep(&cfg.taus, "taus")?;
    cfg.params.validate()?;
    if !(cfg.steps_per_tau > 0.0) {
        return Err(Error::InvalidConfig(format!("steps_per_tau must be positive, got {}", cfg.steps_per_tau)));
    }
    let rows: Vec<RelaxationRow> = cfg.taus.par_iter().map(|&tau| member(cfg, tau)).collect::<Result<_>>()?;
    let sqrt_fit = rate_fit(&rows.iter().map(|r| (r.tau, r.sqrt_family)).collect::<Vec<_>>())?;
    let linear_fit = rate_fit(&rows.iter().map(|r| (r.tau, r.hybrid)).collect::<Vec<_>>())?;
    let mut flags = Vec::new();
    if cfg.grid.dim < 2 || cfg.taus.iter().any(|&t| t >= 1.0) {
        flags.push(BEYOND_THEOREM.to_string());
    }
    let verdicts = vec![
        Verdict::within("sqrt_tau_slope", sqrt_fit.slope, cfg.sqrt_band.0, cfg.sqrt_band.1),
        Verdict::within("tau_slope", linear_fit.slope, cfg.linear_band.0, cfg.linear_band.1),
    ];
    Ok(RelaxationResult { config: cfg.clone(), rows, sqrt_fit, linear_fit, flags, verdicts })
}
