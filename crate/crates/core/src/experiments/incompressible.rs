use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::common::{require_sweep, GridSpec, Verdict, BEYOND_THEOREM, TORUS_CAVEAT};
use super::recipe::{DataFamily, DataRecipe};
use super::{rate_fit, RateFit};
use crate::besov::{eps_threshold, Part, TimeExp};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Observer, Quantity, RunOptions, Scheme};
use crate::spectral::PhysParams;
use crate::systems::{System, SystemKind};

/// Which scaled system a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowMachSystem {
    DfScaled,
    /// with `τ = ε`
    EulerNsScaled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IncompressibleConfig {
    pub grid: GridSpec,
    /// `eps` and `tau` are overridden per sweep member
    pub params: PhysParams,
    pub eps: Vec<f64>,
    pub systems: Vec<LowMachSystem>,
    /// Lebesgue index of the dispersive norm
    pub p: f64,
    pub t_end: f64,
    /// ε-independent data `(ρ0, a0, v0)` and, for Euler-NS, `u0`
    pub data: DataRecipe,
    pub scheme: Scheme,
    /// the step and the sample spacing are at most `ε / steps_per_eps`
    pub steps_per_eps: f64,
    pub dispersive_band: (f64, f64),
    pub relative_band: (f64, f64),
}

impl Default for IncompressibleConfig {
    fn default() -> Self {
        IncompressibleConfig {
            grid: GridSpec::pi_side(2, 128, 32.0),
            params: PhysParams::default(),
            eps: vec![0.4, 0.2, 0.1, 0.05],
            systems: vec![LowMachSystem::DfScaled, LowMachSystem::EulerNsScaled],
            p: 4.0,
            t_end: 2.0,
            data: DataRecipe {
                family: DataFamily::Gaussian { width: 2.0 },
                mismatch: 0.25,
                rho_width: 2.0,
                rho_floor: 0.01,
                ..DataRecipe::default()
            },
            scheme: Scheme::default(),
            steps_per_eps: 8.0,
            dispersive_band: (0.05, 0.22),
            relative_band: (0.85, 1.15),
        }
    }
}

impl IncompressibleConfig {
    /// Regularity `s` of the `L̃²_T(Ḃ^s_{p,1})` norm.
    pub fn regularity(&self) -> f64 {
        let (d, p) = (self.grid.dim as f64, self.p);
        if self.grid.dim == 2 {
            2.5 / p - 0.25
        } else {
            (d + 1.0) / p - 0.5
        }
    }

    /// Predicted exponent of `ε`.
    pub fn exponent(&self) -> f64 {
        if self.grid.dim == 2 {
            0.25 - 0.5 / self.p
        } else {
            0.5 - 1.0 / self.p
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncompressibleRow {
    pub system: LowMachSystem,
    pub eps: f64,
    /// `2^{j0} ≈ 1/ε`
    pub j0: i32,
    /// `‖(a, 𝒬v)‖_{L̃²_T(Ḃ^s_{p,1})}`
    pub a_qv: f64,
    /// `‖(a, 𝒬u, 𝒬v)‖_{L̃²_T(Ḃ^s_{p,1})}` (Euler-NS only)
    pub a_qu_qv: Option<f64>,
    /// `‖u − v‖_{L¹_T(Ḃ^{d/2}_{2,1})}` (Euler-NS only)
    pub relative: Option<f64>,
    pub mass_drift: f64,
    pub dt: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncompressibleFit {
    pub system: LowMachSystem,
    pub quantity: String,
    pub expected: f64,
    pub fit: RateFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncompressibleResult {
    pub config: IncompressibleConfig,
    pub regularity: f64,
    pub exponent: f64,
    pub rows: Vec<IncompressibleRow>,
    pub fits: Vec<IncompressibleFit>,
    pub flags: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

fn member(cfg: &IncompressibleConfig, system: LowMachSystem, eps: f64) -> Result<IncompressibleRow> {
    let grid = cfg.grid.build()?;
    let d = grid.dim() as f64;
    let s = cfg.regularity();
    let (sys, observers) = match system {
        LowMachSystem::DfScaled => {
            (System::df_scaled(&grid, PhysParams { eps, ..cfg.params })?, vec![Observer::new(Quantity::AQv, cfg.p)])
        }
        LowMachSystem::EulerNsScaled => (
            System::euler_ns_scaled(&grid, PhysParams { eps, tau: eps, ..cfg.params })?,
            vec![
                Observer::new(Quantity::AQv, cfg.p),
                Observer::new(Quantity::AQuQv, cfg.p),
                Observer::new(Quantity::RelVel, 2.0),
            ],
        ),
    };
    let x0 = cfg.data.build(&sys)?;
    let cap = eps / cfg.steps_per_eps;
    let scheme = Scheme { dt_max: cfg.scheme.dt_max.min(cap), ..cfg.scheme };
    let opts = RunOptions { max_samples: (cfg.t_end / cap).ceil() as usize + 1, ..RunOptions::default() };
    let traj = integrate(&sys, &x0, cfg.t_end, &scheme, &observers, &opts)?;
    let cl = |i: usize| traj.series[i].chemin_lerner_norm(TimeExp::Two, s, 1.0, Part::Full);
    let (a_qu_qv, relative) = if sys.kind == SystemKind::EulerNsScaled {
        (Some(cl(1)?), Some(traj.series[2].lebesgue_time_norm(TimeExp::One, d / 2.0, 1.0, Part::Full)?))
    } else {
        (None, None)
    };
    Ok(IncompressibleRow {
        system,
        eps,
        j0: eps_threshold(eps),
        a_qv: cl(0)?,
        a_qu_qv,
        relative,
        mass_drift: traj.mass_drift(),
        dt: traj.dt,
        steps: traj.steps,
    })
}

/// Runs each scaled system for every Mach number from ε-independent
/// ill-prepared data and fits the acoustic and relative-velocity norms
/// against `ε`.
pub fn incompressible_study(cfg: &IncompressibleConfig) -> Result<IncompressibleResult> {
    require_sweep(&cfg.eps, "eps")?;
    cfg.params.validate()?;
    if cfg.systems.is_empty() {
        return Err(Error::InvalidConfig("systems must not be empty".into()));
    }
    if !(cfg.p > 2.0 && cfg.p.is_finite()) {
        return Err(Error::InvalidConfig(format!("p must lie in (2, ∞), got {}", cfg.p)));
    }
    if !(cfg.steps_per_eps > 0.0 && cfg.t_end > 0.0) {
        return Err(Error::InvalidConfig("steps_per_eps and t_end must be positive".into()));
    }
    if cfg.eps.iter().any(|&e| e >= 1.0) {
        return Err(Error::InvalidConfig("eps values must lie in (0, 1)".into()));
    }
    let jobs: Vec<(LowMachSystem, f64)> =
        cfg.systems.iter().flat_map(|&s| cfg.eps.iter().map(move |&e| (s, e))).collect();
    let rows: Vec<IncompressibleRow> = jobs.par_iter().map(|&(s, e)| member(cfg, s, e)).collect::<Result<_>>()?;

    let exponent = cfg.exponent();
    let mut fits = Vec::new();
    let mut verdicts = Vec::new();
    for &system in &cfg.systems {
        let sel: Vec<&IncompressibleRow> = rows.iter().filter(|r| r.system == system).collect();
        let tag = match system {
            LowMachSystem::DfScaled => "df_scaled",
            LowMachSystem::EulerNsScaled => "euler_ns_scaled",
        };
        let fit = rate_fit(&sel.iter().map(|r| (r.eps, r.a_qv)).collect::<Vec<_>>())?;
        verdicts.push(Verdict::within(
            format!("{tag}_a_qv_slope"),
            fit.slope,
            cfg.dispersive_band.0,
            cfg.dispersive_band.1,
        ));
        fits.push(IncompressibleFit { system, quantity: "a_qv".into(), expected: exponent, fit });
        if system == LowMachSystem::EulerNsScaled {
            let joint = rate_fit(&sel.iter().map(|r| (r.eps, r.a_qu_qv.unwrap_or(0.0))).collect::<Vec<_>>())?;
            fits.push(IncompressibleFit { system, quantity: "a_qu_qv".into(), expected: exponent, fit: joint });
            let rel = rate_fit(&sel.iter().map(|r| (r.eps, r.relative.unwrap_or(0.0))).collect::<Vec<_>>())?;
            verdicts.push(Verdict::within(
                format!("{tag}_relative_velocity_slope"),
                rel.slope,
                cfg.relative_band.0,
                cfg.relative_band.1,
            ));
            fits.push(IncompressibleFit { system, quantity: "u_minus_v".into(), expected: 1.0, fit: rel });
        }
    }

    let mut flags = vec![TORUS_CAVEAT.to_string()];
    let eps_min = cfg.eps.iter().cloned().fold(f64::INFINITY, f64::min);
    if cfg.t_end / eps_min > 0.5 * cfg.grid.side {
        flags.push("acoustic-wrap".to_string());
    }
    if cfg.grid.dim < 2 {
        flags.push(BEYOND_THEOREM.to_string());
    }
    Ok(IncompressibleResult { config: cfg.clone(), regularity: cfg.regularity(), exponent, rows, fits, flags, verdicts })
}
