use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::common::{require_sweep, strictly_decreasing, GridSpec, Verdict, BEYOND_THEOREM};
use super::recipe::{coupled_euler_ns_data, DataFamily, DataRecipe};
use super::{rate_fit, RateFit};
use crate::besov::{BlockTimeSeries, LpFamily, Part, TimeExp};
use crate::error::{Error, Result};
use crate::integrator::{cfl_dt, plan_steps, Scheme, SchemeKind, Stepper};
use crate::spectral::{PhysParams, SpectralField};
use crate::systems::{effective_mixed_velocity, DfState, EulerNsState, System, SystemKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DfLimitConfig {
    pub grid: GridSpec,
    /// `tau` is overridden per sweep member
    pub params: PhysParams,
    pub taus: Vec<f64>,
    pub t_end: f64,
    /// drift-flux data `(ρ0, a0, v0)`; the Euler-NS data are coupled to it
    pub data: DataRecipe,
    /// amplitude of the density bump `τ e^{−|x−c|²}` added to `ρ0`
    pub bump: f64,
    pub scheme: SchemeKind,
    /// common step is at most `min τ / steps_per_tau`
    pub steps_per_tau: f64,
    pub max_samples: usize,
    pub band: (f64, f64),
}

impl Default for DfLimitConfig {
    fn default() -> Self {
        DfLimitConfig {
            grid: GridSpec::pi_side(3, 48, 1.0),
            params: PhysParams { mu: 0.25, ..PhysParams::default() },
            taus: vec![0.2, 0.1, 0.05],
            t_end: 1.0,
            data: DataRecipe {
                family: DataFamily::PowerLaw { sigma1: 0.5, cutoff: 1e3 },
                amp: 0.05,
                mismatch: 0.0,
                rho_amp: 0.1,
                rho_width: 1.0,
                rho_floor: 0.01,
                prepared: true,
                seed: 11,
            },
            bump: 0.0,
            scheme: SchemeKind::ExpRk2,
            steps_per_tau: 4.0,
            max_samples: 200,
            band: (0.40, 0.70),
        }
    }
}

/// Instantaneous distances between an Euler-NS state and a drift-flux state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitDistance {
    /// `‖(ρ^τ−ρ, n^τ−n)‖_{Ḃ^{d/2−2}_{2,1} ∩ Ḃ^{d/2−1}_{2,1}}`
    pub density: f64,
    /// `‖V^τ − v‖_{Ḃ^{d/2−2}_{2,1}}`
    pub mixed: f64,
}

impl LimitDistance {
    pub fn total(&self) -> f64 {
        self.density + self.mixed
    }
}

struct Differences {
    density: SpectralField,
    mixed: SpectralField,
    velocity: SpectralField,
}

fn differences(en: &SpectralField, df: &SpectralField) -> Result<Differences> {
    let e = EulerNsState::unpack(en);
    let f = DfState::unpack(df);
    let density = SpectralField::stack(&[&e.rho.sub(&f.rho), &e.a.sub(&f.a)])?;
    let mixed = effective_mixed_velocity(en, 1.0)?.sub(&f.v);
    let velocity = SpectralField::stack(&[&e.u.sub(&f.v), &e.v.sub(&f.v)])?;
    Ok(Differences { density, mixed, velocity })
}

/// Distance of an Euler-NS state from a drift-flux state on the same grid.
pub fn limit_distance(family: &LpFamily, en: &SpectralField, df: &SpectralField) -> Result<LimitDistance> {
    let d = family.grid().dim() as f64;
    let diff = differences(en, df)?;
    let b = family.block_norms(&diff.density, 2.0)?;
    let m = family.block_norms(&diff.mixed, 2.0)?;
    Ok(LimitDistance {
        density: family.assemble(&b, d / 2.0 - 2.0, 1.0, Part::Full)
            + family.assemble(&b, d / 2.0 - 1.0, 1.0, Part::Full),
        mixed: family.assemble(&m, d / 2.0 - 2.0, 1.0, Part::Full),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfLimitRow {
    pub tau: f64,
    /// distance of the coupled data, the left side of the data condition
    pub initial: LimitDistance,
    pub density_sup: f64,
    pub mixed_sup: f64,
    /// `sup_t` of the summed distance
    pub error: f64,
    /// `‖(u^τ−v, v^τ−v)‖_{L¹_T(Ḃ^{d/2}_{2,1})}`
    pub velocity_l1: f64,
    pub mass_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfLimitResult {
    pub config: DfLimitConfig,
    pub dt: f64,
    pub steps: usize,
    pub rows: Vec<DfLimitRow>,
    pub fit: RateFit,
    pub velocity_fit: RateFit,
    pub flags: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

struct Member {
    tau: f64,
    stepper: Stepper,
    x: SpectralField,
    initial: LimitDistance,
    mass0: f64,
    mass_drift: f64,
    sup: (f64, f64, f64),
    velocity: BlockTimeSeries,
}

fn total_mass(x: &SpectralField) -> f64 {
    let g = x.grid();
    let a = SystemKind::EulerNs.layout(g.dim()).a.expect("two-velocity layout");
    x.integral(0) + g.volume() + x.integral(a)
}

impl Member {
    fn observe(&mut self, family: &LpFamily, t: f64, df: &SpectralField) -> Result<()> {
        let dist = limit_distance(family, &self.x, df)?;
        self.sup.0 = self.sup.0.max(dist.density);
        self.sup.1 = self.sup.1.max(dist.mixed);
        self.sup.2 = self.sup.2.max(dist.total());
        let vel = differences(&self.x, df)?.velocity;
        self.velocity.push(t, family.block_norms(&vel, 2.0)?);
        let m = total_mass(&self.x);
        self.mass_drift = self.mass_drift.max((m - self.mass0).abs() / self.mass0.abs().max(1e-300));
        Ok(())
    }
}

/// Runs the drift-flux reference once and every Euler-NS member in lockstep
/// with one common step, measuring the distance at every sample.
pub fn df_limit_study(cfg: &DfLimitConfig) -> Result<DfLimitResult> {
    require_sweep(&cfg.taus, "taus")?;
    cfg.params.validate()?;
    if !(cfg.steps_per_tau > 0.0 && cfg.t_end > 0.0) {
        return Err(Error::InvalidConfig("steps_per_tau and t_end must be positive".into()));
    }
    let grid = cfg.grid.build()?;
    let family = LpFamily::new(&grid);
    let d = grid.dim() as f64;
    let df_sys = System::df(&grid, cfg.params)?;
    let mut x_df = cfg.data.build(&df_sys)?.dealiased();
    df_sys.check_state(&x_df, crate::systems::RHO_TOL)?;

    let tau_min = cfg.taus.iter().cloned().fold(f64::INFINITY, f64::min);
    let base = Scheme { kind: cfg.scheme, ..Scheme::default() };
    let mut target = (tau_min / cfg.steps_per_tau).min(cfl_dt(&df_sys, &x_df, &base));
    let mut starts = Vec::new();
    for &tau in &cfg.taus {
        let sys = System::euler_ns(&grid, PhysParams { tau, ..cfg.params })?;
        let x = coupled_euler_ns_data(&x_df, tau, cfg.bump)?.dealiased();
        sys.check_state(&x, crate::systems::RHO_TOL)?;
        target = target.min(cfl_dt(&sys, &x, &base));
        starts.push((tau, sys, x));
    }
    let (dt, n_samples, per_sample) = plan_steps(target, cfg.t_end, cfg.max_samples);

    let mut df_stepper = Stepper::new(&df_sys, cfg.scheme, dt)?;
    let mut members = Vec::new();
    for (tau, sys, x) in starts {
        let initial = limit_distance(&family, &x, &x_df)?;
        let mut m = Member {
            tau,
            stepper: Stepper::new(&sys, cfg.scheme, dt)?,
            mass0: total_mass(&x),
            x,
            initial,
            mass_drift: 0.0,
            sup: (0.0, 0.0, 0.0),
            velocity: BlockTimeSeries::new(&family, 2.0),
        };
        m.observe(&family, 0.0, &x_df)?;
        members.push(m);
    }

    for s in 1..=n_samples {
        for _ in 0..per_sample {
            let (a, b) = rayon::join(
                || df_stepper.step(&x_df),
                || {
                    members.par_iter_mut().try_for_each(|m| -> Result<()> {
                        m.x = m.stepper.step(&m.x)?;
                        Ok(())
                    })
                },
            );
            x_df = a?;
            b?;
        }
        let t = if s == n_samples { cfg.t_end } else { (s * per_sample) as f64 * dt };
        let xr = &x_df;
        members.par_iter_mut().try_for_each(|m| m.observe(&family, t, xr))?;
    }

    let rows = members
        .iter()
        .map(|m| {
            Ok(DfLimitRow {
                tau: m.tau,
                initial: m.initial,
                density_sup: m.sup.0,
                mixed_sup: m.sup.1,
                error: m.sup.2,
                velocity_l1: m.velocity.lebesgue_time_norm(TimeExp::One, d / 2.0, 1.0, Part::Full)?,
                mass_drift: m.mass_drift,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = rate_fit(&rows.iter().map(|r| (r.tau, r.error)).collect::<Vec<_>>())?;
    let velocity_fit = rate_fit(&rows.iter().map(|r| (r.tau, r.velocity_l1)).collect::<Vec<_>>())?;
    let mut flags = Vec::new();
    if grid.dim() < 3 || cfg.taus.iter().any(|&t| t >= 1.0) {
        flags.push(BEYOND_THEOREM.to_string());
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let verdicts = vec![
        Verdict::within("sqrt_tau_slope", fit.slope, cfg.band.0, cfg.band.1),
        Verdict::holds("errors_monotone", strictly_decreasing(&errors)),
    ];
    Ok(DfLimitResult {
        config: cfg.clone(),
        dt,
        steps: n_samples * per_sample,
        rows,
        fit,
        velocity_fit,
        flags,
        verdicts,
    })
}
