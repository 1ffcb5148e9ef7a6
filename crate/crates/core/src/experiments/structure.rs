use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::common::{GridSpec, Verdict};
use super::data::{gaussian, random_smooth};
use crate::besov::LpFamily;
use crate::error::Result;
use crate::integrator::{SchemeKind, Stepper};
use crate::spectral::{PhysParams, SpectralField};
use crate::systems::{relative_velocity_residual, EulerNsState, System};

/// Structural checks that need no sweep: the relative-velocity identity on
/// random states, fixed equilibria and the dyadic partition of unity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructureConfig {
    pub grid: GridSpec,
    pub states: usize,
    pub amp: f64,
    pub seed: u64,
    pub equilibrium_steps: usize,
    pub equilibrium_dt: f64,
    pub equilibrium_density: f64,
    /// grids on which the partition of unity is measured
    pub partition_grids: Vec<GridSpec>,
    pub residual_tol: f64,
    pub equilibrium_tol: f64,
    pub partition_tol: f64,
}

impl Default for StructureConfig {
    fn default() -> Self {
        StructureConfig {
            grid: GridSpec::pi_side(2, 32, 2.0),
            states: 50,
            amp: 0.3,
            seed: 100,
            equilibrium_steps: 1000,
            equilibrium_dt: 0.01,
            equilibrium_density: 0.3,
            partition_grids: vec![
                GridSpec::pi_side(2, 16, 2.0),
                GridSpec::pi_side(2, 64, 2.0),
                GridSpec::pi_side(2, 128, 32.0),
                GridSpec::pi_side(3, 32, 2.0),
            ],
            residual_tol: 1e-9,
            equilibrium_tol: 1e-14,
            partition_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureResult {
    pub config: StructureConfig,
    pub relative_velocity_residual: f64,
    /// worst deviation over the three schemes
    pub equilibrium_error: f64,
    pub partition_residual: f64,
    pub verdicts: Vec<Verdict>,
}

fn random_state(sys: &System, amp: f64, seed: u64) -> Result<SpectralField> {
    let g = &sys.grid;
    let d = g.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = g.side() / 2.0;
    let mut rho = gaussian(g, [c, c, c], g.side() / 6.0, amp).add(&random_smooth(g, 1, 3.0, 0.2 * amp, &mut rng));
    rho.comp_mut(0)[0] += 0.3 * amp;
    EulerNsState {
        rho,
        u: random_smooth(g, d, 3.0, amp, &mut rng),
        a: random_smooth(g, 1, 3.0, amp, &mut rng),
        v: random_smooth(g, d, 3.0, amp, &mut rng),
    }
    .pack()
}

pub fn structure_check(cfg: &StructureConfig) -> Result<StructureResult> {
    let grid = cfg.grid.build()?;
    let base = PhysParams { tau: 0.1, eps: 1.0, mu: 1.0, lam: 0.5, gamma: 3.0 };

    let mut residual = 0.0f64;
    for k in 0..cfg.states {
        let lam = -0.5 + 0.03 * k as f64;
        let params = PhysParams { lam, gamma: 1.4 + 0.05 * k as f64, tau: 0.02 + 0.01 * k as f64, ..base };
        let sys = System::euler_ns(&grid, params)?;
        let x = random_state(&sys, cfg.amp, cfg.seed + k as u64)?;
        residual = residual.max(relative_velocity_residual(&sys, &x)?);
    }

    let sys = System::euler_ns(&grid, PhysParams { tau: 0.05, ..base })?;
    let mut x = sys.zero_state();
    x.comp_mut(0)[0] = cfg.equilibrium_density.into();
    let mut equilibrium = 0.0f64;
    for kind in [SchemeKind::ExpEuler, SchemeKind::ExpRk2, SchemeKind::ImexBdf2] {
        let mut st = Stepper::new(&sys, kind, cfg.equilibrium_dt)?;
        let mut y = x.clone();
        for _ in 0..cfg.equilibrium_steps {
            y = st.step(&y)?;
        }
        equilibrium = equilibrium.max(y.max_abs_diff(&x));
    }

    let mut partition = 0.0f64;
    for g in &cfg.partition_grids {
        partition = partition.max(LpFamily::new(&g.build()?).partition_residual());
    }

    let verdicts = vec![
        Verdict::at_most("relative_velocity_residual", residual, cfg.residual_tol),
        Verdict::at_most("equilibrium_error", equilibrium, cfg.equilibrium_tol),
        Verdict::at_most("partition_residual", partition, cfg.partition_tol),
    ];
    Ok(StructureResult {
        config: cfg.clone(),
        relative_velocity_residual: residual,
        equilibrium_error: equilibrium,
        partition_residual: partition,
        verdicts,
    })
}

/// Temporal self-convergence of one scheme on a smooth Euler-NS run:
/// `log2(‖x_h − x_{h/2}‖ / ‖x_{h/2} − x_{h/4}‖)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    pub grid: GridSpec,
    pub params: PhysParams,
    pub scheme: SchemeKind,
    pub amp: f64,
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub order_band: (f64, f64),
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            grid: GridSpec::pi_side(2, 32, 2.0),
            params: PhysParams { tau: 0.05, eps: 1.0, mu: 1.0, lam: 0.0, gamma: 3.0 },
            scheme: SchemeKind::ExpRk2,
            amp: 0.3,
            seed: 6,
            dt: 0.02,
            t_end: 0.4,
            order_band: (1.8, 2.3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub config: ConvergenceConfig,
    /// `‖x_h − x_{h/2}‖_{L²}` and `‖x_{h/2} − x_{h/4}‖_{L²}`
    pub differences: (f64, f64),
    pub order: f64,
    pub verdicts: Vec<Verdict>,
}

fn run_to(sys: &System, x: &SpectralField, kind: SchemeKind, dt: f64, t: f64) -> Result<SpectralField> {
    let mut st = Stepper::new(sys, kind, dt)?;
    let mut y = x.clone();
    for _ in 0..(t / dt).round() as usize {
        y = st.step(&y)?;
    }
    Ok(y)
}

pub fn self_convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceResult> {
    let grid = cfg.grid.build()?;
    let sys = System::euler_ns(&grid, cfg.params)?;
    let x = random_state(&sys, cfg.amp, cfg.seed)?.dealiased();
    let a = run_to(&sys, &x, cfg.scheme, cfg.dt, cfg.t_end)?;
    let b = run_to(&sys, &x, cfg.scheme, cfg.dt / 2.0, cfg.t_end)?;
    let c = run_to(&sys, &x, cfg.scheme, cfg.dt / 4.0, cfg.t_end)?;
    let differences = (a.sub(&b).l2_norm(), b.sub(&c).l2_norm());
    let order = (differences.0 / differences.1).log2();
    let verdicts =
        vec![Verdict::within(format!("{}_order", cfg.scheme.name()), order, cfg.order_band.0, cfg.order_band.1)];
    Ok(ConvergenceResult { config: cfg.clone(), differences, order, verdicts })
}
