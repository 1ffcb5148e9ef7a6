use serde::{Deserialize, Serialize};

use super::step::{cfl_dt, Scheme, Stepper};
use crate::besov::{BlockTimeSeries, LpFamily};
use crate::error::{Error, Result};
use crate::spectral::{leray_project, SpectralField};
use crate::systems::{effective_mixed_velocity, momentum_scale, total_momentum, System, SystemKind};

/// Quantity extracted from a packed state for Besov bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// transported density (`ρ` or `ϱ`)
    Rho,
    U,
    A,
    /// carrier velocity (`v` or `w`)
    V,
    /// `(u, v)` jointly
    Uv,
    /// `(u, a, v)` jointly
    Uav,
    /// `u − v`
    RelVel,
    /// compressible part `𝒬v`
    QV,
    /// `(a, 𝒬v)` jointly
    AQv,
    /// `(a, 𝒬u, 𝒬v)` jointly
    AQuQv,
    /// solenoidal part `𝒫v`
    PV,
    /// effective mixed velocity `V`
    Mixed,
}

fn slice(x: &SpectralField, start: usize, count: usize) -> Result<SpectralField> {
    let parts: Vec<SpectralField> = (start..start + count).map(|c| x.component(c)).collect();
    SpectralField::stack(&parts.iter().collect::<Vec<_>>())
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Rho => "rho",
            Quantity::U => "u",
            Quantity::A => "a",
            Quantity::V => "v",
            Quantity::Uv => "uv",
            Quantity::Uav => "uav",
            Quantity::RelVel => "u_minus_v",
            Quantity::QV => "qv",
            Quantity::AQv => "a_qv",
            Quantity::AQuQv => "a_qu_qv",
            Quantity::PV => "pv",
            Quantity::Mixed => "mixed_velocity",
        }
    }

    /// Extracts the quantity from a state of `sys`.
    pub fn extract(self, sys: &System, x: &SpectralField) -> Result<SpectralField> {
        let lay = sys.layout();
        let d = lay.dim;
        let missing = |what: &str| Error::InvalidParams(format!("{} has no {what}", sys.kind.name()));
        let u = || lay.u.ok_or_else(|| missing("u")).and_then(|ui| slice(x, ui, d));
        let a = || lay.a.map(|ai| x.component(ai)).ok_or_else(|| missing("a"));
        let v = || slice(x, lay.v, d);
        match self {
            Quantity::Rho => Ok(x.component(0)),
            Quantity::U => u(),
            Quantity::A => a(),
            Quantity::V => v(),
            Quantity::Uv => SpectralField::stack(&[&u()?, &v()?]),
            Quantity::Uav => SpectralField::stack(&[&u()?, &a()?, &v()?]),
            Quantity::RelVel => Ok(u()?.sub(&v()?)),
            Quantity::QV => Ok(leray_project(&v()?)?.1),
            Quantity::AQv => SpectralField::stack(&[&a()?, &leray_project(&v()?)?.1]),
            Quantity::AQuQv => {
                SpectralField::stack(&[&a()?, &leray_project(&u()?)?.1, &leray_project(&v()?)?.1])
            }
            Quantity::PV => Ok(leray_project(&v()?)?.0),
            Quantity::Mixed => match sys.kind {
                SystemKind::EulerNs | SystemKind::EulerNsScaled => effective_mixed_velocity(x, sys.eps()),
                _ => v(),
            },
        }
    }
}

/// One Besov observable: block `L^p` norms of a quantity at every sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observer {
    pub quantity: Quantity,
    pub p: f64,
}

impl Observer {
    pub fn new(quantity: Quantity, p: f64) -> Self {
        Observer { quantity, p }
    }

    pub fn label(&self) -> String {
        format!("{}_p{}", self.quantity.name(), self.p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// upper bound on the number of sampling intervals
    pub max_samples: usize,
    /// keep every k-th sampled state (none when `None`)
    pub checkpoint_every: Option<usize>,
    /// `Diverged` once the sup norm exceeds this multiple of the initial one
    pub diverge_factor: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_samples: 2000, checkpoint_every: None, diverge_factor: 1e3 }
    }
}

/// Sampled history of one run.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub system: SystemKind,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub observers: Vec<Observer>,
    pub series: Vec<BlockTimeSeries>,
    /// `∫ρ dx` and, when present, `∫n dx` per sample
    pub mass: Vec<Vec<f64>>,
    /// `∫(ρu + nv) dx` per sample (two-velocity systems only)
    pub momentum: Vec<Vec<f64>>,
    /// `∫(ρ|u| + n|v|) dx` at `t = 0`
    pub momentum_scale: f64,
    pub sup_norm: Vec<f64>,
    #[serde(skip)]
    pub checkpoints: Vec<(f64, SpectralField)>,
    #[serde(skip)]
    pub final_state: Option<SpectralField>,
}

impl Trajectory {
    pub fn series(&self, obs: &Observer) -> Option<&BlockTimeSeries> {
        self.observers.iter().position(|o| o == obs).map(|i| &self.series[i])
    }

    /// Largest relative deviation of the conserved masses from their initial
    /// values.
    pub fn mass_drift(&self) -> f64 {
        drift(&self.mass)
    }

    /// Largest change of any momentum component relative to
    /// [`Trajectory::momentum_scale`].
    pub fn momentum_drift(&self) -> f64 {
        let Some(first) = self.momentum.first() else { return 0.0 };
        let worst = self
            .momentum
            .iter()
            .flat_map(|r| r.iter().zip(first).map(|(x, x0)| (x - x0).abs()))
            .fold(0.0, f64::max);
        if self.momentum_scale > 0.0 {
            worst / self.momentum_scale
        } else {
            worst
        }
    }
}

fn drift(rows: &[Vec<f64>]) -> f64 {
    let Some(first) = rows.first() else { return 0.0 };
    let mut worst = 0.0f64;
    for (c, &x0) in first.iter().enumerate() {
        let scale = rows.iter().map(|r| r[c].abs()).fold(x0.abs(), f64::max).max(1e-300);
        for r in rows {
            worst = worst.max((r[c] - x0).abs() / scale);
        }
    }
    worst
}

/// Step size and sample spacing for a run of length `t_end`: the sample
/// interval is `max(dt, t_end / max_samples)` and is an integer multiple of
/// the step.
pub fn plan_steps(dt_target: f64, t_end: f64, max_samples: usize) -> (f64, usize, usize) {
    if t_end <= 0.0 {
        return (dt_target, 0, 0);
    }
    let n_samples = ((t_end / dt_target).ceil() as usize).clamp(1, max_samples.max(1));
    let interval = t_end / n_samples as f64;
    let per_sample = (interval / dt_target).ceil().max(1.0) as usize;
    (interval / per_sample as f64, n_samples, per_sample)
}

/// Integrates `x0` to `t_end`, invoking `visit` at every sample time
/// (including `t = 0`). Returns the final state, the step and the step count.
pub fn integrate_with(
    sys: &System,
    x0: &SpectralField,
    t_end: f64,
    scheme: &Scheme,
    opts: &RunOptions,
    mut visit: impl FnMut(f64, &SpectralField) -> Result<()>,
) -> Result<(SpectralField, f64, usize)> {
    scheme.validate()?;
    if !(t_end >= 0.0) {
        return Err(Error::InvalidParams(format!("horizon must be nonnegative, got {t_end}")));
    }
    let mut x = x0.dealiased();
    x.enforce_hermitian();
    sys.check_state(&x, crate::systems::RHO_TOL)?;
    let target = match scheme.dt {
        Some(dt) => dt.min(scheme.dt_max),
        None => cfl_dt(sys, &x, scheme),
    };
    let (dt, n_samples, per_sample) = plan_steps(target, t_end, opts.max_samples);
    visit(0.0, &x)?;
    if n_samples == 0 {
        return Ok((x, dt, 0));
    }
    let sup0 = x.linf_norm();
    let mut stepper = Stepper::new(sys, scheme.kind, dt)?;
    stepper.project_momentum = scheme.project_momentum;
    let mut steps = 0;
    for s in 1..=n_samples {
        for _ in 0..per_sample {
            x = stepper.step(&x)?;
            steps += 1;
        }
        let t = if s == n_samples { t_end } else { (s * per_sample) as f64 * dt };
        let sup = x.linf_norm();
        if !sup.is_finite() || (sup0 > 0.0 && sup > opts.diverge_factor * sup0) {
            return Err(Error::Diverged { time: t, value: sup });
        }
        visit(t, &x)?;
    }
    Ok((x, dt, steps))
}

/// Integrates and records the requested observables, conserved integrals and
/// optional checkpoints.
pub fn integrate(
    sys: &System,
    x0: &SpectralField,
    t_end: f64,
    scheme: &Scheme,
    observers: &[Observer],
    opts: &RunOptions,
) -> Result<Trajectory> {
    integrate_observed(sys, x0, t_end, scheme, observers, opts, |_, _| Ok(()))
}

/// [`integrate`] with an additional per-sample callback.
pub fn integrate_observed(
    sys: &System,
    x0: &SpectralField,
    t_end: f64,
    scheme: &Scheme,
    observers: &[Observer],
    opts: &RunOptions,
    mut extra: impl FnMut(f64, &SpectralField) -> Result<()>,
) -> Result<Trajectory> {
    let family = LpFamily::new(&sys.grid);
    let lay = sys.layout();
    let two_velocity = lay.u.is_some();
    let mut traj = Trajectory {
        system: sys.kind,
        dt: 0.0,
        steps: 0,
        times: Vec::new(),
        observers: observers.to_vec(),
        series: observers.iter().map(|o| BlockTimeSeries::new(&family, o.p)).collect(),
        mass: Vec::new(),
        momentum: Vec::new(),
        momentum_scale: 0.0,
        sup_norm: Vec::new(),
        checkpoints: Vec::new(),
        final_state: None,
    };
    let mut count = 0usize;
    let (xf, dt, steps) = integrate_with(sys, x0, t_end, scheme, opts, |t, x| {
        traj.times.push(t);
        for (o, s) in observers.iter().zip(traj.series.iter_mut()) {
            let q = o.quantity.extract(sys, x)?;
            s.push(t, family.block_norms(&q, o.p)?);
        }
        let mut m = vec![x.integral(0)];
        if let Some(ai) = lay.a {
            m.push(sys.grid.volume() + sys.eps() * x.integral(ai));
        }
        traj.mass.push(m);
        if two_velocity && sys.kind == SystemKind::EulerNs {
            if traj.momentum.is_empty() {
                traj.momentum_scale = momentum_scale(x);
            }
            traj.momentum.push(total_momentum(x));
        }
        traj.sup_norm.push(x.linf_norm());
        if let Some(k) = opts.checkpoint_every {
            if count % k.max(1) == 0 {
                traj.checkpoints.push((t, x.clone()));
            }
        }
        count += 1;
        extra(t, x)
    })?;
    traj.dt = dt;
    traj.steps = steps;
    traj.final_state = Some(xf);
    Ok(traj)
}
