use serde::{Deserialize, Serialize};

use super::table::ModeTable;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::systems::{g_scaled, total_momentum, System, SystemKind, RHO_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// `X1 = e^{dt L}(X + dt N(X))`
    ExpEuler,
    /// Exponential (Lawson) midpoint rule.
    ExpRk2,
    /// Second-order semi-implicit backward differentiation, started with one
    /// `ExpRk2` step.
    ImexBdf2,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ExpEuler => "exp_euler",
            SchemeKind::ExpRk2 => "exp_rk2",
            SchemeKind::ImexBdf2 => "imex_bdf2",
        }
    }
}

/// Time-stepping configuration. With `dt = None` the step is chosen from
/// [`cfl_dt`] at the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scheme {
    pub kind: SchemeKind,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_safety")]
    pub cfl_safety: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    /// restore total momentum after each step (unscaled Euler-NS only)
    #[serde(default = "default_projection")]
    pub project_momentum: bool,
}

fn default_projection() -> bool {
    true
}

fn default_safety() -> f64 {
    0.4
}

fn default_dt_max() -> f64 {
    0.05
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme { kind: SchemeKind::ExpRk2, dt: None, cfl_safety: 0.4, dt_max: 0.05, project_momentum: true }
    }
}

impl Scheme {
    pub fn new(kind: SchemeKind) -> Self {
        Scheme { kind, ..Default::default() }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_dt_max(mut self, dt_max: f64) -> Self {
        self.dt_max = dt_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParams(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety)));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::InvalidParams(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        Ok(())
    }
}

/// Limits on the explicit part of a step at a given state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CflLimits {
    /// `dx / max transport or nonlinear acoustic speed`
    pub advective: f64,
    /// inverse of the largest explicit variable-coefficient diffusion rate
    pub viscous: f64,
    /// `τ n / ρ` for the drag feedback acting on the carrier phase
    pub drag_feedback: f64,
}

impl CflLimits {
    pub fn min(&self) -> f64 {
        self.advective.min(self.viscous).min(self.drag_feedback)
    }
}

/// Explicit stability limits of `sys` at state `x`. The linear drag,
/// acoustic and viscous operators are exact and impose no restriction.
pub fn cfl_limits(sys: &System, x: &SpectralField) -> CflLimits {
    let g = &sys.grid;
    let d = g.dim();
    let lay = sys.layout();
    let p = &sys.params;
    let eps = sys.eps();
    let ph = x.to_physical();
    let np = g.len();
    let mut speed = 0.0f64;
    let mut visc_rate = 0.0f64;
    let mut drag = 0.0f64;
    let vec_mag = |off: usize, q: usize| (0..d).map(|i| ph[off + i][q].powi(2)).sum::<f64>().sqrt();
    for q in 0..np {
        let rho = ph[0][q];
        speed = speed.max(vec_mag(lay.v, q)).max(rho.abs());
        if let Some(ui) = lay.u {
            speed = speed.max(vec_mag(ui, q));
        }
        if let Some(ai) = lay.a {
            let a = ph[ai][q];
            speed = speed.max(a.abs()).max(g_scaled(a, eps, p.gamma).abs());
            let n = 1.0 + eps * a;
            match sys.kind {
                SystemKind::EulerNs | SystemKind::EulerNsScaled => {
                    visc_rate = visc_rate.max((1.0 / n - 1.0).abs());
                    drag = drag.max(rho.abs() / (p.tau * n));
                }
                _ => {
                    let m = 1.0 + eps * (rho + a);
                    visc_rate = visc_rate.max((eps * (rho + a) / m).abs());
                }
            }
        }
    }
    let xi2 = g.max_kept_xi().powi(2);
    CflLimits {
        advective: if speed > 0.0 { g.dx() / speed } else { f64::INFINITY },
        viscous: if visc_rate > 0.0 { 1.0 / (visc_rate * p.nu().max(p.mu) * xi2) } else { f64::INFINITY },
        drag_feedback: if drag > 0.0 { 1.0 / drag } else { f64::INFINITY },
    }
}

/// `cfl_safety · min(limits, dt_max)`.
pub fn cfl_dt(sys: &System, x: &SpectralField, scheme: &Scheme) -> f64 {
    (scheme.cfl_safety * cfl_limits(sys, x).min()).min(scheme.dt_max)
}

/// Advances a state with a fixed step.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub sys: System,
    pub kind: SchemeKind,
    pub dt: f64,
    full: ModeTable,
    half: ModeTable,
    bdf: Option<ModeTable>,
    history: Option<(SpectralField, SpectralField)>,
    pub rho_tol: f64,
    pub project_momentum: bool,
}

impl Stepper {
    pub fn new(sys: &System, kind: SchemeKind, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
        }
        let full = ModeTable::propagators(sys, dt);
        let half = ModeTable::propagators(sys, 0.5 * dt);
        let bdf = (kind == SchemeKind::ImexBdf2).then(|| ModeTable::resolvents(sys, 1.5, dt));
        Ok(Stepper { sys: sys.clone(), kind, dt, full, half, bdf, history: None, rho_tol: RHO_TOL, project_momentum: true })
    }

    pub fn table(&self) -> &ModeTable {
        &self.full
    }

    /// Forgets multistep history.
    pub fn reset(&mut self) {
        self.history = None;
    }

    fn rk2(&self, x: &SpectralField, n0: &SpectralField) -> Result<SpectralField> {
        let h = self.dt;
        let mut stage = x.clone();
        stage.axpy(0.5 * h, n0);
        self.half.apply_in_place(&mut stage);
        let n1 = self.sys.nonlinear(&stage)?;
        let mut out = self.full.apply(x);
        let mut kick = n1;
        self.half.apply_in_place(&mut kick);
        out.axpy(h, &kick);
        Ok(out)
    }

    /// One step without the admissibility check.
    pub fn advance(&mut self, x: &SpectralField) -> Result<SpectralField> {
        let h = self.dt;
        let n0 = self.sys.nonlinear(x)?;
        let mut out = match self.kind {
            SchemeKind::ExpEuler => {
                let mut y = x.clone();
                y.axpy(h, &n0);
                self.full.apply_in_place(&mut y);
                y
            }
            SchemeKind::ExpRk2 => self.rk2(x, &n0)?,
            SchemeKind::ImexBdf2 => match self.history.take() {
                None => {
                    let y = self.rk2(x, &n0)?;
                    self.history = Some((x.clone(), n0));
                    y
                }
                Some((xp, np)) => {
                    let mut rhs = x.scaled(2.0);
                    rhs.axpy(-0.5, &xp);
                    rhs.axpy(2.0 * h, &n0);
                    rhs.axpy(-h, &np);
                    self.bdf.as_ref().expect("resolvent table").apply_in_place(&mut rhs);
                    self.history = Some((x.clone(), n0));
                    rhs
                }
            },
        };
        if self.project_momentum && self.sys.kind == SystemKind::EulerNs {
            restore_momentum(x, &mut out);
        }
        out.enforce_hermitian();
        out.dealias();
        Ok(out)
    }

    /// One step followed by the state admissibility check.
    pub fn step(&mut self, x: &SpectralField) -> Result<SpectralField> {
        let out = self.advance(x)?;
        self.sys.check_state(&out, self.rho_tol)?;
        Ok(out)
    }
}

/// Shifts the means of `u` and `v` by a common vector so that `∫(ρu + nv)`
/// of `out` equals that of `x`. The relative velocity is untouched.
fn restore_momentum(x: &SpectralField, out: &mut SpectralField) {
    let g = out.grid().clone();
    let d = g.dim();
    let lay = SystemKind::EulerNs.layout(d);
    let (ui, ai) = (lay.u.unwrap(), lay.a.unwrap());
    let total_mass = out.integral(0) + g.volume() + out.integral(ai);
    if !(total_mass > 0.0) {
        return;
    }
    let before = total_momentum(x);
    let after = total_momentum(out);
    for i in 0..d {
        let shift = (before[i] - after[i]) / total_mass;
        out.comp_mut(ui + i)[0] += shift;
        out.comp_mut(lay.v + i)[0] += shift;
    }
}

/// Applies `e^{t L}` of `sys` to a state.
pub fn linear_flow(sys: &System, x: &SpectralField, t: f64) -> SpectralField {
    ModeTable::propagators(sys, t).apply(x)
}
