use std::sync::Arc;

use super::state::{Layout, SystemKind};
use crate::error::{Error, Result};
use crate::linear::LinearCoeffs;
use crate::spectral::{leray_project, Grid, PhysParams, SpectralField, C64};

/// Default lower bound on the gas density `1 + εa`.
pub const N_MIN: f64 = 0.1;
/// Default lower bound on the mixture density `1 + ερ + εa`.
pub const MIX_MIN: f64 = 0.05;
/// Pointwise tolerance on the positivity of the transported density.
pub const RHO_TOL: f64 = 1e-10;

/// `g(εa)/ε` with `g(a) = 1 − (1+a)^{γ−2}`.
pub fn g_scaled(a: f64, eps: f64, gamma: f64) -> f64 {
    -((gamma - 2.0) * (eps * a).ln_1p()).exp_m1() / eps
}

/// `f(a) = −a/(1+a)`.
pub fn f_of(a: f64) -> f64 {
    -a / (1.0 + a)
}

/// Pointwise `(g(a), f(a))` on a gas perturbation field, dealiased.
pub fn pressure_terms(a: &SpectralField, gamma: f64) -> Result<(SpectralField, SpectralField)> {
    pressure_terms_with(a, gamma, N_MIN)
}

pub fn pressure_terms_with(a: &SpectralField, gamma: f64, n_min: f64) -> Result<(SpectralField, SpectralField)> {
    let g = a.grid().clone();
    let phys = a.to_physical();
    let min_n = phys[0].iter().fold(f64::INFINITY, |m, &x| m.min(1.0 + x));
    if min_n <= n_min {
        return Err(Error::VacuumGas(min_n));
    }
    let gv: Vec<f64> = phys[0].iter().map(|&x| g_scaled(x, 1.0, gamma)).collect();
    let fv: Vec<f64> = phys[0].iter().map(|&x| f_of(x)).collect();
    let mut gf = SpectralField::from_physical(&g, &[gv])?;
    let mut ff = SpectralField::from_physical(&g, &[fv])?;
    gf.dealias();
    ff.dealias();
    Ok((gf, ff))
}

/// Right-hand side of one system variant, split into a linear part applied
/// mode-wise and a pseudo-spectral nonlinear remainder.
#[derive(Clone, Debug)]
pub struct System {
    pub kind: SystemKind,
    pub params: PhysParams,
    pub grid: Arc<Grid>,
    pub n_min: f64,
    pub mix_min: f64,
}

pub(crate) fn deriv(g: &Grid, src: &[C64], axis: usize) -> Vec<C64> {
    src.iter().enumerate().map(|(idx, z)| z * C64::new(0.0, g.xi_deriv(idx, axis))).collect()
}

fn spectral_div(g: &Grid, comps: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); g.len()];
    for (ax, c) in comps.iter().enumerate() {
        for (idx, z) in c.iter().enumerate() {
            out[idx] += z * C64::new(0.0, g.xi_deriv(idx, ax));
        }
    }
    out
}

/// `μΔv + (μ+λ)∇div v` per component.
pub(crate) fn viscous(g: &Grid, v: &[&[C64]], mu: f64, lam: f64) -> Vec<Vec<C64>> {
    let d = g.dim();
    let dxi2 = g.dxi() * g.dxi();
    let mut out = vec![vec![C64::new(0.0, 0.0); g.len()]; d];
    for idx in 0..g.len() {
        let k2 = g.k2(idx) as f64 * dxi2;
        let mut dot = C64::new(0.0, 0.0);
        for (ax, vc) in v.iter().enumerate() {
            dot += vc[idx] * g.xi_deriv(idx, ax);
        }
        for (i, o) in out.iter_mut().enumerate() {
            o[idx] = -v[i][idx] * (mu * k2) - dot * ((mu + lam) * g.xi_deriv(idx, i));
        }
    }
    out
}

fn forward_dealiased(g: &Grid, fields: &[Vec<f64>]) -> Vec<Vec<C64>> {
    let refs: Vec<&[f64]> = fields.iter().map(|v| v.as_slice()).collect();
    let mut out = g.to_spectral(&refs);
    for c in out.iter_mut() {
        g.dealias(c);
    }
    out
}

impl System {
    pub fn new(kind: SystemKind, grid: &Arc<Grid>, params: PhysParams) -> Result<Self> {
        params.validate()?;
        Ok(System { kind, params, grid: grid.clone(), n_min: N_MIN, mix_min: MIX_MIN })
    }

    pub fn euler_ns(grid: &Arc<Grid>, params: PhysParams) -> Result<Self> {
        Self::new(SystemKind::EulerNs, grid, params)
    }

    pub fn df(grid: &Arc<Grid>, params: PhysParams) -> Result<Self> {
        Self::new(SystemKind::Df, grid, params)
    }

    pub fn tns(grid: &Arc<Grid>, params: PhysParams) -> Result<Self> {
        Self::new(SystemKind::Tns, grid, params)
    }

    pub fn df_scaled(grid: &Arc<Grid>, params: PhysParams) -> Result<Self> {
        Self::new(SystemKind::DfScaled, grid, params)
    }

    pub fn euler_ns_scaled(grid: &Arc<Grid>, params: PhysParams) -> Result<Self> {
        Self::new(SystemKind::EulerNsScaled, grid, params)
    }

    pub fn layout(&self) -> Layout {
        self.kind.layout(self.grid.dim())
    }

    /// Mach number entering the equations (1 for unscaled variants).
    pub fn eps(&self) -> f64 {
        match self.kind {
            SystemKind::DfScaled | SystemKind::EulerNsScaled => self.params.eps,
            _ => 1.0,
        }
    }

    /// Coefficients of the per-mode linear symbol.
    pub fn linear_coeffs(&self) -> LinearCoeffs {
        let p = &self.params;
        let eps = self.eps();
        if self.kind == SystemKind::Tns {
            return LinearCoeffs { drag: 1.0 / p.tau, sound: 0.0, nu: p.mu, mu: p.mu };
        }
        LinearCoeffs { drag: 1.0 / (eps * p.tau), sound: 1.0 / eps, nu: p.nu(), mu: p.mu }
    }

    pub fn zero_state(&self) -> SpectralField {
        SpectralField::zeros(&self.grid, self.layout().ncomp)
    }

    fn check_shape(&self, x: &SpectralField) -> Result<()> {
        if x.ncomp() != self.layout().ncomp || x.grid().len() != self.grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} state needs {} components, got {}",
                self.kind.name(),
                self.layout().ncomp,
                x.ncomp()
            )));
        }
        Ok(())
    }

    /// Linear part `L X`, applied mode-wise.
    pub fn apply_linear(&self, x: &SpectralField) -> SpectralField {
        let g = &self.grid;
        let lay = self.layout();
        let d = g.dim();
        let k = self.linear_coeffs();
        let lam = if self.kind == SystemKind::Tns { -self.params.mu } else { self.params.lam };
        let mut out = SpectralField::zeros(g, lay.ncomp);
        let vs: Vec<&[C64]> = (0..d).map(|i| x.comp(lay.v + i)).collect();
        let visc = viscous(g, &vs, self.params.mu, lam);
        for i in 0..d {
            out.comp_mut(lay.v + i).copy_from_slice(&visc[i]);
        }
        if let Some(ui) = lay.u {
            for i in 0..d {
                let (u, v) = (x.comp(ui + i).to_vec(), x.comp(lay.v + i));
                let dst = out.comp_mut(ui + i);
                for idx in 0..g.len() {
                    dst[idx] = -(u[idx] - v[idx]) * k.drag;
                }
            }
        }
        if let Some(ai) = lay.a {
            let divv = spectral_div(g, &vs.iter().map(|c| c.to_vec()).collect::<Vec<_>>());
            let a = x.comp(ai).to_vec();
            let dst = out.comp_mut(ai);
            for idx in 0..g.len() {
                dst[idx] = -divv[idx] * k.sound;
            }
            for i in 0..d {
                let dst = out.comp_mut(lay.v + i);
                for idx in 0..g.len() {
                    dst[idx] -= a[idx] * C64::new(0.0, g.xi_deriv(idx, i)) * k.sound;
                }
            }
        }
        out
    }

    /// Nonlinear remainder `N(X) = rhs(X) − L X`, dealiased.
    pub fn nonlinear(&self, x: &SpectralField) -> Result<SpectralField> {
        self.check_shape(x)?;
        match self.kind {
            SystemKind::EulerNs | SystemKind::EulerNsScaled => self.nonlinear_two_velocity(x),
            SystemKind::Df | SystemKind::DfScaled => self.nonlinear_drift_flux(x),
            SystemKind::Tns => self.nonlinear_tns(x),
        }
    }

    /// Full time derivative.
    pub fn rhs(&self, x: &SpectralField) -> Result<SpectralField> {
        let mut out = self.nonlinear(x)?;
        out.axpy(1.0, &self.apply_linear(x));
        Ok(out)
    }

    fn nonlinear_two_velocity(&self, x: &SpectralField) -> Result<SpectralField> {
        let g = &self.grid;
        let d = g.dim();
        let p = &self.params;
        let eps = self.eps();
        let lay = self.layout();
        let (ui, ai, vi) = (lay.u.unwrap(), lay.a.unwrap(), lay.v);
        let lam = p.lam;

        let vs: Vec<&[C64]> = (0..d).map(|i| x.comp(vi + i)).collect();
        let mut coeffs: Vec<Vec<C64>> = Vec::with_capacity(2 + 2 * d + 2 * d * d + 2 * d);
        coeffs.push(x.comp(0).to_vec());
        coeffs.push(x.comp(ai).to_vec());
        for i in 0..d {
            coeffs.push(x.comp(ui + i).to_vec());
        }
        for i in 0..d {
            coeffs.push(x.comp(vi + i).to_vec());
        }
        for i in 0..d {
            for j in 0..d {
                coeffs.push(deriv(g, x.comp(ui + i), j));
            }
        }
        for i in 0..d {
            for j in 0..d {
                coeffs.push(deriv(g, x.comp(vi + i), j));
            }
        }
        for j in 0..d {
            coeffs.push(deriv(g, x.comp(ai), j));
        }
        coeffs.extend(viscous(g, &vs, p.mu, lam));
        let refs: Vec<&[C64]> = coeffs.iter().map(|c| c.as_slice()).collect();
        let ph = g.to_physical(&refs);

        let o_u = 2;
        let o_v = 2 + d;
        let o_du = 2 + 2 * d;
        let o_dv = o_du + d * d;
        let o_da = o_dv + d * d;
        let o_visc = o_da + d;

        let np = g.len();
        let mut outs = vec![vec![0.0; np]; 4 * d];
        let inv_tau = 1.0 / p.tau;
        let mut min_n = f64::INFINITY;
        for q in 0..np {
            let rho = ph[0][q];
            let a = ph[1][q];
            let n = 1.0 + eps * a;
            min_n = min_n.min(n);
            let gs = g_scaled(a, eps, p.gamma);
            let fs = 1.0 / n - 1.0;
            for i in 0..d {
                let ui_ = ph[o_u + i][q];
                let vi_ = ph[o_v + i][q];
                let mut adv_u = 0.0;
                let mut adv_v = 0.0;
                for j in 0..d {
                    adv_u += ph[o_u + j][q] * ph[o_du + i * d + j][q];
                    adv_v += ph[o_v + j][q] * ph[o_dv + i * d + j][q];
                }
                outs[i][q] = rho * ui_;
                outs[d + i][q] = -adv_u;
                outs[2 * d + i][q] = a * vi_;
                outs[3 * d + i][q] = -adv_v
                    + gs * ph[o_da + i][q]
                    + fs * ph[o_visc + i][q]
                    + inv_tau * rho * (ui_ - vi_) / n;
            }
        }
        if min_n <= self.n_min {
            return Err(Error::VacuumGas(min_n));
        }
        let sp = forward_dealiased(g, &outs);
        let mut out = SpectralField::zeros(g, lay.ncomp);
        let div_rho = spectral_div(g, &sp[0..d]);
        let div_a = spectral_div(g, &sp[2 * d..3 * d]);
        for (o, z) in out.comp_mut(0).iter_mut().zip(&div_rho) {
            *o = -z;
        }
        for (o, z) in out.comp_mut(ai).iter_mut().zip(&div_a) {
            *o = -z;
        }
        for i in 0..d {
            out.comp_mut(ui + i).copy_from_slice(&sp[d + i]);
            out.comp_mut(vi + i).copy_from_slice(&sp[3 * d + i]);
        }
        Ok(out)
    }

    fn nonlinear_drift_flux(&self, x: &SpectralField) -> Result<SpectralField> {
        let g = &self.grid;
        let d = g.dim();
        let p = &self.params;
        let eps = self.eps();
        let lay = self.layout();
        let (ai, vi) = (lay.a.unwrap(), lay.v);

        let vs: Vec<&[C64]> = (0..d).map(|i| x.comp(vi + i)).collect();
        let mut coeffs: Vec<Vec<C64>> = Vec::new();
        coeffs.push(x.comp(0).to_vec());
        coeffs.push(x.comp(ai).to_vec());
        for i in 0..d {
            coeffs.push(x.comp(vi + i).to_vec());
        }
        for i in 0..d {
            for j in 0..d {
                coeffs.push(deriv(g, x.comp(vi + i), j));
            }
        }
        for j in 0..d {
            coeffs.push(deriv(g, x.comp(ai), j));
        }
        coeffs.extend(viscous(g, &vs, p.mu, p.lam));
        let refs: Vec<&[C64]> = coeffs.iter().map(|c| c.as_slice()).collect();
        let ph = g.to_physical(&refs);
        let o_v = 2;
        let o_dv = 2 + d;
        let o_da = o_dv + d * d;
        let o_visc = o_da + d;

        let np = g.len();
        let mut outs = vec![vec![0.0; np]; 3 * d];
        let mut min_m = f64::INFINITY;
        for q in 0..np {
            let rho = ph[0][q];
            let a = ph[1][q];
            let m = 1.0 + eps * (rho + a);
            min_m = min_m.min(m);
            let pterm = (((p.gamma - 1.0) * (eps * a).ln_1p()).exp_m1() - eps * (rho + a)) / (eps * m);
            let vfac = -eps * (rho + a) / m;
            for i in 0..d {
                let vi_ = ph[o_v + i][q];
                let mut adv = 0.0;
                for j in 0..d {
                    adv += ph[o_v + j][q] * ph[o_dv + i * d + j][q];
                }
                outs[i][q] = rho * vi_;
                outs[d + i][q] = a * vi_;
                outs[2 * d + i][q] = -adv - pterm * ph[o_da + i][q] + vfac * ph[o_visc + i][q];
            }
        }
        if min_m <= self.mix_min {
            return Err(Error::DegenerateMixture(min_m));
        }
        let sp = forward_dealiased(g, &outs);
        let mut out = SpectralField::zeros(g, lay.ncomp);
        let div_rho = spectral_div(g, &sp[0..d]);
        let div_a = spectral_div(g, &sp[d..2 * d]);
        for (o, z) in out.comp_mut(0).iter_mut().zip(&div_rho) {
            *o = -z;
        }
        for (o, z) in out.comp_mut(ai).iter_mut().zip(&div_a) {
            *o = -z;
        }
        for i in 0..d {
            out.comp_mut(vi + i).copy_from_slice(&sp[2 * d + i]);
        }
        Ok(out)
    }

    fn nonlinear_tns(&self, x: &SpectralField) -> Result<SpectralField> {
        let g = &self.grid;
        let d = g.dim();
        let vi = self.layout().v;
        let mut coeffs: Vec<Vec<C64>> = Vec::new();
        coeffs.push(x.comp(0).to_vec());
        for i in 0..d {
            coeffs.push(x.comp(vi + i).to_vec());
        }
        for i in 0..d {
            for j in 0..d {
                coeffs.push(deriv(g, x.comp(vi + i), j));
            }
        }
        let refs: Vec<&[C64]> = coeffs.iter().map(|c| c.as_slice()).collect();
        let ph = g.to_physical(&refs);
        let np = g.len();
        let mut outs = vec![vec![0.0; np]; 2 * d];
        for q in 0..np {
            for i in 0..d {
                let mut adv = 0.0;
                for j in 0..d {
                    adv += ph[1 + j][q] * ph[1 + d + i * d + j][q];
                }
                outs[i][q] = ph[0][q] * ph[1 + i][q];
                outs[d + i][q] = -adv;
            }
        }
        let sp = forward_dealiased(g, &outs);
        let mut out = SpectralField::zeros(g, self.layout().ncomp);
        let div_rho = spectral_div(g, &sp[0..d]);
        for (o, z) in out.comp_mut(0).iter_mut().zip(&div_rho) {
            *o = -z;
        }
        let mut adv = SpectralField::vector_zeros(g);
        for i in 0..d {
            adv.comp_mut(i).copy_from_slice(&sp[d + i]);
        }
        let (pw, _) = leray_project(&adv)?;
        for i in 0..d {
            out.comp_mut(vi + i).copy_from_slice(pw.comp(i));
        }
        Ok(out)
    }

    /// Pointwise admissibility of a state: gas and mixture densities bounded
    /// away from zero, transported density nonnegative up to [`RHO_TOL`],
    /// solenoidal velocity for the incompressible system, finite values.
    pub fn check_state(&self, x: &SpectralField, rho_tol: f64) -> Result<()> {
        self.check_shape(x)?;
        if x.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::StepRejected("non-finite coefficients".into()));
        }
        let lay = self.layout();
        let eps = self.eps();
        let rho = x.component(0).to_physical().remove(0);
        let min_rho = rho.iter().copied().fold(f64::INFINITY, f64::min);
        if min_rho < -rho_tol {
            return Err(Error::StepRejected(format!("transported density undershoot {min_rho:e}")));
        }
        if let Some(ai) = lay.a {
            let a = x.component(ai).to_physical().remove(0);
            match self.kind {
                SystemKind::EulerNs | SystemKind::EulerNsScaled => {
                    let m = a.iter().map(|&v| 1.0 + eps * v).fold(f64::INFINITY, f64::min);
                    if m <= self.n_min {
                        return Err(Error::VacuumGas(m));
                    }
                }
                _ => {
                    let m = a.iter().zip(&rho).map(|(&v, &r)| 1.0 + eps * (v + r)).fold(f64::INFINITY, f64::min);
                    if m <= self.mix_min {
                        return Err(Error::DegenerateMixture(m));
                    }
                }
            }
        }
        if self.kind == SystemKind::Tns {
            let d = self.grid.dim();
            let w = SpectralField::stack(&(0..d).map(|i| x.component(lay.v + i)).collect::<Vec<_>>().iter().collect::<Vec<_>>())?;
            let div = crate::spectral::div(&w);
            let scale = w.l2_norm().max(1e-300);
            let defect = div.l2_norm() / (scale * self.grid.max_kept_xi().max(1.0));
            if defect > 1e-10 {
                return Err(Error::StepRejected(format!("div w relative defect {defect:e}")));
            }
        }
        Ok(())
    }
}
