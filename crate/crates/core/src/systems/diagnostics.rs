use super::model::{deriv, System};
use super::state::SystemKind;
use crate::error::{Error, Result};
use crate::spectral::{laplacian, SpectralField, C64};

/// Spatial integral `∫ f g dx` of two real fields, by Parseval.
pub fn inner(f: &[C64], g: &[C64], volume: f64) -> f64 {
    volume * f.iter().zip(g).map(|(a, b)| (a * b.conj()).re).sum::<f64>()
}

/// Effective mixed velocity `V = (ερu + nv)/(ερ + n)`, `n = 1 + εa`,
/// for a two-velocity state.
pub fn effective_mixed_velocity(x: &SpectralField, eps: f64) -> Result<SpectralField> {
    let g = x.grid().clone();
    let d = g.dim();
    let lay = SystemKind::EulerNs.layout(d);
    let mut comps: Vec<&[C64]> = vec![x.comp(0), x.comp(lay.a.unwrap())];
    for i in 0..d {
        comps.push(x.comp(lay.u.unwrap() + i));
    }
    for i in 0..d {
        comps.push(x.comp(lay.v + i));
    }
    let ph = g.to_physical(&comps);
    let mut out = vec![vec![0.0; g.len()]; d];
    for q in 0..g.len() {
        let r = eps * ph[0][q];
        let n = 1.0 + eps * ph[1][q];
        let m = r + n;
        if m <= 0.0 {
            return Err(Error::DegenerateMixture(m));
        }
        for i in 0..d {
            out[i][q] = (r * ph[2 + i][q] + n * ph[2 + d + i][q]) / m;
        }
    }
    let mut v = SpectralField::from_physical(&g, &out)?;
    v.dealias();
    Ok(v)
}

/// Rate `d/dt ∫(ρu + (1+a)v) dx` per component, evaluated from a state and
/// its time derivative.
pub fn momentum_rate(x: &SpectralField, dx: &SpectralField) -> Vec<f64> {
    let g = x.grid();
    let d = g.dim();
    let lay = SystemKind::EulerNs.layout(d);
    let vol = g.volume();
    let (ai, ui, vi) = (lay.a.unwrap(), lay.u.unwrap(), lay.v);
    (0..d)
        .map(|i| {
            inner(dx.comp(0), x.comp(ui + i), vol)
                + inner(x.comp(0), dx.comp(ui + i), vol)
                + inner(dx.comp(ai), x.comp(vi + i), vol)
                + inner(x.comp(ai), dx.comp(vi + i), vol)
                + dx.comp(vi + i)[0].re * vol
        })
        .collect()
}

/// Total momentum `∫(ρu + (1+a)v) dx` per component of a two-velocity state.
pub fn total_momentum(x: &SpectralField) -> Vec<f64> {
    let g = x.grid();
    let d = g.dim();
    let lay = SystemKind::EulerNs.layout(d);
    let vol = g.volume();
    (0..d)
        .map(|i| {
            inner(x.comp(0), x.comp(lay.u.unwrap() + i), vol)
                + inner(x.comp(lay.a.unwrap()), x.comp(lay.v + i), vol)
                + x.comp(lay.v + i)[0].re * vol
        })
        .collect()
}

/// Scale `∫(ρ|u| + (1+a)|v|) dx` used to normalize momentum drift.
pub fn momentum_scale(x: &SpectralField) -> f64 {
    let g = x.grid();
    let d = g.dim();
    let lay = SystemKind::EulerNs.layout(d);
    let mut comps: Vec<&[C64]> = vec![x.comp(0), x.comp(lay.a.unwrap())];
    for i in 0..d {
        comps.push(x.comp(lay.u.unwrap() + i));
    }
    for i in 0..d {
        comps.push(x.comp(lay.v + i));
    }
    let ph = g.to_physical(&comps);
    let mut s = 0.0;
    for q in 0..g.len() {
        let mu: f64 = (0..d).map(|i| ph[2 + i][q].powi(2)).sum::<f64>().sqrt();
        let mv: f64 = (0..d).map(|i| ph[2 + d + i][q].powi(2)).sum::<f64>().sqrt();
        s += ph[0][q].abs() * mu + (1.0 + ph[1][q]) * mv;
    }
    s * g.cell_volume()
}

/// Checks the relative-velocity equation: `∂t(u − v)` from the system
/// right-hand side against the rearranged form
/// `−(u−v)/τ + ∇a − μΔv − (μ+λ)∇div v − u·∇u + v·∇v − ρ(u−v)/τ − F1 − F2`,
/// evaluated along an independent code path. Returns the relative `L²`
/// discrepancy.
pub fn relative_velocity_residual(sys: &System, x: &SpectralField) -> Result<f64> {
    if sys.kind != SystemKind::EulerNs {
        return Err(Error::InvalidParams("relative velocity residual needs the unscaled two-velocity system".into()));
    }
    let g = sys.grid.clone();
    let d = g.dim();
    let p = sys.params;
    let lay = sys.layout();
    let (ui, ai, vi) = (lay.u.unwrap(), lay.a.unwrap(), lay.v);
    let rhs = sys.rhs(x)?;
    let mut lhs = SpectralField::vector_zeros(&g);
    for i in 0..d {
        let dst = lhs.comp_mut(i);
        for idx in 0..g.len() {
            dst[idx] = rhs.comp(ui + i)[idx] - rhs.comp(vi + i)[idx];
        }
    }

    let v = SpectralField::stack(&(0..d).map(|i| x.component(vi + i)).collect::<Vec<_>>().iter().collect::<Vec<_>>())?;
    let lap_v = laplacian(&v);
    let div_v = crate::spectral::div(&v);
    let grad_div_v = crate::spectral::grad(&div_v);
    let grad_a = crate::spectral::grad(&x.component(ai));

    let mut coeffs: Vec<Vec<C64>> = vec![x.comp(0).to_vec(), x.comp(ai).to_vec()];
    for i in 0..d {
        coeffs.push(x.comp(ui + i).to_vec());
    }
    for i in 0..d {
        coeffs.push(x.comp(vi + i).to_vec());
    }
    for i in 0..d {
        for j in 0..d {
            coeffs.push(deriv(&g, x.comp(ui + i), j));
        }
    }
    for i in 0..d {
        for j in 0..d {
            coeffs.push(deriv(&g, x.comp(vi + i), j));
        }
    }
    for i in 0..d {
        coeffs.push(grad_a.comp(i).to_vec());
    }
    for i in 0..d {
        coeffs.push(lap_v.comp(i).to_vec());
    }
    for i in 0..d {
        coeffs.push(grad_div_v.comp(i).to_vec());
    }
    let refs: Vec<&[C64]> = coeffs.iter().map(|c| c.as_slice()).collect();
    let ph = g.to_physical(&refs);
    let (o_u, o_v) = (2, 2 + d);
    let o_du = 2 + 2 * d;
    let o_dv = o_du + d * d;
    let o_ga = o_dv + d * d;
    let o_lap = o_ga + d;
    let o_gd = o_lap + d;
    let mut out = vec![vec![0.0; g.len()]; d];
    for q in 0..g.len() {
        let rho = ph[0][q];
        let a = ph[1][q];
        let gg = 1.0 - (1.0 + a).powf(p.gamma - 2.0);
        let ff = -a / (1.0 + a);
        for i in 0..d {
            let w = ph[o_u + i][q] - ph[o_v + i][q];
            let mut adv_u = 0.0;
            let mut adv_v = 0.0;
            for j in 0..d {
                adv_u += ph[o_u + j][q] * ph[o_du + i * d + j][q];
                adv_v += ph[o_v + j][q] * ph[o_dv + i * d + j][q];
            }
            let f1 = gg * ph[o_ga + i][q] + p.mu * ff * ph[o_lap + i][q] + (p.mu + p.lam) * ff * ph[o_gd + i][q];
            let f2 = ff * rho * w / p.tau;
            out[i][q] = -w / p.tau + ph[o_ga + i][q] - p.mu * ph[o_lap + i][q] - (p.mu + p.lam) * ph[o_gd + i][q]
                - adv_u
                + adv_v
                - rho * w / p.tau
                - f1
                - f2;
        }
    }
    let mut r = SpectralField::from_physical(&g, &out)?;
    r.dealias();
    let scale = lhs.l2_norm().max(r.l2_norm()).max(1e-300);
    Ok(lhs.sub(&r).l2_norm() / scale)
}

/// Discrepancy between the conservative momentum derivative
/// `∂t((ρ+n)v) = −div((ρ+n)v⊗v) − ∇P(n) + μΔv + (μ+λ)∇div v` and the
/// product rule applied to the non-conservative drift-flux right-hand side.
/// Returns the relative `L²` discrepancy.
pub fn df_momentum_residual(sys: &System, x: &SpectralField) -> Result<f64> {
    if sys.kind != SystemKind::Df {
        return Err(Error::InvalidParams("conservative check needs the unscaled drift-flux system".into()));
    }
    let g = sys.grid.clone();
    let d = g.dim();
    let p = sys.params;
    let rhs = sys.rhs(x)?;
    let v = SpectralField::stack(&(0..d).map(|i| x.component(2 + i)).collect::<Vec<_>>().iter().collect::<Vec<_>>())?;
    let visc = crate::spectral::laplacian(&v).scaled(p.mu).add(
        &crate::spectral::grad(&crate::spectral::div(&v)).scaled(p.mu + p.lam),
    );

    let mut comps: Vec<&[C64]> = vec![x.comp(0), x.comp(1), rhs.comp(0), rhs.comp(1)];
    for i in 0..d {
        comps.push(x.comp(2 + i));
    }
    for i in 0..d {
        comps.push(rhs.comp(2 + i));
    }
    let ph = g.to_physical(&comps);
    let np = g.len();
    // non-conservative: (ρ+n)∂t v + v ∂t(ρ+n)
    let mut nc = vec![vec![0.0; np]; d];
    // fluxes (ρ+n) v_i v_j and pressure P(n)
    let mut flux = vec![vec![0.0; np]; d * d];
    let mut pres = vec![0.0; np];
    for q in 0..np {
        let m = ph[0][q] + 1.0 + ph[1][q];
        let dm = ph[2][q] + ph[3][q];
        for i in 0..d {
            nc[i][q] = m * ph[4 + d + i][q] + ph[4 + i][q] * dm;
            for j in 0..d {
                flux[i * d + j][q] = m * ph[4 + i][q] * ph[4 + j][q];
            }
        }
        pres[q] = p.pressure(1.0 + ph[1][q]);
    }
    let mut ncf = SpectralField::from_physical(&g, &nc)?;
    ncf.dealias();
    let mut fl = SpectralField::from_physical(&g, &flux)?;
    fl.dealias();
    let mut pf = SpectralField::from_physical(&g, &[pres])?;
    pf.dealias();
    let gp = crate::spectral::grad(&pf);
    let mut cons = visc.sub(&gp);
    for i in 0..d {
        let row = SpectralField::stack(
            &(0..d).map(|j| fl.component(i * d + j)).collect::<Vec<_>>().iter().collect::<Vec<_>>(),
        )?;
        let dv = crate::spectral::div(&row);
        let dst = cons.comp_mut(i);
        for (o, z) in dst.iter_mut().zip(dv.comp(0)) {
            *o -= z;
        }
    }
    let scale = cons.l2_norm().max(ncf.l2_norm()).max(1e-300);
    Ok(cons.sub(&ncf).l2_norm() / scale)
}

/// `div(ρu)` for a two-velocity state (or `div(ρv)` for drift-flux).
pub fn density_flux_divergence(sys: &System, x: &SpectralField) -> Result<SpectralField> {
    let g = &sys.grid;
    let d = g.dim();
    let lay = sys.layout();
    let vel = lay.u.unwrap_or(lay.v);
    let mut comps: Vec<&[C64]> = vec![x.comp(0)];
    for i in 0..d {
        comps.push(x.comp(vel + i));
    }
    let ph = g.to_physical(&comps);
    let flux: Vec<Vec<f64>> = (0..d).map(|i| ph[0].iter().zip(&ph[1 + i]).map(|(r, u)| r * u).collect()).collect();
    let mut f = SpectralField::from_physical(g, &flux)?;
    f.dealias();
    Ok(crate::spectral::div(&f))
}

/// Trapezoid accumulation of `ρ∞ = ρ0 − ∫ div(ρu) dt` along a trajectory.
#[derive(Clone, Debug)]
pub struct ProfileAccumulator {
    rho0: SpectralField,
    integral: SpectralField,
    last: Option<(f64, SpectralField)>,
    last_norm: f64,
}

/// Threshold on `‖div(ρu)‖_{L²}` at the final time.
pub const TAIL_TOL: f64 = 1e-8;

impl ProfileAccumulator {
    pub fn new(rho0: SpectralField) -> Self {
        let integral = SpectralField::scalar_zeros(rho0.grid());
        ProfileAccumulator { rho0, integral, last: None, last_norm: f64::INFINITY }
    }

    pub fn push(&mut self, t: f64, div_flux: SpectralField) {
        if let Some((t0, prev)) = &self.last {
            let h = 0.5 * (t - t0);
            self.integral.axpy(h, prev);
            self.integral.axpy(h, &div_flux);
        }
        self.last_norm = div_flux.l2_norm();
        self.last = Some((t, div_flux));
    }

    pub fn last_norm(&self) -> f64 {
        self.last_norm
    }

    /// Profile with the integral truncated at the last sample; fails when
    /// the flux has not decayed below `tol`.
    pub fn finish(&self, tol: f64) -> Result<SpectralField> {
        if self.last_norm >= tol {
            return Err(Error::TailNotConverged(self.last_norm));
        }
        Ok(self.current())
    }

    /// Profile with the integral truncated at the last sample, no tail check.
    pub fn current(&self) -> SpectralField {
        self.rho0.sub(&self.integral)
    }
}

/// `ρ∞` from stored `(t, ρ, u)` samples.
pub fn asymptotic_profile(samples: &[(f64, SpectralField, SpectralField)], tol: f64) -> Result<SpectralField> {
    let first = samples.first().ok_or(Error::InsufficientSamples { needed: 1, got: 0 })?;
    let g = first.1.grid().clone();
    let d = g.dim();
    let mut acc = ProfileAccumulator::new(first.1.clone());
    for (t, rho, u) in samples {
        let mut comps: Vec<&[C64]> = vec![rho.comp(0)];
        for i in 0..d {
            comps.push(u.comp(i));
        }
        let ph = g.to_physical(&comps);
        let flux: Vec<Vec<f64>> = (0..d).map(|i| ph[0].iter().zip(&ph[1 + i]).map(|(r, w)| r * w).collect()).collect();
        let mut f = SpectralField::from_physical(&g, &flux)?;
        f.dealias();
        let dv = crate::spectral::div(&f);
        acc.push(*t, dv);
    }
    acc.finish(tol)
}
