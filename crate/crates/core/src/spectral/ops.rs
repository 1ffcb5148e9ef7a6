use super::field::SpectralField;
use super::grid::C64;
use crate::error::{Error, Result};

/// Zero-mode magnitude above which negative powers of |ξ| are refused.
pub const ZERO_MODE_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivOp {
    Grad,
    Div,
    Laplacian,
    LambdaS(f64),
}

pub fn apply_derivative(f: &SpectralField, op: DerivOp) -> Result<SpectralField> {
    match op {
        DerivOp::Grad => {
            if f.ncomp() != 1 {
                return Err(Error::ShapeMismatch("grad expects a scalar field".into()));
            }
            Ok(grad(f))
        }
        DerivOp::Div => {
            if f.ncomp() != f.grid().dim() {
                return Err(Error::ShapeMismatch("div expects a vector field".into()));
            }
            Ok(div(f))
        }
        DerivOp::Laplacian => Ok(laplacian(f)),
        DerivOp::LambdaS(s) => lambda_s(f, s),
    }
}

/// `∂_axis` of every component.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let g = f.grid().clone();
    let n = g.len();
    let mut out = f.clone();
    for c in 0..f.ncomp() {
        let src = f.comp(c);
        let dst = out.comp_mut(c);
        for idx in 0..n {
            dst[idx] = src[idx] * C64::new(0.0, g.xi_deriv(idx, axis));
        }
    }
    out
}

pub fn grad(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let d = g.dim();
    let mut out = SpectralField::zeros(&g, d);
    let src = f.comp(0);
    for ax in 0..d {
        let dst = out.comp_mut(ax);
        for idx in 0..g.len() {
            dst[idx] = src[idx] * C64::new(0.0, g.xi_deriv(idx, ax));
        }
    }
    out
}

pub fn div(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let mut out = SpectralField::scalar_zeros(&g);
    for ax in 0..g.dim() {
        let src = f.comp(ax);
        let dst = out.comp_mut(0);
        for idx in 0..g.len() {
            dst[idx] += src[idx] * C64::new(0.0, g.xi_deriv(idx, ax));
        }
    }
    out
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let mut out = f.clone();
    let s = -g.dxi() * g.dxi();
    for c in 0..f.ncomp() {
        let dst = out.comp_mut(c);
        for (idx, z) in dst.iter_mut().enumerate() {
            *z *= s * g.k2(idx) as f64;
        }
    }
    out
}

/// `Λ^s = (-Δ)^{s/2}`, with the zero mode sent to zero.
pub fn lambda_s(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s < 0.0 {
        for c in 0..f.ncomp() {
            let z = f.zero_mode(c).norm();
            if z > ZERO_MODE_TOL {
                return Err(Error::NegativePowerOfZeroMode(z));
            }
        }
    }
    let g = f.grid().clone();
    let mut out = f.clone();
    for c in 0..f.ncomp() {
        let dst = out.comp_mut(c);
        for (idx, z) in dst.iter_mut().enumerate() {
            *z = if idx == 0 { C64::new(0.0, 0.0) } else { *z * g.xi_norm(idx).powf(s) };
        }
    }
    Ok(out)
}

/// Helmholtz split `f = 𝒫f + 𝒬f` into divergence-free and gradient parts.
/// Modes where the derivative frequency vanishes go wholly to `𝒫f`.
pub fn leray_project(f: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let g = f.grid().clone();
    let d = g.dim();
    if f.ncomp() != d {
        return Err(Error::ShapeMismatch("Leray projection expects a vector field".into()));
    }
    let mut q = SpectralField::vector_zeros(&g);
    let n = g.len();
    for idx in 0..n {
        let mut xi = [0.0; 3];
        let mut xi2 = 0.0;
        for (ax, x) in xi.iter_mut().enumerate().take(d) {
            *x = g.xi_deriv(idx, ax);
            xi2 += *x * *x;
        }
        if xi2 == 0.0 {
            continue;
        }
        let mut dot = C64::new(0.0, 0.0);
        for (ax, &x) in xi.iter().enumerate().take(d) {
            dot += f.comp(ax)[idx] * x;
        }
        for (ax, &x) in xi.iter().enumerate().take(d) {
            q.comp_mut(ax)[idx] = dot * (x / xi2);
        }
    }
    let p = f.sub(&q);
    Ok((p, q))
}

/// Curl magnitude check per mode: `max |ξ × q̂(ξ)|` (pairwise components).
pub fn curl_defect(f: &SpectralField) -> f64 {
    let g = f.grid();
    let d = g.dim();
    let mut worst = 0.0f64;
    for idx in 0..g.len() {
        for i in 0..d {
            for j in (i + 1)..d {
                let c = f.comp(j)[idx] * g.xi_deriv(idx, i) - f.comp(i)[idx] * g.xi_deriv(idx, j);
                worst = worst.max(c.norm());
            }
        }
    }
    worst
}
