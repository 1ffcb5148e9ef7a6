use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{leray_project, Grid, SpectralField, C64};

/// Random smooth real field with `ncomp` components: Gaussian coefficients
/// on modes `0 < |k| ≤ kmax` (lattice units) with a Gaussian envelope,
/// scaled so that the sup norm over all components equals `amp`.
pub fn random_smooth(grid: &Arc<Grid>, ncomp: usize, kmax: f64, amp: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let n = grid.len();
    let mut data = vec![C64::new(0.0, 0.0); n * ncomp];
    for c in 0..ncomp {
        for idx in 0..n {
            let k2 = grid.k2(idx) as f64;
            if k2 == 0.0 || k2 > kmax * kmax || !grid.keep(idx) {
                continue;
            }
            let env = (-k2 / (kmax * kmax)).exp();
            data[c * n + idx] = C64::new(normal(rng), normal(rng)) * env;
        }
    }
    let mut f = SpectralField::from_coeffs(grid, ncomp, data).expect("sized buffer");
    let sup = f.linf_norm();
    if sup > 0.0 {
        f.scale(amp / sup);
    }
    f
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Divergence-free random smooth vector field.
pub fn random_solenoidal(grid: &Arc<Grid>, kmax: f64, amp: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let f = random_smooth(grid, grid.dim(), kmax, 1.0, rng);
    let (mut p, _) = leray_project(&f).expect("vector field");
    let sup = p.linf_norm();
    if sup > 0.0 {
        p.scale(amp / sup);
    }
    p
}

/// Distance from `x` to `center` on the torus, per axis.
fn periodic_offset(grid: &Grid, x: f64, c: f64) -> f64 {
    let l = grid.side();
    let mut r = x - c;
    r -= l * (r / l).round();
    r
}

/// `amp · exp(−|x − c|²/w²)` with periodic distance, dealiased.
pub fn gaussian(grid: &Arc<Grid>, center: [f64; 3], width: f64, amp: f64) -> SpectralField {
    let d = grid.dim();
    let g = grid.clone();
    SpectralField::from_fn(grid, 1, move |_, x| {
        let r2: f64 = (0..d).map(|i| periodic_offset(&g, x[i], center[i]).powi(2)).sum();
        amp * (-r2 / (width * width)).exp()
    })
    .dealiased()
}

/// Low-frequency radial profile family used for decay data: coefficients
/// `amp · |ξ|^{-(σ1 + d/2)} · e^{-|ξ|²/ξ0²}` times a fixed direction per
/// component, so that `|ξ|^{σ1+d/2}|f̂(ξ)|` stays bounded below near 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawProfile {
    pub sigma1: f64,
    pub cutoff: f64,
    pub amp: f64,
}

/// Scalar field with Fourier coefficients `g(|ξ|)` for `ξ ≠ 0`, normalized
/// so that the coefficients are those of the continuum transform restricted
/// to the lattice (`f̂_k = g(|ξ_k|)/L^d`).
pub fn radial_field(grid: &Arc<Grid>, g: impl Fn(f64) -> f64) -> SpectralField {
    let n = grid.len();
    let vol = grid.volume();
    let mut data = vec![C64::new(0.0, 0.0); n];
    for (idx, z) in data.iter_mut().enumerate() {
        if grid.k2(idx) == 0 || !grid.keep(idx) {
            continue;
        }
        *z = C64::new(g(grid.xi_norm(idx)) / vol, 0.0);
    }
    SpectralField::from_coeffs(grid, 1, data).expect("sized buffer")
}

/// Gradient field `∇Λ^{-1}` of a radial scalar: purely compressible.
pub fn radial_gradient(grid: &Arc<Grid>, g: impl Fn(f64) -> f64) -> SpectralField {
    let s = radial_field(grid, g);
    let n = grid.len();
    let d = grid.dim();
    let mut data = vec![C64::new(0.0, 0.0); n * d];
    for i in 0..d {
        for idx in 0..n {
            let r = grid.xi_norm(idx);
            if r > 0.0 {
                data[i * n + idx] = s.comp(0)[idx] * C64::new(0.0, grid.xi_deriv(idx, i) / r);
            }
        }
    }
    SpectralField::from_coeffs(grid, d, data).expect("sized buffer")
}

impl PowerLawProfile {
    pub fn eval(&self, d: usize, r: f64) -> f64 {
        self.amp * r.powf(-(self.sigma1 + d as f64 / 2.0)) * (-(r / self.cutoff).powi(2)).exp()
    }
}

/// Sharp low-pass filter `1_{|ξ| ≤ radius}`; modes on the sphere are kept
/// up to a relative rounding tolerance of `1e-12`.
pub fn low_pass(f: &SpectralField, radius: f64) -> SpectralField {
    let g = f.grid().clone();
    let n = g.len();
    let mut out = f.clone();
    for c in 0..f.ncomp() {
        let dst = out.comp_mut(c);
        for idx in 0..n {
            if g.xi_norm(idx) > radius * (1.0 + 1e-12) {
                dst[idx] = C64::new(0.0, 0.0);
            }
        }
    }
    out
}
