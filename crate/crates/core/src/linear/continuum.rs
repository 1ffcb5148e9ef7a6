use std::f64::consts::PI;
use std::sync::Arc;

use super::symbol::{propagator_with, LinearCoeffs};
use crate::besov::Chi;
use crate::error::{Error, Result};

pub const XI_MIN: f64 = 1e-4;
pub const XI_MAX: f64 = 64.0;
const GL_POINTS: usize = 8;
const REL_TOL: f64 = 1e-6;
const MAX_PANELS: usize = 512;

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial Fourier profiles of the initial data, as functions of `|ξ|`:
/// longitudinal parts `φ̂0, ψ̂0` of `u0, v0`, transverse parts `Φ̂0, Ψ̂0`,
/// and `â0`. Missing entries are zero.
#[derive(Clone, Default)]
pub struct RadialInit {
    pub phi0: Option<Profile>,
    pub a0: Option<Profile>,
    pub psi0: Option<Profile>,
    pub big_phi0: Option<Profile>,
    pub big_psi0: Option<Profile>,
}

fn ev(p: &Option<Profile>, r: f64) -> f64 {
    p.as_ref().map_or(0.0, |f| f(r))
}

impl RadialInit {
    pub fn with_a0(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.a0 = Some(Arc::new(f));
        self
    }
    pub fn with_phi0(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.phi0 = Some(Arc::new(f));
        self
    }
    pub fn with_psi0(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.psi0 = Some(Arc::new(f));
        self
    }
    pub fn with_big_phi0(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.big_phi0 = Some(Arc::new(f));
        self
    }
    pub fn with_big_psi0(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.big_psi0 = Some(Arc::new(f));
        self
    }
}

/// Groups of unknowns whose joint norm is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    U,
    A,
    V,
    /// `(u, v)` jointly
    UV,
    /// `(u, a, v)` jointly
    All,
    /// `u − v`
    RelVel,
    /// transverse part of `v` alone (pure heat flow)
    Heat,
}

pub const CHANNELS: [Channel; 7] =
    [Channel::U, Channel::A, Channel::V, Channel::UV, Channel::All, Channel::RelVel, Channel::Heat];

fn channel_sq(ch: Channel, x: &[f64; 3], y: &[f64; 2]) -> f64 {
    let [phi, a, psi] = *x;
    let [bphi, bpsi] = *y;
    match ch {
        Channel::U => phi * phi + bphi * bphi,
        Channel::A => a * a,
        Channel::V => psi * psi + bpsi * bpsi,
        Channel::UV => phi * phi + bphi * bphi + psi * psi + bpsi * bpsi,
        Channel::All => phi * phi + bphi * bphi + a * a + psi * psi + bpsi * bpsi,
        Channel::RelVel => (phi - psi).powi(2) + (bphi - bpsi).powi(2),
        Channel::Heat => bpsi * bpsi,
    }
}

/// Norms of one channel of the linear solution at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelNorms {
    pub channel: Channel,
    /// `Ḃ^σ_{2,1}`
    pub b_sigma: f64,
    /// `Ḃ^{σ1}_{2,∞}`
    pub b_sigma1_weak: f64,
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn sphere_area(d: usize) -> f64 {
    match d {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d),
    }
}

fn gamma_half(d: usize) -> f64 {
    // Γ(d/2) for d = 1..
    let mut g = if d % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut k = if d % 2 == 0 { 1.0 } else { 0.5 };
    while k < d as f64 / 2.0 {
        g *= k;
        k += 1.0;
    }
    g
}

/// Dyadic-annulus radial quadrature of `‖Δ_j X(t)‖²_{L²(ℝ^d)}` for every
/// channel, with a fixed number of panels per block.
fn block_integrals(
    d: usize,
    k: &LinearCoeffs,
    init: &RadialInit,
    t: f64,
    panels: usize,
    chi: &Chi,
    js: &[i32],
) -> Vec<[f64; 7]> {
    let (gx, gw) = gauss_legendre(GL_POINTS);
    let measure = sphere_area(d) / (2.0 * PI).powi(d as i32);
    js.iter()
        .map(|&j| {
            let scale = 2f64.powi(j);
            let lo = (0.75 * scale).max(XI_MIN);
            let hi = (8.0 / 3.0 * scale).min(XI_MAX);
            let mut acc = [0.0; 7];
            if hi <= lo {
                return acc;
            }
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let c = lo + (p as f64 + 0.5) * h;
                for (xg, wg) in gx.iter().zip(&gw) {
                    let r = c + 0.5 * h * xg;
                    let wphi = chi.phi(r / scale);
                    if wphi == 0.0 {
                        continue;
                    }
                    let prop = propagator_with(r, k, t);
                    let x0 = [ev(&init.phi0, r), ev(&init.a0, r), ev(&init.psi0, r)];
                    let y0 = [ev(&init.big_phi0, r), ev(&init.big_psi0, r)];
                    let x = super::expm::matvec(&prop.a, &x0);
                    let y = super::expm::matvec(&prop.b, &y0);
                    let wt = 0.5 * h * wg * wphi * wphi * r.powi(d as i32 - 1) * measure;
                    for (ci, ch) in CHANNELS.iter().enumerate() {
                        acc[ci] += wt * channel_sq(*ch, &x, &y);
                    }
                }
            }
            acc
        })
        .collect()
}

fn assemble(js: &[i32], blocks: &[[f64; 7]], sigma: f64, sigma1: f64) -> Vec<ChannelNorms> {
    CHANNELS
        .iter()
        .enumerate()
        .map(|(ci, &ch)| {
            let mut s21 = 0.0;
            let mut weak = 0.0f64;
            for (&j, b) in js.iter().zip(blocks) {
                let n = b[ci].max(0.0).sqrt();
                s21 += 2f64.powf(j as f64 * sigma) * n;
                weak = weak.max(2f64.powf(j as f64 * sigma1) * n);
            }
            ChannelNorms { channel: ch, b_sigma: s21, b_sigma1_weak: weak }
        })
        .collect()
}

/// Besov norms of the linear solution over continuous frequency in `ℝ^d`,
/// for every [`Channel`]. Doubles the panel count until the `Ḃ^σ_{2,1}`
/// values change by at most `1e-6` relative.
pub fn continuum_linear_norms(
    d: usize,
    k: &LinearCoeffs,
    init: &RadialInit,
    sigma: f64,
    sigma1: f64,
    t: f64,
) -> Result<Vec<ChannelNorms>> {
    let chi = Chi::new();
    let j_min = (XI_MIN * 3.0 / 8.0).log2().floor() as i32;
    let j_max = (XI_MAX * 4.0 / 3.0).log2().ceil() as i32;
    let js: Vec<i32> = (j_min..=j_max).collect();
    let mut panels = 4;
    let mut prev = assemble(&js, &block_integrals(d, k, init, t, panels, &chi, &js), sigma, sigma1);
    loop {
        panels *= 2;
        let cur = assemble(&js, &block_integrals(d, k, init, t, panels, &chi, &js), sigma, sigma1);
        let change = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| {
                let scale = b.b_sigma.abs().max(1e-300);
                (a.b_sigma - b.b_sigma).abs() / scale
            })
            .fold(0.0, f64::max);
        if change <= REL_TOL {
            return Ok(cur);
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged(change));
        }
        prev = cur;
    }
}

pub fn channel(norms: &[ChannelNorms], ch: Channel) -> ChannelNorms {
    *norms.iter().find(|n| n.channel == ch).expect("every channel is computed")
}
