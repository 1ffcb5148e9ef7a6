use num_complex::Complex64 as C;

use super::expm::expm;
use crate::spectral::PhysParams;

/// Threshold below which `λ2 ≈ λ3` is treated as degenerate, relative to `|ξ|²`.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Threshold on `|1 + τλ|` below which the closed form is abandoned.
pub const RESONANCE_TOL: f64 = 1e-6;

/// Coefficients of the linearized two-velocity system on one frequency:
/// drag rate `κ = 1/τ_eff`, acoustic coupling `c`, compressible viscosity
/// `ν = 2μ+λ` and shear viscosity `μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearCoeffs {
    pub drag: f64,
    pub sound: f64,
    pub nu: f64,
    pub mu: f64,
}

impl LinearCoeffs {
    pub fn new(tau: f64, mu: f64, lam: f64) -> Self {
        LinearCoeffs { drag: 1.0 / tau, sound: 1.0, nu: 2.0 * mu + lam, mu }
    }

    pub fn from_params(p: &PhysParams) -> Self {
        Self::new(p.tau, p.mu, p.lam)
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.drag
    }
}

/// 3×3 compressible symbol on `(φ̂, â, ψ̂)` with `φ = Λ^{-1}div u`,
/// `ψ = Λ^{-1}div v`.
pub fn compressible_symbol(xi: f64, k: &LinearCoeffs) -> [[f64; 3]; 3] {
    [
        [-k.drag, 0.0, k.drag],
        [0.0, 0.0, -k.sound * xi],
        [0.0, k.sound * xi, -k.nu * xi * xi],
    ]
}

/// 2×2 incompressible symbol on `(Φ̂, Ψ̂)`, the transverse parts of `u, v`.
pub fn incompressible_symbol(xi: f64, k: &LinearCoeffs) -> [[f64; 2]; 2] {
    [[-k.drag, k.drag], [0.0, -k.mu * xi * xi]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSet {
    pub lambda1: C,
    pub lambda2: C,
    pub lambda3: C,
    pub lambda4: C,
    pub lambda5: C,
    /// `λ2, λ3` form a complex-conjugate pair.
    pub complex_pair: bool,
    /// `|λ2 − λ3| ≤ DEGENERACY_TOL·|ξ|²`.
    pub degenerate: bool,
}

impl EigenSet {
    pub fn all(&self) -> [C; 5] {
        [self.lambda1, self.lambda2, self.lambda3, self.lambda4, self.lambda5]
    }

    pub fn max_real(&self) -> f64 {
        self.all().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn eigenvalues_with(xi: f64, k: &LinearCoeffs) -> EigenSet {
    let x2 = xi * xi;
    let b = k.nu * x2;
    let q = k.sound * k.sound * x2;
    let disc = b * b - 4.0 * q;
    let (l2, l3, complex_pair) = if disc >= 0.0 {
        let big = -0.5 * (b + disc.sqrt());
        let small = if big != 0.0 { q / big } else { 0.0 };
        (C::new(small, 0.0), C::new(big, 0.0), false)
    } else {
        let im = 0.5 * (-disc).sqrt();
        (C::new(-0.5 * b, im), C::new(-0.5 * b, -im), true)
    };
    let degenerate = (l2 - l3).norm() <= DEGENERACY_TOL * x2;
    EigenSet {
        lambda1: C::new(-k.drag, 0.0),
        lambda2: l2,
        lambda3: l3,
        lambda4: C::new(-k.drag, 0.0),
        lambda5: C::new(-k.mu * x2, 0.0),
        complex_pair,
        degenerate,
    }
}

/// Eigenvalues of the unscaled symbols.
pub fn eigenvalues(xi: f64, tau: f64, mu: f64, lam: f64) -> EigenSet {
    eigenvalues_with(xi, &LinearCoeffs::new(tau, mu, lam))
}

fn phi1(z: C) -> C {
    if z.norm() < 1e-3 {
        C::new(1.0, 0.0) + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Divided difference `(e^{xt} − e^{yt})/(x − y)`, stable as `x → y`.
fn ddexp(x: C, y: C, t: f64) -> C {
    let z = (x - y) * t;
    if z.norm() < 0.5 {
        (y * t).exp() * t * phi1(z)
    } else {
        ((x * t).exp() - (y * t).exp()) / (x - y)
    }
}

/// Which evaluation path produced a propagator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    ClosedForm,
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator {
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 2]; 2],
    pub branch_a: Branch,
    pub branch_b: Branch,
}

fn closed_form_a(xi: f64, k: &LinearCoeffs, e: &EigenSet, t: f64) -> [[f64; 3]; 3] {
    let (l2, l3) = (e.lambda2, e.lambda3);
    let kap = C::new(-k.drag, 0.0);
    let cx = k.sound * xi;
    let d23 = ddexp(l2, l3, t);
    let e2 = (l2 * t).exp();
    let e3 = (l3 * t).exp();
    let ek = (-k.drag * t).exp();
    let g2 = ddexp(l2, kap, t) * k.drag;
    let g3 = ddexp(l3, kap, t) * k.drag;
    let a_a = e3 - l3 * d23;
    let a_psi = -d23 * cx;
    let psi_a = d23 * cx;
    let psi_psi = e2 + l3 * d23;
    let phi_a = (g2 - g3) / (l2 - l3) * cx;
    let phi_psi = (l2 * g2 - l3 * g3) / (l2 - l3);
    [
        [ek, phi_a.re, phi_psi.re],
        [0.0, a_a.re, a_psi.re],
        [0.0, psi_a.re, psi_psi.re],
    ]
}

/// Solution operators `e^{t𝒜}` and `e^{tℬ}` for general coefficients.
pub fn propagator_with(xi: f64, k: &LinearCoeffs, t: f64) -> Propagator {
    let ek = (-k.drag * t).exp();
    if xi == 0.0 {
        return Propagator {
            a: [[ek, 0.0, 1.0 - ek], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            b: [[ek, 1.0 - ek], [0.0, 1.0]],
            branch_a: Branch::ClosedForm,
            branch_b: Branch::ClosedForm,
        };
    }
    let e = eigenvalues_with(xi, k);
    let tau = k.tau();
    let ok_a = !e.degenerate
        && (1.0 + tau * e.lambda2).norm() > RESONANCE_TOL
        && (1.0 + tau * e.lambda3).norm() > RESONANCE_TOL;
    let (a, branch_a) = if ok_a {
        (closed_form_a(xi, k, &e, t), Branch::ClosedForm)
    } else {
        let m = compressible_symbol(xi, k);
        (expm(&super::expm::scale(&m, t)), Branch::Fallback)
    };
    let l5 = e.lambda5.re;
    let (b, branch_b) = if (1.0 + tau * l5).abs() > RESONANCE_TOL {
        let g = ddexp(C::new(l5, 0.0), C::new(-k.drag, 0.0), t).re * k.drag;
        ([[ek, g], [0.0, (l5 * t).exp()]], Branch::ClosedForm)
    } else {
        let m = incompressible_symbol(xi, k);
        (expm(&super::expm::scale(&m, t)), Branch::Fallback)
    };
    Propagator { a, b, branch_a, branch_b }
}

/// Propagators of the unscaled system.
pub fn propagator(xi: f64, tau: f64, mu: f64, lam: f64, t: f64) -> Propagator {
    propagator_with(xi, &LinearCoeffs::new(tau, mu, lam), t)
}

/// Propagators computed by the expm fallback only.
pub fn propagator_expm(xi: f64, k: &LinearCoeffs, t: f64) -> Propagator {
    let ma = compressible_symbol(xi, k);
    let mb = incompressible_symbol(xi, k);
    Propagator {
        a: expm(&super::expm::scale(&ma, t)),
        b: expm(&super::expm::scale(&mb, t)),
        branch_a: Branch::Fallback,
        branch_b: Branch::Fallback,
    }
}

/// Coefficients of the relative velocities `φ̂ − ψ̂` on `(φ̂0, â0, ψ̂0)` and
/// `Φ̂ − Ψ̂` on `(Φ̂0, Ψ̂0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeKernel {
    pub compressible: [f64; 3],
    pub incompressible: [f64; 2],
}

pub fn relative_velocity_kernel_with(xi: f64, k: &LinearCoeffs, t: f64) -> RelativeKernel {
    let p = propagator_with(xi, k, t);
    RelativeKernel {
        compressible: [p.a[0][0] - p.a[2][0], p.a[0][1] - p.a[2][1], p.a[0][2] - p.a[2][2]],
        incompressible: [p.b[0][0] - p.b[1][0], p.b[0][1] - p.b[1][1]],
    }
}

pub fn relative_velocity_kernel(xi: f64, tau: f64, mu: f64, lam: f64, t: f64) -> RelativeKernel {
    relative_velocity_kernel_with(xi, &LinearCoeffs::new(tau, mu, lam), t)
}
