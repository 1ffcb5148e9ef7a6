//! Torus grids, spectral fields, derivative multipliers, dealiasing and the
//! Helmholtz/Leray projectors.

mod field;
mod grid;
mod ops;
pub mod snapshot;

pub use field::SpectralField;
pub use grid::{Grid, C64};
pub use ops::{
    apply_derivative, curl_defect, div, grad, lambda_s, laplacian, leray_project, partial, DerivOp,
    ZERO_MODE_TOL,
};

/// Physical parameters shared by all system variants.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysParams {
    pub tau: f64,
    pub eps: f64,
    pub mu: f64,
    pub lam: f64,
    pub gamma: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams { tau: 0.1, eps: 1.0, mu: 1.0, lam: 0.0, gamma: 3.0 }
    }
}

impl PhysParams {
    pub fn validate(&self) -> crate::Result<()> {
        let bad = |m: String| Err(crate::Error::InvalidParams(m));
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(2.0 * self.mu + self.lam > 0.0) {
            return bad(format!("2 mu + lambda must be positive, got {}", 2.0 * self.mu + self.lam));
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        Ok(())
    }

    /// Viscous coefficient of the compressible block, `2μ + λ`.
    pub fn nu(&self) -> f64 {
        2.0 * self.mu + self.lam
    }

    /// `P(n) = n^γ/γ`.
    pub fn pressure(&self, n: f64) -> f64 {
        n.powf(self.gamma) / self.gamma
    }

    pub fn pressure_prime(&self, n: f64) -> f64 {
        n.powf(self.gamma - 1.0)
    }
}
