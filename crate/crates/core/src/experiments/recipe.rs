use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::data::{gaussian, low_pass, radial_field, random_smooth, PowerLawProfile};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField, C64};
use crate::systems::{DfState, EulerNsState, System, SystemKind, TnsState};

/// Shape of the velocity and gas-density perturbations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum DataFamily {
    /// sums of Gaussian bumps of the given width
    Gaussian { width: f64 },
    /// random smooth fields on lattice modes `|k| ≤ kmax`
    Random { kmax: f64 },
    /// radial power law `|ξ|^{-(σ1+d/2)} e^{-|ξ|²/ξ0²}` centred near the box
    /// middle with seeded offsets
    PowerLaw { sigma1: f64, cutoff: f64 },
}

/// Initial-data recipe shared by all runs and studies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataRecipe {
    pub family: DataFamily,
    /// sup norm of each of `a0` and `v0`
    pub amp: f64,
    /// sup norm of `u0 − v0` in units of `amp` (ignored when prepared)
    pub mismatch: f64,
    /// peak of the transported density
    pub rho_amp: f64,
    /// width of the transported-density bump
    pub rho_width: f64,
    /// constant added to the transported density
    pub rho_floor: f64,
    /// well-prepared data have `u0 = v0`
    pub prepared: bool,
    pub seed: u64,
}

impl Default for DataRecipe {
    fn default() -> Self {
        DataRecipe {
            family: DataFamily::Gaussian { width: 4.0 },
            amp: 0.05,
            mismatch: 1.0,
            rho_amp: 0.1,
            rho_width: 6.0,
            rho_floor: 0.0,
            prepared: false,
            seed: 7,
        }
    }
}

impl DataRecipe {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.amp >= 0.0 && self.amp.is_finite()) {
            return bad(format!("amp must be nonnegative, got {}", self.amp));
        }
        if !(self.mismatch >= 0.0 && self.mismatch.is_finite()) {
            return bad(format!("mismatch must be nonnegative, got {}", self.mismatch));
        }
        if !(self.rho_amp >= 0.0 && self.rho_amp.is_finite()) {
            return bad(format!("rho_amp must be nonnegative, got {}", self.rho_amp));
        }
        if !(self.rho_floor >= 0.0 && self.rho_floor.is_finite()) {
            return bad(format!("rho_floor must be nonnegative, got {}", self.rho_floor));
        }
        if !(self.rho_width > 0.0) {
            return bad(format!("rho_width must be positive, got {}", self.rho_width));
        }
        match self.family {
            DataFamily::Gaussian { width } if !(width > 0.0) => bad(format!("width must be positive, got {width}")),
            DataFamily::Random { kmax } if !(kmax >= 1.0) => bad(format!("kmax must be at least 1, got {kmax}")),
            DataFamily::PowerLaw { cutoff, .. } if !(cutoff > 0.0) => {
                bad(format!("cutoff must be positive, got {cutoff}"))
            }
            _ => Ok(()),
        }
    }
}

/// Perturbation fields `(a0, v0, u0 − v0)` and the density `ρ0 ≥ 0`.
pub struct DataFields {
    pub rho: SpectralField,
    pub a: SpectralField,
    pub v: SpectralField,
    pub w: SpectralField,
}

fn normalized(mut f: SpectralField, amp: f64) -> SpectralField {
    let sup = f.linf_norm();
    if sup > 0.0 {
        f.scale(amp / sup);
    }
    f
}

fn center(g: &Grid, shift: [f64; 3]) -> [f64; 3] {
    let l = g.side();
    [0.5 * l + shift[0], 0.5 * l + shift[1], 0.5 * l + shift[2]]
}

/// Vector field mixing `∇φ1` and the rotated gradient of `φ2` (first two
/// axes), both Gaussian bumps.
fn gaussian_vector(g: &Arc<Grid>, width: f64, c1: [f64; 3], c2: [f64; 3]) -> SpectralField {
    let d = g.dim();
    let p1 = gaussian(g, c1, width, width);
    let p2 = gaussian(g, c2, width, width);
    let g1 = crate::spectral::grad(&p1);
    let g2 = crate::spectral::grad(&p2);
    let mut out = g1.clone();
    out.comp_mut(0).iter_mut().zip(g2.comp(1)).for_each(|(o, s)| *o -= *s);
    out.comp_mut(1).iter_mut().zip(g2.comp(0)).for_each(|(o, s)| *o += *s);
    if d == 3 {
        out.comp_mut(2).iter_mut().zip(g2.comp(0)).for_each(|(o, s)| *o += 0.5 * *s);
    }
    out
}

/// Radial power-law scalar centred near the middle of the box: the centre
/// is offset by a seeded amount of at most `1/cutoff` per axis.
fn power_scalar(g: &Arc<Grid>, prof: PowerLawProfile, rng: &mut ChaCha8Rng) -> SpectralField {
    use rand::Rng;
    let d = g.dim();
    let mut f = radial_field(g, |r| prof.eval(d, r));
    let reach = 1.0 / prof.cutoff;
    let shift: Vec<f64> = (0..d).map(|_| 0.5 * g.side() + reach * rng.gen_range(-1.0..1.0)).collect();
    let n = g.len();
    let data = f.comp_mut(0);
    for (idx, z) in data.iter_mut().enumerate().take(n) {
        let phase: f64 = (0..d).map(|i| g.xi(idx, i) * shift[i]).sum();
        *z *= C64::from_polar(1.0, -phase);
    }
    f.enforce_hermitian();
    f
}

fn power_vector(g: &Arc<Grid>, prof: PowerLawProfile, rng: &mut ChaCha8Rng) -> SpectralField {
    let d = g.dim();
    let comps: Vec<SpectralField> = (0..d).map(|_| power_scalar(g, prof, rng)).collect();
    SpectralField::stack(&comps.iter().collect::<Vec<_>>()).expect("scalar parts")
}

impl DataRecipe {
    /// Builds the raw fields on `grid`. All are dealiased, Hermitian and
    /// deterministic in the seed.
    pub fn fields(&self, grid: &Arc<Grid>) -> Result<DataFields> {
        self.validate()?;
        let g = grid;
        let d = g.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut rho = gaussian(g, center(g, [0.0; 3]), self.rho_width, self.rho_amp);
        rho.comp_mut(0)[0] += self.rho_floor;
        let q = self.rho_width / 3.0;
        let (a, v, w) = match self.family {
            DataFamily::Gaussian { width } => {
                let a = gaussian(g, center(g, [q, -q, 0.0]), width, 1.0);
                let v = gaussian_vector(g, width, center(g, [-q, 0.0, q]), center(g, [0.0, q, -q]));
                let w = gaussian_vector(g, width, center(g, [q, q, 0.0]), center(g, [-q, -q, 0.0]));
                (a, v, w)
            }
            DataFamily::Random { kmax } => {
                let a = random_smooth(g, 1, kmax, 1.0, &mut rng);
                let v = random_smooth(g, d, kmax, 1.0, &mut rng);
                let w = random_smooth(g, d, kmax, 1.0, &mut rng);
                (a, v, w)
            }
            DataFamily::PowerLaw { sigma1, cutoff } => {
                let prof = PowerLawProfile { sigma1, cutoff, amp: 1.0 };
                let a = power_scalar(g, prof, &mut rng);
                let v = power_vector(g, prof, &mut rng);
                let w = power_vector(g, prof, &mut rng);
                (a, v, w)
            }
        };
        let w = if self.prepared { SpectralField::zeros(g, d) } else { normalized(w.dealiased(), self.amp * self.mismatch) };
        Ok(DataFields {
            rho,
            a: normalized(a.dealiased(), self.amp),
            v: normalized(v.dealiased(), self.amp),
            w,
        })
    }

    /// Packed initial state of `sys`. The incompressible system receives the
    /// Leray projection of `v0` and `ϱ0 = ρ0`.
    pub fn build(&self, sys: &System) -> Result<SpectralField> {
        let f = self.fields(&sys.grid)?;
        match sys.kind {
            SystemKind::EulerNs | SystemKind::EulerNsScaled => {
                EulerNsState { u: f.v.add(&f.w), rho: f.rho, a: f.a, v: f.v }.pack()
            }
            SystemKind::Df | SystemKind::DfScaled => DfState { rho: f.rho, a: f.a, v: f.v }.pack(),
            SystemKind::Tns => {
                let (w, _) = crate::spectral::leray_project(&f.v)?;
                TnsState { varrho: f.rho, w }.pack()
            }
        }
    }
}

/// Euler-NS data attached to drift-flux data `(ρ0, a0, v0)`:
/// `ρ0^τ = ρ0 + bump·τ e^{−|x−c|²}`, `u0^τ` the sharp low-pass of `v0` at
/// radius `1/√τ`, `a0^τ = a0`, `v0^τ = v0`.
pub fn coupled_euler_ns_data(df_state: &SpectralField, tau: f64, bump: f64) -> Result<SpectralField> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParams(format!("tau must be positive, got {tau}")));
    }
    if !(bump >= 0.0 && bump.is_finite()) {
        return Err(Error::InvalidParams(format!("bump must be nonnegative, got {bump}")));
    }
    let s = DfState::unpack(df_state);
    let g = s.rho.grid().clone();
    let bump = gaussian(&g, center(&g, [0.0; 3]), 1.0, bump * tau);
    let u = low_pass(&s.v, 1.0 / tau.sqrt());
    EulerNsState { rho: s.rho.add(&bump), u, a: s.a, v: s.v }.pack()
}
