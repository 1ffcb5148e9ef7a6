use serde::{Deserialize, Serialize};

use super::family::LpFamily;
use crate::error::{Error, Result};
use crate::spectral::{SpectralField, C64};

/// Integrability exponent. Only `1, 2, 4, ∞` are supported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Lp {
    One,
    Two,
    Four,
    Inf,
}

impl Lp {
    pub fn from_f64(p: f64) -> Result<Lp> {
        if p == 1.0 {
            Ok(Lp::One)
        } else if p == 2.0 {
            Ok(Lp::Two)
        } else if p == 4.0 {
            Ok(Lp::Four)
        } else if p.is_infinite() && p > 0.0 {
            Ok(Lp::Inf)
        } else {
            Err(Error::UnsupportedP(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Lp::One => 1.0,
            Lp::Two => 2.0,
            Lp::Four => 4.0,
            Lp::Inf => f64::INFINITY,
        }
    }
}

/// Which part of the dyadic range a norm runs over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Part {
    Full,
    /// `j ≤ j0`
    Low(i32),
    /// `j ≥ j0 − 1`
    High(i32),
}

impl Part {
    pub fn contains(self, j: i32) -> bool {
        match self {
            Part::Full => true,
            Part::Low(j0) => j <= j0,
            Part::High(j0) => j >= j0 - 1,
        }
    }
}

/// Parameters of a homogeneous Besov norm `Ḃ^s_{p,r}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub part: Part,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64) -> Self {
        BesovSpec { s, p, r, part: Part::Full }
    }

    pub fn with_part(mut self, part: Part) -> Self {
        self.part = part;
        self
    }
}

/// Threshold `j0 = floor(log2(1/ε))` of the ε-dependent low/high split.
pub fn eps_threshold(eps: f64) -> i32 {
    (1.0 / eps).log2().floor() as i32
}

/// `ℓ^r` norm of a sequence.
pub fn lr_sum(values: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.fold(0.0, f64::max)
    } else if r == 1.0 {
        values.sum()
    } else {
        values.map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

fn lp_of_points(vals: &[Vec<f64>], p: Lp, cell: f64) -> f64 {
    let n = vals[0].len();
    let mag = |i: usize| -> f64 {
        if vals.len() == 1 {
            vals[0][i].abs()
        } else {
            vals.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()
        }
    };
    match p {
        Lp::Inf => (0..n).map(mag).fold(0.0, f64::max),
        Lp::One => cell * (0..n).map(mag).sum::<f64>(),
        Lp::Two => (cell * (0..n).map(|i| mag(i).powi(2)).sum::<f64>()).sqrt(),
        Lp::Four => (cell * (0..n).map(|i| mag(i).powi(4)).sum::<f64>()).powf(0.25),
    }
}

impl LpFamily {
    /// `‖Δ_j f‖_{L^p}` for every block `j_min..=j_max`. Vector fields use the
    /// pointwise Euclidean norm.
    pub fn block_norms(&self, f: &SpectralField, p: f64) -> Result<Vec<f64>> {
        let p = Lp::from_f64(p)?;
        let g = self.grid();
        let nb = self.num_blocks();
        if p == Lp::Two {
            let mut acc = vec![0.0; nb];
            for c in 0..f.ncomp() {
                for (idx, z) in f.comp(c).iter().enumerate() {
                    let a = z.norm_sqr();
                    if a == 0.0 {
                        continue;
                    }
                    for &(j, w) in self.mode_weights(idx) {
                        if w > 0.0 {
                            acc[(j - self.j_min()) as usize] += w * w * a;
                        }
                    }
                }
            }
            let vol = g.volume();
            return Ok(acc.into_iter().map(|a| (vol * a).sqrt()).collect());
        }
        let mut occupied = vec![false; nb];
        for c in 0..f.ncomp() {
            for (idx, z) in f.comp(c).iter().enumerate() {
                if z.norm_sqr() > 0.0 {
                    for &(j, w) in self.mode_weights(idx) {
                        if w > 0.0 {
                            occupied[(j - self.j_min()) as usize] = true;
                        }
                    }
                }
            }
        }
        let mut out = vec![0.0; nb];
        let mut bufs: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); g.len()]; f.ncomp()];
        for (b, j) in self.js().enumerate() {
            if !occupied[b] {
                continue;
            }
            for (c, buf) in bufs.iter_mut().enumerate() {
                self.block_into(f.comp(c), j, buf);
            }
            let refs: Vec<&[C64]> = bufs.iter().map(|v| v.as_slice()).collect();
            let phys = g.to_physical(&refs);
            out[b] = lp_of_points(&phys, p, g.cell_volume());
        }
        Ok(out)
    }

    /// Assembles `ℓ^r_j(2^{js} b_j)` from precomputed block norms.
    pub fn assemble(&self, blocks: &[f64], s: f64, r: f64, part: Part) -> f64 {
        lr_sum(
            self.js()
                .zip(blocks)
                .filter(|(j, _)| part.contains(*j))
                .map(|(j, &b)| 2f64.powf(j as f64 * s) * b),
            r,
        )
    }

    pub fn besov_norm(&self, f: &SpectralField, spec: &BesovSpec) -> Result<f64> {
        let blocks = self.block_norms(f, spec.p)?;
        Ok(self.assemble(&blocks, spec.s, spec.r, spec.part))
    }

    /// Low and high parts `(‖f‖^ℓ, ‖f‖^h)` with threshold `j0`.
    pub fn split_low_high(&self, f: &SpectralField, s: f64, p: f64, r: f64, j0: i32) -> Result<(f64, f64)> {
        let blocks = self.block_norms(f, p)?;
        Ok((self.assemble(&blocks, s, r, Part::Low(j0)), self.assemble(&blocks, s, r, Part::High(j0))))
    }

    /// Hybrid norm `‖f‖^ℓ_{Ḃ^{s_low}} + ‖f‖^h_{Ḃ^{s_high}}`. With
    /// `s_low < s_high` this is the intersection `Ḃ^{s_low} ∩ Ḃ^{s_high}`;
    /// with `s_low > s_high` the sum space `Ḃ^{s_low} + Ḃ^{s_high}`.
    pub fn hybrid_norm(&self, f: &SpectralField, s_low: f64, s_high: f64, p: f64, r: f64, j0: i32) -> Result<f64> {
        let blocks = self.block_norms(f, p)?;
        Ok(self.assemble_hybrid(&blocks, s_low, s_high, r, j0))
    }

    pub fn assemble_hybrid(&self, blocks: &[f64], s_low: f64, s_high: f64, r: f64, j0: i32) -> f64 {
        self.assemble(blocks, s_low, r, Part::Low(j0)) + self.assemble(blocks, s_high, r, Part::High(j0))
    }

    /// `Ḃ^s_{2,∞}`.
    pub fn besov_weak_norm(&self, f: &SpectralField, s: f64) -> f64 {
        let blocks = self.block_norms(f, 2.0).expect("p = 2 is supported");
        self.assemble(&blocks, s, f64::INFINITY, Part::Full)
    }
}
