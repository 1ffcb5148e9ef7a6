use std::sync::Arc;

use crate::spectral::{Grid, SpectralField, C64};

const CHI_LO: f64 = 0.75;
const CHI_HI: f64 = 4.0 / 3.0;
const CHI_SAMPLES: usize = 4096;

fn bump(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn bump_prime(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        bump(t) / (t * t)
    }
}

/// Exact mollifier transition on the normalized coordinate `t ∈ [0,1]`,
/// returning value and derivative in `t`.
fn transition(t: f64) -> (f64, f64) {
    let a = bump(1.0 - t);
    let b = bump(t);
    let da = -bump_prime(1.0 - t);
    let db = bump_prime(t);
    let s = a + b;
    (a / s, (da * b - a * db) / (s * s))
}

/// Radial cutoff `χ`: one on `[0, 3/4]`, zero beyond `4/3`, smooth and
/// non-increasing in between. Tabulated once and evaluated by cubic
/// Hermite interpolation.
#[derive(Clone, Debug)]
pub struct Chi {
    values: Vec<f64>,
    slopes: Vec<f64>,
    h: f64,
}

impl Default for Chi {
    fn default() -> Self {
        Self::new()
    }
}

impl Chi {
    pub fn new() -> Self {
        let h = (CHI_HI - CHI_LO) / (CHI_SAMPLES - 1) as f64;
        let w = CHI_HI - CHI_LO;
        let mut values = Vec::with_capacity(CHI_SAMPLES);
        let mut slopes = Vec::with_capacity(CHI_SAMPLES);
        for i in 0..CHI_SAMPLES {
            let t = i as f64 / (CHI_SAMPLES - 1) as f64;
            let (v, dv) = transition(t);
            values.push(v);
            slopes.push(dv / w);
        }
        values[0] = 1.0;
        values[CHI_SAMPLES - 1] = 0.0;
        Chi { values, slopes, h }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= CHI_LO {
            return 1.0;
        }
        if r >= CHI_HI {
            return 0.0;
        }
        let x = (r - CHI_LO) / self.h;
        let i = (x.floor() as usize).min(CHI_SAMPLES - 2);
        let t = x - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        v.clamp(0.0, 1.0)
    }

    /// `φ(r) = χ(r/2) − χ(r)`, supported in `[3/4, 8/3]`.
    pub fn phi(&self, r: f64) -> f64 {
        self.eval(r / 2.0) - self.eval(r)
    }
}

/// Dyadic Littlewood-Paley family bound to a grid: block range and the
/// per-mode weights `φ(2^{-j}|ξ|)` (at most two nonzero per mode).
#[derive(Clone, Debug)]
pub struct LpFamily {
    grid: Arc<Grid>,
    chi: Chi,
    j_min: i32,
    j_max: i32,
    weights: Vec<[(i32, f64); 2]>,
}

impl LpFamily {
    pub fn new(grid: &Arc<Grid>) -> Self {
        let chi = Chi::new();
        let r_min = grid.dxi();
        let r_max = grid.max_xi();
        let j_min = (r_min * 3.0 / 8.0).log2().floor() as i32;
        let j_max = (r_max * 4.0 / 3.0).log2().ceil() as i32;

        let max_k2 = (0..grid.len()).map(|i| grid.k2(i)).max().unwrap_or(0) as usize;
        let mut by_k2: Vec<Option<[(i32, f64); 2]>> = vec![None; max_k2 + 1];
        let mut weights = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let k2 = grid.k2(idx) as usize;
            let w = *by_k2[k2].get_or_insert_with(|| {
                let mut out = [(j_min, 0.0); 2];
                if k2 == 0 {
                    return out;
                }
                let r = grid.xi_norm(idx);
                let mut m = 0;
                for j in j_min..=j_max {
                    let p = chi.phi(r * 2f64.powi(-j));
                    if p > 0.0 && m < 2 {
                        out[m] = (j, p);
                        m += 1;
                    }
                }
                out
            });
            weights.push(w);
        }
        LpFamily { grid: grid.clone(), chi, j_min, j_max, weights }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn chi(&self) -> &Chi {
        &self.chi
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn num_blocks(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn js(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// Block weights of mode `idx` as `(j, φ(2^{-j}|ξ|))` pairs.
    pub fn mode_weights(&self, idx: usize) -> &[(i32, f64); 2] {
        &self.weights[idx]
    }

    /// Multiplier `φ(2^{-j}|ξ_idx|)`.
    pub fn weight(&self, idx: usize, j: i32) -> f64 {
        self.weights[idx].iter().filter(|(jj, _)| *jj == j).map(|(_, w)| *w).sum()
    }

    /// Largest deviation of `Σ_j φ(2^{-j}r)` from one over the active
    /// nonzero grid radii.
    pub fn partition_residual(&self) -> f64 {
        (1..self.grid.len())
            .map(|idx| (self.weights[idx][0].1 + self.weights[idx][1].1 - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Same residual evaluated by summing `φ(2^{-j}r)` over every block.
    pub fn partition_residual_at(&self, r: f64) -> f64 {
        let s: f64 = self.js().map(|j| self.chi.phi(r * 2f64.powi(-j))).sum();
        (s - 1.0).abs()
    }

    /// `Δ_j f`.
    pub fn dyadic_block(&self, f: &SpectralField, j: i32) -> SpectralField {
        let mut out = f.clone();
        let n = self.grid.len();
        for c in 0..f.ncomp() {
            let dst = out.comp_mut(c);
            for (idx, z) in dst.iter_mut().enumerate().take(n) {
                *z *= self.weight(idx, j);
            }
        }
        out
    }

    /// Coefficients of `Δ_j` applied to one component, into `out`.
    pub(crate) fn block_into(&self, src: &[C64], j: i32, out: &mut [C64]) {
        for (idx, (o, &z)) in out.iter_mut().zip(src).enumerate() {
            *o = z * self.weight(idx, j);
        }
    }
}
