use serde::{Deserialize, Serialize};

use super::family::LpFamily;
use super::norms::{lr_sum, Part};
use crate::error::{Error, Result};

/// Time exponent of a Chemin-Lerner or Lebesgue-in-time norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TimeExp {
    One,
    Two,
    Inf,
}

impl TimeExp {
    pub fn value(self) -> f64 {
        match self {
            TimeExp::One => 1.0,
            TimeExp::Two => 2.0,
            TimeExp::Inf => f64::INFINITY,
        }
    }
}

/// History of `‖Δ_j u(t)‖_{L^p}` for every block of a family.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BlockTimeSeries {
    pub p: f64,
    pub j_min: i32,
    pub times: Vec<f64>,
    /// `blocks[sample][j - j_min]`
    pub blocks: Vec<Vec<f64>>,
}

/// Trapezoid rule for `∫ y dt`.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(tt, yy)| 0.5 * (tt[1] - tt[0]) * (yy[0] + yy[1])).sum()
}

fn time_norm(t: &[f64], y: &[f64], rho: TimeExp) -> f64 {
    match rho {
        TimeExp::Inf => y.iter().copied().fold(0.0, f64::max),
        TimeExp::One => trapezoid(t, y),
        TimeExp::Two => {
            let sq: Vec<f64> = y.iter().map(|v| v * v).collect();
            trapezoid(t, &sq).max(0.0).sqrt()
        }
    }
}

impl BlockTimeSeries {
    pub fn new(family: &LpFamily, p: f64) -> Self {
        BlockTimeSeries { p, j_min: family.j_min(), times: Vec::new(), blocks: Vec::new() }
    }

    pub fn push(&mut self, t: f64, blocks: Vec<f64>) {
        if let Some(&last) = self.times.last() {
            assert!(t > last, "sample times must be strictly increasing");
        }
        self.times.push(t);
        self.blocks.push(blocks);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.len())
    }

    fn check(&self, rho: TimeExp) -> Result<()> {
        let needed = if rho == TimeExp::Inf { 1 } else { 2 };
        if self.len() < needed {
            return Err(Error::InsufficientSamples { needed, got: self.len() });
        }
        Ok(())
    }

    /// Restriction to samples with `t0 <= t <= t1`.
    pub fn window(&self, t0: f64, t1: f64) -> BlockTimeSeries {
        let mut out = BlockTimeSeries { p: self.p, j_min: self.j_min, times: vec![], blocks: vec![] };
        for (t, b) in self.times.iter().zip(&self.blocks) {
            if *t >= t0 && *t <= t1 {
                out.times.push(*t);
                out.blocks.push(b.clone());
            }
        }
        out
    }

    /// Per-block time norms `‖Δ_j u‖_{L^ρ_T(L^p)}`.
    pub fn block_time_norms(&self, rho: TimeExp) -> Result<Vec<f64>> {
        self.check(rho)?;
        let nb = self.num_blocks();
        let mut y = vec![0.0; self.len()];
        Ok((0..nb)
            .map(|b| {
                for (k, row) in self.blocks.iter().enumerate() {
                    y[k] = row[b];
                }
                time_norm(&self.times, &y, rho)
            })
            .collect())
    }

    fn assemble(&self, per_block: &[f64], s: f64, r: f64, part: Part) -> f64 {
        lr_sum(
            per_block
                .iter()
                .enumerate()
                .map(|(b, &v)| (self.j_min + b as i32, v))
                .filter(|(j, _)| part.contains(*j))
                .map(|(j, v)| 2f64.powf(j as f64 * s) * v),
            r,
        )
    }

    /// Chemin-Lerner norm `‖u‖_{L̃^ρ_T(Ḃ^s_{p,r})}`.
    pub fn chemin_lerner_norm(&self, rho: TimeExp, s: f64, r: f64, part: Part) -> Result<f64> {
        let per_block = self.block_time_norms(rho)?;
        Ok(self.assemble(&per_block, s, r, part))
    }

    /// Chemin-Lerner hybrid norm: low part at `s_low`, high part at `s_high`.
    pub fn chemin_lerner_hybrid(&self, rho: TimeExp, s_low: f64, s_high: f64, r: f64, j0: i32) -> Result<f64> {
        let per_block = self.block_time_norms(rho)?;
        Ok(self.assemble(&per_block, s_low, r, Part::Low(j0)) + self.assemble(&per_block, s_high, r, Part::High(j0)))
    }

    /// Instantaneous Besov norm at every sample.
    pub fn besov_history(&self, s: f64, r: f64, part: Part) -> Vec<f64> {
        self.blocks.iter().map(|b| self.assemble(b, s, r, part)).collect()
    }

    pub fn hybrid_history(&self, s_low: f64, s_high: f64, r: f64, j0: i32) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| self.assemble(b, s_low, r, Part::Low(j0)) + self.assemble(b, s_high, r, Part::High(j0)))
            .collect()
    }

    /// Time-outer norm `‖u‖_{L^ρ_T(Ḃ^s_{p,r})}`.
    pub fn lebesgue_time_norm(&self, rho: TimeExp, s: f64, r: f64, part: Part) -> Result<f64> {
        self.check(rho)?;
        Ok(time_norm(&self.times, &self.besov_history(s, r, part), rho))
    }

    pub fn lebesgue_time_hybrid(&self, rho: TimeExp, s_low: f64, s_high: f64, r: f64, j0: i32) -> Result<f64> {
        self.check(rho)?;
        Ok(time_norm(&self.times, &self.hybrid_history(s_low, s_high, r, j0), rho))
    }
}
