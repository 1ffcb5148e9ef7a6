use nalgebra::{Matrix2, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::common::Verdict;
use super::{exp_fit, rate_fit, RateFit};
use crate::error::{Error, Result};
use crate::linear::{
    compressible_symbol, eigenvalues_with, incompressible_symbol, propagator_with, relative_velocity_kernel_with,
    LinearCoeffs,
};
use crate::spectral::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
    pub xi_max: f64,
    pub t_max: f64,
    pub propagator_tol: f64,
    /// tolerance on `|Δλ| / max(1, |λ|)`
    pub eigen_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { samples: 200, seed: 2024, xi_max: 10.0, t_max: 5.0, propagator_tol: 1e-10, eigen_tol: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub config: OracleConfig,
    /// largest entrywise difference to the matrix exponential
    pub propagator_error: f64,
    /// largest scaled eigenvalue difference to the numerical spectrum
    pub eigen_error: f64,
    pub verdicts: Vec<Verdict>,
}

fn max_entry_diff<const N: usize>(a: &[[f64; N]; N], b: &[f64]) -> f64 {
    // nalgebra stores column-major
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - b[j * N + i]).abs());
        }
    }
    worst
}

fn match_error(formula: &[C64], numeric: &[C64]) -> f64 {
    let mut left: Vec<C64> = numeric.to_vec();
    let mut worst = 0.0f64;
    for &f in formula {
        let (pos, err) = left
            .iter()
            .enumerate()
            .map(|(i, &n)| (i, (n - f).norm()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        left.swap_remove(pos);
        worst = worst.max(err / f.norm().max(1.0));
    }
    worst
}

/// Compares the closed-form propagators and eigenvalues against a
/// scaling-and-squaring matrix exponential and a numerical eigensolver on
/// random `(|ξ|, τ, μ, λ, t)`.
pub fn oracle_check(cfg: &OracleConfig) -> Result<OracleResult> {
    if cfg.samples == 0 || !(cfg.xi_max > 0.0 && cfg.t_max > 0.0) {
        return Err(Error::InvalidConfig("oracle check needs samples > 0 and positive ranges".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut perr, mut eerr) = (0.0f64, 0.0f64);
    for _ in 0..cfg.samples {
        let xi = rng.gen_range(0.0..cfg.xi_max);
        let tau = rng.gen_range(0.01..1.0);
        let mu = rng.gen_range(0.1..2.0);
        let lam = rng.gen_range(-1.9 * mu..2.0);
        let t = rng.gen_range(0.0..cfg.t_max);
        let k = LinearCoeffs::new(tau, mu, lam);
        let sa = compressible_symbol(xi, &k);
        let sb = incompressible_symbol(xi, &k);
        let ma = Matrix3::from_fn(|i, j| sa[i][j]);
        let mb = Matrix2::from_fn(|i, j| sb[i][j]);
        let p = propagator_with(xi, &k, t);
        perr = perr.max(max_entry_diff(&p.a, (ma * t).exp().as_slice()));
        perr = perr.max(max_entry_diff(&p.b, (mb * t).exp().as_slice()));

        let e = eigenvalues_with(xi, &k);
        let na: Vec<C64> = ma.complex_eigenvalues().iter().copied().collect();
        let nb: Vec<C64> = mb.complex_eigenvalues().iter().copied().collect();
        eerr = eerr.max(match_error(&[e.lambda1, e.lambda2, e.lambda3], &na));
        eerr = eerr.max(match_error(&[e.lambda4, e.lambda5], &nb));
    }
    let verdicts = vec![
        Verdict::at_most("propagator_vs_expm", perr, cfg.propagator_tol),
        Verdict::at_most("eigenvalues_vs_numerical", eerr, cfg.eigen_tol),
    ];
    Ok(OracleResult { config: cfg.clone(), propagator_error: perr, eigen_error: eerr, verdicts })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaA1Config {
    pub mu: f64,
    pub lam: f64,
    /// friction time of the low-frequency check
    pub tau: f64,
    /// low-frequency blocks `ξ = 2^j`
    pub low_js: Vec<i32>,
    /// range of the rescaled time `s = 2^{2j} t`
    pub low_s: (f64, f64),
    pub taus: Vec<f64>,
    /// high-frequency blocks `ξ = 2^j`
    pub high_js: Vec<i32>,
    /// time range of the high-frequency kernel bound
    pub high_t: (f64, f64),
    pub samples: usize,
    pub r2_min: f64,
    /// tolerance on the fitted frequency exponent 2
    pub exponent_tol: f64,
    /// largest allowed ratio between the fitted constants `C` of different `τ`
    pub constant_spread_max: f64,
}

impl Default for LemmaA1Config {
    fn default() -> Self {
        LemmaA1Config {
            mu: 1.0,
            lam: -1.0,
            tau: 0.1,
            low_js: (-6..=0).collect(),
            low_s: (1.0, 10.0),
            taus: vec![0.2, 0.1, 0.02],
            high_js: (1..=6).collect(),
            high_t: (1.0, 10.0),
            samples: 40,
            r2_min: 0.99,
            exponent_tol: 0.05,
            constant_spread_max: 10.0,
        }
    }
}

/// Fit of `‖e^{tA(ξ)}‖ ≈ C e^{−c s}` in `s = ξ² t` for one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowFrequencyRow {
    pub j: i32,
    pub xi: f64,
    /// `c`, the decay rate in the rescaled time
    pub rate: f64,
    pub fit: RateFit,
}

/// Fit of `sup_ξ |K(ξ, t)| ≈ C τ e^{−R t}` for one friction time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighFrequencyRow {
    pub tau: f64,
    /// `R`
    pub rate: f64,
    /// smallest `C` with `sup_ξ |K| ≤ C τ e^{−R t}` on the samples
    pub constant: f64,
    pub fit: RateFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaA1Result {
    pub config: LemmaA1Config,
    pub low: Vec<LowFrequencyRow>,
    /// log-log fit of the per-block decay rate in `t` against `ξ`
    pub frequency_exponent: RateFit,
    pub high: Vec<HighFrequencyRow>,
    pub verdicts: Vec<Verdict>,
}

fn frobenius<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Frequency-localized shape of the linear solution: heat-like decay
/// `e^{−c 2^{2j} t}` at low frequencies and the `O(τ) e^{−R t}` relative
/// velocity at high frequencies.
pub fn lemma_a1_check(cfg: &LemmaA1Config) -> Result<LemmaA1Result> {
    if cfg.samples < 3 || cfg.low_js.len() < 3 || cfg.high_js.is_empty() || cfg.taus.is_empty() {
        return Err(Error::InvalidConfig("lemma check needs 3 samples, 3 low blocks, high blocks and taus".into()));
    }
    let k = LinearCoeffs::new(cfg.tau, cfg.mu, cfg.lam);
    let mut verdicts = Vec::new();
    let mut low = Vec::new();
    for &j in &cfg.low_js {
        let xi = 2f64.powi(j);
        let pts: Vec<(f64, f64)> = linspace(cfg.low_s.0, cfg.low_s.1, cfg.samples)
            .into_iter()
            .map(|s| {
                let p = propagator_with(xi, &k, s / (xi * xi));
                (s, frobenius(&p.a).hypot(frobenius(&p.b)))
            })
            .collect();
        let fit = exp_fit(&pts)?;
        verdicts.push(Verdict::at_least(format!("low_j{j}_rate"), -fit.slope, f64::MIN_POSITIVE));
        verdicts.push(Verdict::at_least(format!("low_j{j}_r2"), fit.r_squared, cfg.r2_min));
        low.push(LowFrequencyRow { j, xi, rate: -fit.slope, fit });
    }
    let frequency_exponent = rate_fit(&low.iter().map(|r| (r.xi, r.rate * r.xi * r.xi)).collect::<Vec<_>>())?;
    verdicts.push(Verdict::within(
        "low_frequency_exponent",
        frequency_exponent.slope,
        2.0 - cfg.exponent_tol,
        2.0 + cfg.exponent_tol,
    ));

    let mut high = Vec::new();
    for &tau in &cfg.taus {
        let kt = LinearCoeffs::new(tau, cfg.mu, cfg.lam);
        let pts: Vec<(f64, f64)> = linspace(cfg.high_t.0, cfg.high_t.1, cfg.samples)
            .into_iter()
            .map(|t| {
                let m = cfg
                    .high_js
                    .iter()
                    .map(|&j| {
                        let xi = 2f64.powi(j);
                        let kr = relative_velocity_kernel_with(xi, &kt, t);
                        let [ku, ka, kv] = kr.compressible;
                        let [kpu, kpv] = kr.incompressible;
                        ku.abs().max(kv.abs()).max(xi * ka.abs()).max(kpu.abs()).max(kpv.abs())
                    })
                    .fold(0.0, f64::max);
                (t, m)
            })
            .collect();
        let fit = exp_fit(&pts)?;
        let rate = -fit.slope;
        let constant = pts.iter().map(|&(t, m)| m * (rate * t).exp() / tau).fold(0.0, f64::max);
        verdicts.push(Verdict::at_least(format!("high_tau{tau}_rate"), rate, f64::MIN_POSITIVE));
        verdicts.push(Verdict::at_least(format!("high_tau{tau}_r2"), fit.r_squared, cfg.r2_min));
        high.push(HighFrequencyRow { tau, rate, constant, fit });
    }
    let cs: Vec<f64> = high.iter().map(|h| h.constant).collect();
    let spread = cs.iter().cloned().fold(0.0, f64::max) / cs.iter().cloned().fold(f64::INFINITY, f64::min);
    verdicts.push(Verdict::at_most("high_constant_spread", spread, cfg.constant_spread_max));
    Ok(LemmaA1Result { config: cfg.clone(), low, frequency_exponent, high, verdicts })
}
