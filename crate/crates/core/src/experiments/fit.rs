use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares line through `(log x, log y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope
    pub stderr: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

impl RateFit {
    /// `exp(intercept) x^slope`
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Fits `y ≈ C x^slope` by least squares in log-log coordinates.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::NonPositiveData(format!("({x}, {y})")));
    }
    ols(points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect())
}

/// Fits `y ≈ C e^{slope·t}` by least squares on `(t, log y)`. The stored
/// points are `(t, log y)`.
pub fn exp_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(&(t, y)) = points.iter().find(|(t, y)| !(*y > 0.0 && y.is_finite() && t.is_finite())) {
        return Err(Error::NonPositiveData(format!("({t}, {y})")));
    }
    ols(points.iter().map(|&(t, y)| (t, y.ln())).collect())
}

fn ols(logs: Vec<(f64, f64)>) -> Result<RateFit> {
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::NonPositiveData("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if logs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(RateFit { slope, intercept, stderr, r_squared, points: logs })
}

/// Fits a power law in `(1 + t)`: `y ≈ C (1+t)^{-rate}`; returns the fit of
/// `(1+t, y)` whose slope is `-rate`.
pub fn decay_fit(times: &[f64], values: &[f64]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = times.iter().zip(values).map(|(&t, &y)| (1.0 + t, y)).collect();
    rate_fit(&pts)
}
