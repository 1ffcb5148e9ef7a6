use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Torus `[0, side)^dim` with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub side: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, side: f64) -> Self {
        GridSpec { dim, n, side }
    }

    /// `side = k π`
    pub fn pi_side(dim: usize, n: usize, k: f64) -> Self {
        GridSpec { dim, n, side: k * PI }
    }

    pub fn build(&self) -> Result<Arc<Grid>> {
        Grid::new(self.dim, self.n, self.side)
    }
}

/// A measured value checked against a closed interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    /// `null` in JSON when unbounded below
    #[serde(with = "lower_bound")]
    pub lo: f64,
    /// `null` in JSON when unbounded above
    #[serde(with = "upper_bound")]
    pub hi: f64,
    pub pass: bool,
}

macro_rules! bound_serde {
    ($name:ident, $inf:expr) => {
        mod $name {
            use serde::{Deserialize, Deserializer, Serializer};

            pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
                if x.is_infinite() {
                    s.serialize_none()
                } else {
                    s.serialize_some(x)
                }
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
                Ok(Option::<f64>::deserialize(d)?.unwrap_or($inf))
            }
        }
    };
}

bound_serde!(lower_bound, f64::NEG_INFINITY);
bound_serde!(upper_bound, f64::INFINITY);

impl Verdict {
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Verdict { name: name.into(), value, lo, hi, pass: value.is_finite() && value >= lo && value <= hi }
    }

    pub fn at_most(name: impl Into<String>, value: f64, hi: f64) -> Self {
        Self::within(name, value, f64::NEG_INFINITY, hi)
    }

    pub fn at_least(name: impl Into<String>, value: f64, lo: f64) -> Self {
        Self::within(name, value, lo, f64::INFINITY)
    }

    /// Boolean check recorded as `1` or `0` against `[1, 1]`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::within(name, if ok { 1.0 } else { 0.0 }, 1.0, 1.0)
    }
}

pub fn all_pass(v: &[Verdict]) -> bool {
    v.iter().all(|x| x.pass)
}

pub const BEYOND_THEOREM: &str = "beyond-theorem";
pub const TORUS_CAVEAT: &str = "torus-caveat";

pub(crate) fn require_sweep(values: &[f64], what: &str) -> Result<()> {
    if values.len() < 3 {
        return Err(Error::InvalidConfig(format!("{what} needs at least 3 values, got {}", values.len())));
    }
    if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidConfig(format!("{what} values must be positive")));
    }
    if values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(format!("{what} values must be strictly decreasing")));
    }
    Ok(())
}

/// `true` when every entry is strictly smaller than its predecessor.
pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}
