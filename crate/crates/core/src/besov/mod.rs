//! Discrete Littlewood-Paley decomposition and homogeneous Besov,
//! Chemin-Lerner and hybrid norms.

mod family;
mod norms;
mod series;

pub use family::{Chi, LpFamily};
pub use norms::{eps_threshold, lr_sum, BesovSpec, Lp, Part};
pub use series::{trapezoid, BlockTimeSeries, TimeExp};
