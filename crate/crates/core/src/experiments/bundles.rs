use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::besov::{BlockTimeSeries, LpFamily, Part, TimeExp};
use crate::error::{Error, Result};
use crate::integrator::{Observer, Quantity, Trajectory};
use crate::spectral::SpectralField;
use crate::systems::{EulerNsState, System, SystemKind};

/// Named norm values. Entries are nonnegative and finite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    pub entries: BTreeMap<String, f64>,
}

impl NormBundle {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.get(name).copied()
    }

    fn put(&mut self, name: &str, value: f64) {
        self.entries.insert(name.to_string(), value);
    }

    pub fn merge(mut self, other: NormBundle) -> NormBundle {
        self.entries.extend(other.entries);
        self
    }
}

/// Low part `j ≤ 0` and high part `j ≥ −1`.
const LOW: Part = Part::Low(0);
const HIGH: Part = Part::High(0);

fn euler_ns_only(sys: &System) -> Result<()> {
    match sys.kind {
        SystemKind::EulerNs => Ok(()),
        k => Err(Error::InvalidParams(format!("norm bundles are defined for euler_ns states, got {}", k.name()))),
    }
}

/// Data norms `𝒳0` and `𝒴0` of an Euler-NS state, with their constituents.
pub fn initial_bundle(sys: &System, x0: &SpectralField, sigma1: f64) -> Result<NormBundle> {
    euler_ns_only(sys)?;
    let family = LpFamily::new(&sys.grid);
    let d = sys.grid.dim() as f64;
    let tau = sys.params.tau;
    let s = EulerNsState::unpack(x0);
    let norm = |f: &SpectralField, sreg: f64| -> Result<f64> {
        let b = family.block_norms(f, 2.0)?;
        Ok(family.assemble(&b, sreg, 1.0, Part::Full))
    };
    let both = |f: &SpectralField| -> Result<f64> {
        let b = family.block_norms(f, 2.0)?;
        Ok(family.assemble(&b, d / 2.0 - 1.0, 1.0, Part::Full) + family.assemble(&b, d / 2.0, 1.0, Part::Full))
    };
    let u_low = norm(&s.u, d / 2.0 - 1.0)?;
    let u_top = norm(&s.u, d / 2.0 + 1.0)?;
    let a_both = both(&s.a)?;
    let v_low = norm(&s.v, d / 2.0 - 1.0)?;
    let rho_a = both(&SpectralField::stack(&[&s.rho, &s.a])?)?;
    let uv_low = norm(&SpectralField::stack(&[&s.u, &s.v])?, d / 2.0 - 1.0)?;
    let all = family.block_norms(x0, 2.0)?;
    let weak_low = family.assemble(&all, sigma1, f64::INFINITY, LOW);

    let mut b = NormBundle::default();
    b.put("u0_b_d2m1", u_low);
    b.put("u0_b_d2p1", u_top);
    b.put("a0_b_d2m1_cap_d2", a_both);
    b.put("v0_b_d2m1", v_low);
    b.put("X0", u_low + tau * u_top + a_both + v_low);
    b.put("state0_low_b_sigma1_inf", weak_low);
    b.put("rho0_a0_b_d2m1_cap_d2", rho_a);
    b.put("u0_v0_b_d2m1", uv_low);
    b.put("Y0", weak_low + rho_a + uv_low + tau * u_top);
    Ok(b)
}

/// Observers a trajectory must record for [`dissipation_bundle`].
pub fn bundle_observers() -> Vec<Observer> {
    [Quantity::U, Quantity::A, Quantity::V, Quantity::RelVel].into_iter().map(|q| Observer::new(q, 2.0)).collect()
}

fn series<'a>(traj: &'a Trajectory, q: Quantity) -> Result<&'a BlockTimeSeries> {
    traj.series(&Observer::new(q, 2.0))
        .ok_or_else(|| Error::InvalidConfig(format!("trajectory lacks the {}_p2 observer", q.name())))
}

/// Dissipation functional `𝒟(t)` over the recorded horizon, with its
/// constituents.
pub fn dissipation_bundle(sys: &System, traj: &Trajectory) -> Result<NormBundle> {
    euler_ns_only(sys)?;
    let d = sys.grid.dim() as f64;
    let tau = sys.params.tau;
    let (u, a, v, w) = (
        series(traj, Quantity::U)?,
        series(traj, Quantity::A)?,
        series(traj, Quantity::V)?,
        series(traj, Quantity::RelVel)?,
    );
    let one = TimeExp::One;
    let u_l1 = u.lebesgue_time_norm(one, d / 2.0 + 1.0, 1.0, Part::Full)?;
    let a_low = a.lebesgue_time_norm(one, d / 2.0 + 1.0, 1.0, LOW)?;
    let a_high = a.lebesgue_time_norm(one, d / 2.0, 1.0, HIGH)?;
    let v_l1 = v.lebesgue_time_norm(one, d / 2.0 + 1.0, 1.0, Part::Full)?;
    let w_l2 = w.chemin_lerner_norm(TimeExp::Two, d / 2.0 - 1.0, 1.0, Part::Full)?;
    let w_low = w.lebesgue_time_norm(one, d / 2.0, 1.0, LOW)?;
    let w_high = w.lebesgue_time_norm(one, d / 2.0 - 1.0, 1.0, HIGH)?;

    let mut b = NormBundle::default();
    b.put("u_l1_b_d2p1", u_l1);
    b.put("a_l1_b_d2p1_low", a_low);
    b.put("a_l1_b_d2_high", a_high);
    b.put("v_l1_b_d2p1", v_l1);
    b.put("rel_l2_b_d2m1", w_l2);
    b.put("rel_l1_b_d2_low", w_low);
    b.put("rel_l1_b_d2m1_high", w_high);
    b.put("D", u_l1 + a_low + a_high + v_l1 + w_l2 / tau.sqrt() + (w_low + w_high) / tau);
    Ok(b)
}
