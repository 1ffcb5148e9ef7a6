use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::besov::{Lp, Part, TimeExp};
use crate::error::{Error, Result};
use crate::experiments::{bundle_observers, dissipation_bundle, initial_bundle, DataFamily, DataRecipe, GridSpec, NormBundle};
use crate::integrator::{integrate, Observer, Quantity, RunOptions, Scheme, Trajectory};
use crate::spectral::{PhysParams, SpectralField};
use crate::systems::{System, SystemKind};

use super::record::ResultRecord;
use super::table::{Cell, Table};

/// Parses a TOML document into any configuration type. Unknown keys are
/// rejected by the target type.
pub fn from_toml<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
}

pub fn load_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_toml(&fs::read_to_string(path)?)
}

/// `‖q(t)‖_{Ḃ^s_{p,r}}` recorded at every sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub quantity: Quantity,
    pub s: f64,
    #[serde(default = "two")]
    pub p: f64,
    #[serde(default = "one")]
    pub r: f64,
}

fn two() -> f64 {
    2.0
}

fn one() -> f64 {
    1.0
}

impl ObservableSpec {
    pub fn label(&self) -> String {
        format!("{}_b{}_{}_{}", self.quantity.name(), self.s, self.p, self.r)
    }
}

/// Scalar functionals evaluated on a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// conserved masses per sample
    Mass,
    /// total momentum per sample (unscaled Euler-NS)
    Momentum,
    /// `𝒳0`, `𝒴0` and `𝒟(T)` (unscaled Euler-NS)
    Bundles,
}

/// One simulation: system, grid, parameters, data, scheme, horizon and
/// observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemKind,
    pub grid: GridSpec,
    #[serde(default)]
    pub params: PhysParams,
    #[serde(default)]
    pub data: DataRecipe,
    #[serde(default)]
    pub scheme: Scheme,
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub max_samples: usize,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    #[serde(default)]
    pub functionals: Vec<Functional>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_samples() -> usize {
    200
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: RunConfig = from_toml(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn system(&self) -> Result<System> {
        System::new(self.system, &self.grid.build()?, self.params)
    }

    /// Checks every module precondition without running anything.
    pub fn validate(&self) -> Result<()> {
        let sys = self.system()?;
        self.data.validate()?;
        self.scheme.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.max_samples == 0 {
            return Err(Error::InvalidConfig("max_samples must be positive".into()));
        }
        let zero = sys.zero_state();
        for o in &self.observables {
            Lp::from_f64(o.p)?;
            if !(o.r >= 1.0) {
                return Err(Error::InvalidConfig(format!("r must be at least 1, got {}", o.r)));
            }
            o.quantity.extract(&sys, &zero)?;
        }
        let unscaled = self.system == SystemKind::EulerNs;
        for f in &self.functionals {
            if matches!(f, Functional::Momentum | Functional::Bundles) && !unscaled {
                return Err(Error::InvalidConfig(format!("{f:?} needs the euler_ns system")));
            }
        }
        Ok(())
    }

    /// `σ1` used for `𝒴0`: the power-law exponent of the data, `−d/2`
    /// otherwise.
    pub fn sigma1(&self) -> f64 {
        match self.data.family {
            DataFamily::PowerLaw { sigma1, .. } => sigma1,
            _ => -(self.grid.dim as f64) / 2.0,
        }
    }
}

/// Everything a single run produces.
pub struct Simulation {
    pub trajectory: Trajectory,
    /// one column per observable history
    pub table: Table,
    pub record: ResultRecord,
    pub initial: SpectralField,
    pub bundle: Option<NormBundle>,
}

pub const SIMULATE_PREFIX: &str = "t";

/// Runs one configuration and assembles its outputs.
pub fn simulate(cfg: &RunConfig) -> Result<Simulation> {
    cfg.validate()?;
    let sys = cfg.system()?;
    let x0 = cfg.data.build(&sys)?;
    let mut observers: Vec<Observer> = Vec::new();
    for o in &cfg.observables {
        let ob = Observer::new(o.quantity, o.p);
        if !observers.contains(&ob) {
            observers.push(ob);
        }
    }
    let bundles = cfg.functionals.contains(&Functional::Bundles);
    if bundles {
        for ob in bundle_observers() {
            if !observers.contains(&ob) {
                observers.push(ob);
            }
        }
    }
    let opts = RunOptions { max_samples: cfg.max_samples, ..RunOptions::default() };
    let traj = integrate(&sys, &x0, cfg.t_end, &cfg.scheme, &observers, &opts)?;

    let mut columns = vec![SIMULATE_PREFIX.to_string()];
    let mut histories = Vec::new();
    let mut record = ResultRecord::new("simulate", cfg)?;
    let mut summary = serde_json::Map::new();
    for o in &cfg.observables {
        let s = traj.series(&Observer::new(o.quantity, o.p)).expect("observer registered above");
        let part = Part::Full;
        let h = s.besov_history(o.s, o.r, part);
        record = record.series(&o.label(), &traj.times, &h);
        summary.insert(format!("{}_l1", o.label()), s.lebesgue_time_norm(TimeExp::One, o.s, o.r, part)?.into());
        summary.insert(format!("{}_l2_tilde", o.label()), s.chemin_lerner_norm(TimeExp::Two, o.s, o.r, part)?.into());
        summary.insert(format!("{}_linf_tilde", o.label()), s.chemin_lerner_norm(TimeExp::Inf, o.s, o.r, part)?.into());
        columns.push(o.label());
        histories.push(h);
    }
    let with_mass = cfg.functionals.contains(&Functional::Mass);
    let with_momentum = cfg.functionals.contains(&Functional::Momentum);
    if with_mass {
        columns.push("mass_rho".into());
        if sys.layout().a.is_some() {
            columns.push("mass_n".into());
        }
        summary.insert("mass_drift".into(), traj.mass_drift().into());
    }
    if with_momentum {
        for i in 0..sys.grid.dim() {
            columns.push(format!("momentum_{i}"));
        }
        summary.insert("momentum_drift".into(), traj.momentum_drift().into());
    }
    let mut table = Table::with_columns(columns);
    for (k, &t) in traj.times.iter().enumerate() {
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend(histories.iter().map(|h| Cell::from(h[k])));
        if with_mass {
            row.extend(traj.mass[k].iter().map(|&m| Cell::from(m)));
        }
        if with_momentum {
            row.extend(traj.momentum[k].iter().map(|&m| Cell::from(m)));
        }
        table.push(row);
    }
    let bundle = if bundles {
        let b = initial_bundle(&sys, &x0, cfg.sigma1())?.merge(dissipation_bundle(&sys, &traj)?);
        summary.insert("bundles".into(), serde_json::to_value(&b.entries)?);
        Some(b)
    } else {
        None
    };
    summary.insert("dt".into(), traj.dt.into());
    summary.insert("steps".into(), traj.steps.into());
    let record = record.summary(&summary)?;
    Ok(Simulation { trajectory: traj, table, record, initial: x0, bundle })
}
