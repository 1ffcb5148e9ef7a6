use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::common::{all_pass, Verdict};
use super::decay::{linear_decay_study, nonlinear_decay_study, LinearDecayConfig, NonlinearDecayConfig};
use super::df_limit::{df_limit_study, DfLimitConfig};
use super::incompressible::{incompressible_study, IncompressibleConfig};
use super::linear_checks::{lemma_a1_check, oracle_check, LemmaA1Config, OracleConfig};
use super::relaxation::{relaxation_study, RelaxationConfig};
use super::structure::{self_convergence, structure_check, ConvergenceConfig, StructureConfig};
use crate::error::Result;

/// Which criteria a suite run covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// every criterion at full desk scale
    Desk,
    /// the checks that finish in seconds: 1, 2, 3, 8 (structure only) and 9
    Quick,
}

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub verdicts: Vec<Verdict>,
    pub flags: Vec<String>,
    /// module error that aborted the criterion
    pub error: Option<String>,
    pub seconds: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub criteria: Vec<CriterionOutcome>,
    pub pass: bool,
}

pub const MASS_DRIFT_TOL: f64 = 1e-10;
pub const MOMENTUM_DRIFT_TOL: f64 = 1e-9;

/// Runtime budgets in seconds, indexed by criterion id.
pub const RUNTIME_LIMITS: [f64; 9] = [5.0, 30.0, 120.0, 900.0, 1800.0, 1200.0, 1200.0, 120.0, 300.0];

pub const CRITERION_NAMES: [&str; 9] = [
    "linear oracle equivalence",
    "low/high frequency propagator shape",
    "linear decay sandwich",
    "relaxation rates",
    "drift-flux limit error",
    "nonlinear decay window",
    "incompressible rates",
    "conservation and structure",
    "exp_rk2 self-convergence",
];

#[derive(Default)]
struct Drifts {
    mass: f64,
    momentum: f64,
}

struct Run {
    verdicts: Vec<Verdict>,
    flags: Vec<String>,
}

fn outcome(id: u32, f: impl FnOnce() -> Result<Run>) -> CriterionOutcome {
    let start = Instant::now();
    let res = f();
    let seconds = start.elapsed().as_secs_f64();
    let name = CRITERION_NAMES[id as usize - 1].to_string();
    match res {
        Ok(mut run) => {
            run.verdicts.push(Verdict::at_most("runtime_seconds", seconds, RUNTIME_LIMITS[id as usize - 1]));
            let pass = all_pass(&run.verdicts);
            CriterionOutcome { id, name, verdicts: run.verdicts, flags: run.flags, error: None, seconds, pass }
        }
        Err(e) => CriterionOutcome {
            id,
            name,
            verdicts: Vec::new(),
            flags: Vec::new(),
            error: Some(format!("{}: {e}", e.kind())),
            seconds,
            pass: false,
        },
    }
}

/// Runs the acceptance criteria of `suite` in order, calling `progress`
/// after each one.
pub fn run_suite(suite: Suite, mut progress: impl FnMut(&CriterionOutcome)) -> SuiteReport {
    let mut criteria = Vec::new();
    let mut push = |c: CriterionOutcome, criteria: &mut Vec<CriterionOutcome>| {
        progress(&c);
        criteria.push(c);
    };
    let desk = suite == Suite::Desk;
    let mut drifts = Drifts::default();

    push(outcome(1, || Ok(Run { verdicts: oracle_check(&OracleConfig::default())?.verdicts, flags: vec![] })), &mut criteria);
    push(
        outcome(2, || Ok(Run { verdicts: lemma_a1_check(&LemmaA1Config::default())?.verdicts, flags: vec![] })),
        &mut criteria,
    );
    push(
        outcome(3, || Ok(Run { verdicts: linear_decay_study(&LinearDecayConfig::default())?.verdicts, flags: vec![] })),
        &mut criteria,
    );
    if desk {
        push(
            outcome(4, || {
                let r = relaxation_study(&RelaxationConfig::default())?;
                for row in &r.rows {
                    drifts.mass = drifts.mass.max(row.mass_drift);
                    drifts.momentum = drifts.momentum.max(row.momentum_drift);
                }
                Ok(Run { verdicts: r.verdicts, flags: r.flags })
            }),
            &mut criteria,
        );
        push(
            outcome(5, || {
                let r = df_limit_study(&DfLimitConfig::default())?;
                for row in &r.rows {
                    drifts.mass = drifts.mass.max(row.mass_drift);
                }
                Ok(Run { verdicts: r.verdicts, flags: r.flags })
            }),
            &mut criteria,
        );
        push(
            outcome(6, || {
                let r = nonlinear_decay_study(&NonlinearDecayConfig::default())?;
                drifts.mass = drifts.mass.max(r.mass_drift);
                drifts.momentum = drifts.momentum.max(r.momentum_drift);
                Ok(Run { verdicts: r.verdicts, flags: r.flags })
            }),
            &mut criteria,
        );
        push(
            outcome(7, || {
                let r = incompressible_study(&IncompressibleConfig::default())?;
                for row in &r.rows {
                    drifts.mass = drifts.mass.max(row.mass_drift);
                }
                Ok(Run { verdicts: r.verdicts, flags: r.flags })
            }),
            &mut criteria,
        );
    }
    push(
        outcome(8, || {
            let mut verdicts = structure_check(&StructureConfig::default())?.verdicts;
            let mut flags = Vec::new();
            if desk {
                verdicts.push(Verdict::at_most("mass_drift", drifts.mass, MASS_DRIFT_TOL));
                verdicts.push(Verdict::at_most("momentum_drift", drifts.momentum, MOMENTUM_DRIFT_TOL));
            } else {
                flags.push("study-drifts-not-run".to_string());
            }
            Ok(Run { verdicts, flags })
        }),
        &mut criteria,
    );
    push(
        outcome(9, || Ok(Run { verdicts: self_convergence(&ConvergenceConfig::default())?.verdicts, flags: vec![] })),
        &mut criteria,
    );
    let pass = criteria.iter().all(|c| c.pass);
    SuiteReport { suite, criteria, pass }
}
