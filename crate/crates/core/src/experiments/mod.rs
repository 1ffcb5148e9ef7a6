//! Parameter sweeps turning trajectories into fitted rates, initial-data
//! builders and diagnostic norm bundles.

mod bundles;
mod common;
pub mod data;
mod decay;
mod df_limit;
mod fit;
mod incompressible;
mod linear_checks;
mod recipe;
mod relaxation;
mod structure;
mod suite;

pub use bundles::{bundle_observers, dissipation_bundle, initial_bundle, NormBundle};
pub use common::{all_pass, strictly_decreasing, GridSpec, Verdict, BEYOND_THEOREM, TORUS_CAVEAT};
pub use decay::{
    linear_decay_study, lower_bound_data, nonlinear_decay_study, DecayCase, DecayRow, LinearDecayConfig, LinearDecayResult,
    NonlinearDecayConfig, NonlinearDecayResult, TauScaling, MIN_WINDOW_SAMPLES,
};
pub use df_limit::{df_limit_study, limit_distance, DfLimitConfig, DfLimitResult, DfLimitRow, LimitDistance};
pub use incompressible::{
    incompressible_study, IncompressibleConfig, IncompressibleFit, IncompressibleResult, IncompressibleRow, LowMachSystem,
};
pub use fit::{decay_fit, exp_fit, rate_fit, RateFit};
pub use linear_checks::{
    lemma_a1_check, oracle_check, HighFrequencyRow, LemmaA1Config, LemmaA1Result, LowFrequencyRow, OracleConfig,
    OracleResult,
};
pub use recipe::{coupled_euler_ns_data, DataFamily, DataFields, DataRecipe};
pub use relaxation::{relaxation_study, RelaxationConfig, RelaxationResult, RelaxationRow};
pub use structure::{self_convergence, structure_check, ConvergenceConfig, ConvergenceResult, StructureConfig, StructureResult};
pub use suite::{run_suite, CriterionOutcome, Suite, SuiteReport, CRITERION_NAMES, MASS_DRIFT_TOL, MOMENTUM_DRIFT_TOL, RUNTIME_LIMITS};
