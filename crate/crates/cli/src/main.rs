use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use twophase::besov::{BesovSpec, LpFamily, Part};
use twophase::experiments::{
    df_limit_study, incompressible_study, lemma_a1_check, linear_decay_study, nonlinear_decay_study, oracle_check,
    relaxation_study, run_suite, DfLimitConfig, IncompressibleConfig, LemmaA1Config, LinearDecayConfig,
    NonlinearDecayConfig, OracleConfig, RelaxationConfig, Suite, Verdict,
};
use twophase::io::{
    df_limit_output, incompressible_output, lemma_output, linear_decay_output, load_toml, nonlinear_decay_output,
    oracle_output, relaxation_output, simulate, write_study, ResultRecord, RunConfig, StudyOutput,
};
use twophase::spectral::snapshot::{load_snapshot, save_snapshot};
use twophase::Error;

#[derive(Parser)]
#[command(name = "twophase", version, about = "Spectral simulation and rate verification for two-phase flow")]
struct Cli {
    /// Output directory; each subcommand writes into its own subdirectory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linearized analysis: oracle check, propagator shape and decay tables
    Linear {
        #[arg(long, value_enum, default_value_t = LinearCheck::All)]
        check: LinearCheck,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// One trajectory with the configured observables
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Relative-velocity rates against the friction time
    Relaxation {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Distance of Euler-NS to the drift-flux model
    DfLimit {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Time-decay exponents
    Decay {
        #[arg(long, value_enum, default_value_t = Tier::All)]
        tier: Tier,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Low-Mach rates against the Mach number
    Incompressible {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Besov norm of a stored field snapshot
    Besov {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// restrict to blocks j <= J0
        #[arg(long, allow_hyphen_values = true, conflicts_with = "high")]
        low: Option<i32>,
        /// restrict to blocks j >= J0 - 1
        #[arg(long, allow_hyphen_values = true)]
        high: Option<i32>,
        /// use a single component instead of the whole field
        #[arg(long)]
        component: Option<usize>,
    },
    /// Acceptance suite
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Desk)]
        suite: SuiteArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LinearCheck {
    LemmaA1,
    Oracle,
    Decay,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tier {
    Linear,
    Nonlinear,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Desk,
    Quick,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LinearFile {
    oracle: OracleConfig,
    lemma_a1: LemmaA1Config,
    decay: LinearDecayConfig,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DecayFile {
    linear: LinearDecayConfig,
    nonlinear: NonlinearDecayConfig,
}

fn config_or_default<T: Default + serde::de::DeserializeOwned>(path: &Option<PathBuf>) -> twophase::Result<T> {
    match path {
        Some(p) => load_toml(p),
        None => Ok(T::default()),
    }
}

fn study_summary(out: &StudyOutput) -> Value {
    json!({
        "kind": out.kind,
        "pass": out.pass(),
        "config_hash": out.record.config_hash,
        "flags": out.record.flags,
        "verdicts": out.record.verdicts,
    })
}

fn emit(dir: &Path, outputs: Vec<StudyOutput>) -> twophase::Result<(Value, bool)> {
    let mut pass = true;
    let mut studies = Vec::new();
    for o in &outputs {
        write_study(dir, o)?;
        pass &= o.pass();
        studies.push(study_summary(o));
    }
    Ok((json!({ "pass": pass, "out_dir": dir, "studies": studies }), pass))
}

fn run(cli: Cli) -> twophase::Result<(Value, bool)> {
    match cli.command {
        Command::Linear { check, config } => {
            let cfg: LinearFile = config_or_default(&config)?;
            let mut outs = Vec::new();
            if matches!(check, LinearCheck::Oracle | LinearCheck::All) {
                outs.push(oracle_output(&oracle_check(&cfg.oracle)?)?);
            }
            if matches!(check, LinearCheck::LemmaA1 | LinearCheck::All) {
                outs.push(lemma_output(&lemma_a1_check(&cfg.lemma_a1)?)?);
            }
            if matches!(check, LinearCheck::Decay | LinearCheck::All) {
                outs.push(linear_decay_output(&linear_decay_study(&cfg.decay)?)?);
            }
            emit(&cli.out.join("linear"), outs)
        }
        Command::Simulate { config } => {
            let cfg = RunConfig::load(&config)?;
            let dir = cli.out.join(&cfg.output_dir);
            std::fs::create_dir_all(&dir)?;
            let sim = simulate(&cfg)?;
            sim.table.write(&dir.join("simulate.csv"))?;
            sim.record.write(&dir.join("simulate.json"))?;
            if let Some(x) = &sim.trajectory.final_state {
                save_snapshot(&dir.join("final.tpsf"), x)?;
            }
            save_snapshot(&dir.join("initial.tpsf"), &sim.initial)?;
            let v = json!({
                "pass": true,
                "out_dir": dir,
                "config_hash": sim.record.config_hash,
                "summary": sim.record.summary,
            });
            Ok((v, true))
        }
        Command::Relaxation { config } => {
            let cfg: RelaxationConfig = config_or_default(&config)?;
            emit(&cli.out.join("relaxation"), vec![relaxation_output(&relaxation_study(&cfg)?)?])
        }
        Command::DfLimit { config } => {
            let cfg: DfLimitConfig = config_or_default(&config)?;
            emit(&cli.out.join("df_limit"), vec![df_limit_output(&df_limit_study(&cfg)?)?])
        }
        Command::Decay { tier, config } => {
            let cfg: DecayFile = config_or_default(&config)?;
            let mut outs = Vec::new();
            if tier != Tier::Nonlinear {
                outs.push(linear_decay_output(&linear_decay_study(&cfg.linear)?)?);
            }
            if tier != Tier::Linear {
                outs.push(nonlinear_decay_output(&nonlinear_decay_study(&cfg.nonlinear)?)?);
            }
            emit(&cli.out.join("decay"), outs)
        }
        Command::Incompressible { config } => {
            let cfg: IncompressibleConfig = config_or_default(&config)?;
            emit(&cli.out.join("incompressible"), vec![incompressible_output(&incompressible_study(&cfg)?)?])
        }
        Command::Besov { snapshot, s, p, r, low, high, component } => {
            let mut f = load_snapshot(&snapshot)?;
            if let Some(c) = component {
                if c >= f.ncomp() {
                    return Err(Error::ShapeMismatch(format!("component {c} of a {}-component field", f.ncomp())));
                }
                f = f.component(c);
            }
            let part = match (low, high) {
                (Some(j0), _) => Part::Low(j0),
                (_, Some(j0)) => Part::High(j0),
                _ => Part::Full,
            };
            let family = LpFamily::new(f.grid());
            let blocks = family.block_norms(&f, p)?;
            let norm = family.besov_norm(&f, &BesovSpec { s, p, r, part })?;
            let blocks: Vec<Value> = family
                .js()
                .zip(&blocks)
                .filter(|(_, &b)| b > 0.0)
                .map(|(j, &b)| json!({ "j": j, "norm": b }))
                .collect();
            Ok((json!({ "pass": true, "s": s, "p": p, "r": r, "part": part, "norm": norm, "blocks": blocks }), true))
        }
        Command::Verify { suite } => {
            let suite = match suite {
                SuiteArg::Desk => Suite::Desk,
                SuiteArg::Quick => Suite::Quick,
            };
            let report = run_suite(suite, |c| {
                eprintln!("criterion {}: {} ({:.1} s) {}", c.id, if c.pass { "PASS" } else { "FAIL" }, c.seconds, c.name);
            });
            let verdicts: Vec<Verdict> = report
                .criteria
                .iter()
                .flat_map(|c| {
                    c.verdicts.iter().map(move |v| Verdict { name: format!("c{}_{}", c.id, v.name), ..v.clone() })
                })
                .collect();
            let record = ResultRecord::new("verify", &suite)?.verdicts(&verdicts).summary(&report)?;
            let record = ResultRecord { pass: report.pass, ..record };
            let dir = cli.out.join("verify");
            std::fs::create_dir_all(&dir)?;
            record.write(&dir.join("verify.json"))?;
            Ok((serde_json::to_value(&report)?, report.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((v, pass)) => {
            let text = serde_json::to_string_pretty(&v).expect("json values always serialize");
            let _ = writeln!(std::io::stdout(), "{text}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let rec = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{rec}");
            ExitCode::from(2)
        }
    }
}
