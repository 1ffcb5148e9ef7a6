use serde::Serialize;

use super::record::ResultRecord;
use super::table::{Cell, Table};
use crate::error::Result;
use crate::experiments::{
    DfLimitResult, IncompressibleResult, LemmaA1Result, LinearDecayResult, LowMachSystem, NonlinearDecayResult,
    OracleResult, RelaxationResult,
};

pub const RELAXATION_HEADER: &str = "tau,l1_top,l2_low,sqrt_family,hybrid,mass_drift,momentum_drift,dt,steps,t_end";
pub const DF_LIMIT_HEADER: &str =
    "tau,initial_density,initial_mixed,density_sup,mixed_sup,error,velocity_l1,mass_drift,dt,t_end";
pub const LINEAR_DECAY_HEADER: &str =
    "dim,sigma1,sigma,channel,expected,exponent,r_squared,lower,upper,window_start,window_end";
pub const NONLINEAR_DECAY_HEADER: &str = "channel,expected,exponent,r_squared,window_start,window_end";
pub const DECAY_SERIES_HEADER: &str = "dim,sigma1,sigma,channel,t,value";
pub const INCOMPRESSIBLE_HEADER: &str = "system,eps,j0,a_qv,a_qu_qv,u_minus_v,mass_drift,dt,steps,t_end";
pub const LEMMA_LOW_HEADER: &str = "j,xi,rate,r_squared,s_start,s_end";
pub const LEMMA_HIGH_HEADER: &str = "tau,rate,constant,r_squared,t_start,t_end";
pub const DECAY_PROFILE_HEADER: &str = "t,rho_minus_rho_inf";
pub const ORACLE_HEADER: &str = "samples,propagator_error,eigen_error";

/// Tables and the JSON record of one study.
pub struct StudyOutput {
    pub kind: String,
    pub tables: Vec<(String, Table)>,
    pub record: ResultRecord,
}

impl StudyOutput {
    pub fn pass(&self) -> bool {
        self.record.pass
    }
}

fn base<C: Serialize>(kind: &str, cfg: &C) -> Result<ResultRecord> {
    ResultRecord::new(kind, cfg)
}

fn opt(x: Option<f64>) -> Cell {
    match x {
        Some(v) => v.into(),
        None => "".into(),
    }
}

fn system_name(s: LowMachSystem) -> &'static str {
    match s {
        LowMachSystem::DfScaled => "df_scaled",
        LowMachSystem::EulerNsScaled => "euler_ns_scaled",
    }
}

pub fn relaxation_output(r: &RelaxationResult) -> Result<StudyOutput> {
    let mut t = Table::new(RELAXATION_HEADER);
    for row in &r.rows {
        t.push(vec![
            row.tau.into(),
            row.l1_top.into(),
            row.l2_low.into(),
            row.sqrt_family.into(),
            row.hybrid.into(),
            row.mass_drift.into(),
            row.momentum_drift.into(),
            row.dt.into(),
            row.steps.into(),
            r.config.t_end.into(),
        ]);
    }
    let record = base("relaxation", &r.config)?
        .fit("sqrt_family", &r.sqrt_fit)
        .fit("hybrid", &r.linear_fit)
        .verdicts(&r.verdicts)
        .flags(&r.flags)
        .summary(&r.rows)?;
    Ok(StudyOutput { kind: "relaxation".into(), tables: vec![("relaxation".into(), t)], record })
}

pub fn df_limit_output(r: &DfLimitResult) -> Result<StudyOutput> {
    let mut t = Table::new(DF_LIMIT_HEADER);
    for row in &r.rows {
        t.push(vec![
            row.tau.into(),
            row.initial.density.into(),
            row.initial.mixed.into(),
            row.density_sup.into(),
            row.mixed_sup.into(),
            row.error.into(),
            row.velocity_l1.into(),
            row.mass_drift.into(),
            r.dt.into(),
            r.config.t_end.into(),
        ]);
    }
    let record = base("df-limit", &r.config)?
        .fit("error", &r.fit)
        .fit("velocity_l1", &r.velocity_fit)
        .verdicts(&r.verdicts)
        .flags(&r.flags)
        .summary(&r.rows)?;
    Ok(StudyOutput { kind: "df-limit".into(), tables: vec![("df_limit".into(), t)], record })
}

pub fn linear_decay_output(r: &LinearDecayResult) -> Result<StudyOutput> {
    let mut t = Table::new(LINEAR_DECAY_HEADER);
    let mut s = Table::new(DECAY_SERIES_HEADER);
    let mut record = base("decay-linear", &r.config)?;
    for row in &r.rows {
        t.push(vec![
            row.dim.into(),
            row.sigma1.into(),
            row.sigma.into(),
            row.channel.as_str().into(),
            row.expected.into(),
            row.exponent.into(),
            row.r_squared.into(),
            row.lower.into(),
            row.upper.into(),
            r.config.window.0.into(),
            r.config.window.1.into(),
        ]);
        for (&tt, &v) in row.times.iter().zip(&row.values) {
            s.push(vec![
                row.dim.into(),
                row.sigma1.into(),
                row.sigma.into(),
                row.channel.as_str().into(),
                tt.into(),
                v.into(),
            ]);
        }
        let name = format!("d{}_s1{}_s{}_{}", row.dim, row.sigma1, row.sigma, row.channel);
        record = record.series(&name, &row.times, &row.values);
    }
    for ts in &r.tau_scaling {
        record = record.fit(&format!("d{}_s1{}_s{}_u_minus_v_tau", ts.dim, ts.sigma1, ts.sigma), &ts.fit);
    }
    let record = record.verdicts(&r.verdicts).summary(&r.rows)?;
    Ok(StudyOutput {
        kind: "decay-linear".into(),
        tables: vec![("decay_linear".into(), t), ("decay_linear_series".into(), s)],
        record,
    })
}

pub fn nonlinear_decay_output(r: &NonlinearDecayResult) -> Result<StudyOutput> {
    let mut t = Table::new(NONLINEAR_DECAY_HEADER);
    let mut record = base("decay-nonlinear", &r.config)?;
    for row in &r.rows {
        t.push(vec![
            row.channel.as_str().into(),
            row.expected.into(),
            row.exponent.into(),
            row.r_squared.into(),
            r.window.0.into(),
            r.window.1.into(),
        ]);
        record = record.series(&row.channel, &row.times, &row.values);
    }
    let mut p = Table::new(DECAY_PROFILE_HEADER);
    for (&tt, &v) in r.profile_times.iter().zip(&r.profile_distance) {
        p.push(vec![tt.into(), v.into()]);
    }
    let record = record
        .series("rho_minus_rho_inf", &r.profile_times, &r.profile_distance)
        .verdicts(&r.verdicts)
        .flags(&r.flags)
        .summary(&serde_json::json!({
            "window": r.window,
            "profile_tail": r.profile_tail,
            "mass_drift": r.mass_drift,
            "momentum_drift": r.momentum_drift,
        }))?;
    Ok(StudyOutput {
        kind: "decay-nonlinear".into(),
        tables: vec![("decay_nonlinear".into(), t), ("decay_profile".into(), p)],
        record,
    })
}

pub fn incompressible_output(r: &IncompressibleResult) -> Result<StudyOutput> {
    let mut t = Table::new(INCOMPRESSIBLE_HEADER);
    for row in &r.rows {
        t.push(vec![
            system_name(row.system).into(),
            row.eps.into(),
            row.j0.into(),
            row.a_qv.into(),
            opt(row.a_qu_qv),
            opt(row.relative),
            row.mass_drift.into(),
            row.dt.into(),
            row.steps.into(),
            r.config.t_end.into(),
        ]);
    }
    let mut record = base("incompressible", &r.config)?;
    for f in &r.fits {
        record = record.fit(&format!("{}_{}", system_name(f.system), f.quantity), &f.fit);
    }
    let record = record
        .verdicts(&r.verdicts)
        .flags(&r.flags)
        .summary(&serde_json::json!({
            "regularity": r.regularity,
            "exponent": r.exponent,
            "rows": r.rows,
        }))?;
    Ok(StudyOutput { kind: "incompressible".into(), tables: vec![("incompressible".into(), t)], record })
}

pub fn lemma_output(r: &LemmaA1Result) -> Result<StudyOutput> {
    let mut low = Table::new(LEMMA_LOW_HEADER);
    for row in &r.low {
        low.push(vec![
            row.j.into(),
            row.xi.into(),
            row.rate.into(),
            row.fit.r_squared.into(),
            r.config.low_s.0.into(),
            r.config.low_s.1.into(),
        ]);
    }
    let mut high = Table::new(LEMMA_HIGH_HEADER);
    for row in &r.high {
        high.push(vec![
            row.tau.into(),
            row.rate.into(),
            row.constant.into(),
            row.fit.r_squared.into(),
            r.config.high_t.0.into(),
            r.config.high_t.1.into(),
        ]);
    }
    let record = base("lemma-a1", &r.config)?
        .fit("low_frequency_exponent", &r.frequency_exponent)
        .verdicts(&r.verdicts)
        .summary(&serde_json::json!({ "low": r.low, "high": r.high }))?;
    Ok(StudyOutput {
        kind: "lemma-a1".into(),
        tables: vec![("lemma_low".into(), low), ("lemma_high".into(), high)],
        record,
    })
}

pub fn oracle_output(r: &OracleResult) -> Result<StudyOutput> {
    let mut t = Table::new(ORACLE_HEADER);
    t.push(vec![r.config.samples.into(), r.propagator_error.into(), r.eigen_error.into()]);
    let record = base("oracle", &r.config)?.verdicts(&r.verdicts);
    Ok(StudyOutput { kind: "oracle".into(), tables: vec![("oracle".into(), t)], record })
}

/// Writes `<name>.csv` for every table and `<kind>.json` into `dir`.
pub fn write_study(dir: &std::path::Path, out: &StudyOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, t) in &out.tables {
        t.write(&dir.join(format!("{name}.csv")))?;
    }
    out.record.write(&dir.join(format!("{}.json", out.kind)))
}
