use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::step::Scheme;
use crate::error::{Error, Result};
use crate::spectral::snapshot::{load_snapshot, save_snapshot};
use crate::spectral::{PhysParams, SpectralField};
use crate::systems::{System, SystemKind};

/// JSON sidecar written next to a binary snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointMeta {
    pub format: String,
    pub time: f64,
    pub system: SystemKind,
    pub params: PhysParams,
    pub scheme: Scheme,
    pub dim: usize,
    pub n: usize,
    pub side: f64,
}

pub const CHECKPOINT_FORMAT: &str = "twophase-checkpoint-1";

fn paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{stem}.tpsf")), dir.join(format!("{stem}.json")))
}

/// Writes `<stem>.tpsf` and `<stem>.json` into `dir`.
pub fn save_checkpoint(dir: &Path, stem: &str, t: f64, x: &SpectralField, sys: &System, scheme: &Scheme) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (bin, meta) = paths(dir, stem);
    save_snapshot(&bin, x)?;
    let g = x.grid();
    let m = CheckpointMeta {
        format: CHECKPOINT_FORMAT.to_string(),
        time: t,
        system: sys.kind,
        params: sys.params,
        scheme: *scheme,
        dim: g.dim(),
        n: g.n(),
        side: g.side(),
    };
    fs::write(meta, serde_json::to_string_pretty(&m)?)?;
    Ok(())
}

pub fn load_checkpoint(dir: &Path, stem: &str) -> Result<(CheckpointMeta, SpectralField)> {
    let (bin, meta) = paths(dir, stem);
    let m: CheckpointMeta = serde_json::from_str(&fs::read_to_string(meta)?)?;
    if m.format != CHECKPOINT_FORMAT {
        return Err(Error::FormatVersionMismatch { expected: CHECKPOINT_FORMAT.to_string(), found: m.format });
    }
    let x = load_snapshot(&bin)?;
    Ok((m, x))
}
