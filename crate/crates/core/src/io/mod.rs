//! Configuration files, content hashes, CSV tables and versioned result
//! records.

mod config;
mod hash;
mod record;
mod studies;
mod table;

pub use config::{from_toml, load_toml, simulate, Functional, ObservableSpec, RunConfig, Simulation};
pub use hash::{canonical_json, config_hash, hash_toml};
pub use record::{NamedFit, NamedSeries, ResultRecord, CODE_VERSION, RECORD_FORMAT};
pub use studies::*;
pub use table::{fmt17, Cell, Table};
