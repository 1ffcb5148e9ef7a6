use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Compact JSON with object keys sorted at every level.
pub fn canonical_json(v: &Value) -> String {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let body: Vec<String> = keys
                .into_iter()
                .map(|k| format!("{}:{}", Value::String(k.clone()), canonical_json(&m[k])))
                .collect();
            format!("{{{}}}", body.join(","))
        }
        Value::Array(a) => format!("[{}]", a.iter().map(canonical_json).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

/// SHA-256 of the canonical JSON form, as lowercase hex.
pub fn config_hash<T: Serialize + ?Sized>(cfg: &T) -> Result<String> {
    let v = serde_json::to_value(cfg)?;
    Ok(hex::encode(Sha256::digest(canonical_json(&v).as_bytes())))
}

/// Hash of a TOML document; independent of key order and formatting.
pub fn hash_toml(text: &str) -> Result<String> {
    let v: toml::Value = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    config_hash(&v)
}
