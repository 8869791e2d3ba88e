use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::args::GlobalArgs;
use crate::CliError;

pub const BUDGET_ENV: &str = "CADIST_BUDGET_MB";

/// Rough memory per enumerated normal form and per searched area node.
const BYTES_PER_WORD: usize = 256;
const BYTES_PER_NODE: u64 = 512;

/// Values of a config file, split into global keys and subcommand options.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub global: Map<String, Value>,
    pub options: Map<String, Value>,
}

const GLOBAL_KEYS: [&str; 7] = [
    "out",
    "out_dir",
    "seed",
    "threads",
    "max_words",
    "max_area",
    "node_budget",
];

impl ConfigFile {
    pub fn load(path: &Path, subcommand: &str) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let Value::Object(map) = value else {
            return Err(CliError::Usage("config must be a JSON object".into()));
        };
        let mut config = ConfigFile::default();
        for (k, v) in map {
            if k == "subcommand" {
                if v.as_str() != Some(subcommand) {
                    return Err(CliError::Usage(format!(
                        "config is for subcommand {v}, not `{subcommand}`"
                    )));
                }
            } else if GLOBAL_KEYS.contains(&k.as_str()) {
                config.global.insert(k, v);
            } else {
                config.options.insert(k, v);
            }
        }
        Ok(config)
    }
}

/// Overlays the flags that were given onto `base`.
pub fn merge<T: Serialize + DeserializeOwned>(
    flags: &T,
    mut base: Map<String, Value>,
) -> Result<T, CliError> {
    let Value::Object(given) =
        serde_json::to_value(flags).map_err(|e| CliError::Usage(e.to_string()))?
    else {
        unreachable!("option structs serialize to objects")
    };
    for (k, v) in given {
        let empty = v.is_null() || v.as_array().is_some_and(|a| a.is_empty());
        if !empty {
            base.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

/// Effective budgets after defaults and the memory cap.
#[derive(Debug, Clone, Serialize)]
pub struct Budgets {
    pub max_words: usize,
    pub max_area: u32,
    /// `None` keeps each search's own default.
    pub node_budget: Option<u64>,
}

impl Budgets {
    pub fn resolve(global: &GlobalArgs, budget_mb: Option<&str>) -> Result<Budgets, CliError> {
        let mut b = Budgets {
            max_words: global.max_words.unwrap_or(4_000_000),
            max_area: global.max_area.unwrap_or(8),
            node_budget: global.node_budget,
        };
        if b.max_words == 0 || b.max_area == 0 || b.node_budget == Some(0) {
            return Err(CliError::Usage("budgets must be positive".into()));
        }
        if let Some(mb) = budget_mb {
            let mb: u64 = mb.trim().parse().ok().filter(|&v| v > 0).ok_or_else(|| {
                CliError::Usage(format!(
                    "{BUDGET_ENV} must be a positive integer, got `{mb}`"
                ))
            })?;
            let bytes = mb.saturating_mul(1 << 20);
            b.max_words = b
                .max_words
                .min((bytes / BYTES_PER_WORD as u64) as usize)
                .max(1);
            b.node_budget = Some(
                b.node_budget
                    .unwrap_or(u64::MAX)
                    .min(bytes / BYTES_PER_NODE)
                    .max(1),
            );
        }
        Ok(b)
    }

    pub fn nodes_or(&self, default: u64) -> u64 {
        self.node_budget.unwrap_or(default)
    }
}

/// SHA-256 over the canonical JSON of everything that affects results.
/// Output paths and the thread count are left out.
pub fn digest(subcommand: &str, options: &Value, budgets: &Budgets, seed: u64) -> String {
    let record = serde_json::json!({
        "subcommand": subcommand,
        "options": options,
        "budgets": budgets,
        "seed": seed,
    });
    hex::encode(Sha256::digest(record.to_string().as_bytes()))
}
