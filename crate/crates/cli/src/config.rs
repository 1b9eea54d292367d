//! Layered run configuration: built-in defaults, then the optional TOML
//! file, then command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Top-level keys of a config file besides the per-command sections.
const COMMON_KEYS: [&str; 3] = ["seed", "threads", "out"];

/// Parsed config file: common keys plus one table per subcommand.
#[derive(Debug, Default)]
pub struct ConfigFile {
    root: serde_json::Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path, commands: &[&str]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let value = serde_json::to_value(table).map_err(|e| CliError::Usage(e.to_string()))?;
        let Value::Object(root) = value else {
            unreachable!("a TOML document is a table")
        };
        for key in root.keys() {
            if !COMMON_KEYS.contains(&key.as_str()) && !commands.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown config key `{key}`")));
            }
        }
        Ok(Self { root })
    }

    pub fn common<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.root
            .get(key)
            .map(|v| serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))))
            .transpose()
    }

    pub fn section(&self, command: &str) -> Option<&Value> {
        self.root.get(command)
    }
}

/// Recursive merge; `null` in `top` keeps the value underneath.
fn overlay(base: &mut Value, top: &Value) {
    match (base, top) {
        (_, Value::Null) => {}
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => overlay(slot, v),
                    _ if v.is_null() => {}
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, t) => *b = t.clone(),
    }
}

/// Defaults of `R`, overridden by the config section, overridden by the
/// non-empty flags. Unknown keys are rejected by `R`'s deserializer.
pub fn resolve<R, F>(section: Option<&Value>, flags: &F) -> Result<R, CliError>
where
    R: Serialize + DeserializeOwned + Default,
    F: Serialize,
{
    let mut value = serde_json::to_value(R::default()).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(s) = section {
        if !s.is_object() {
            return Err(CliError::Usage("config sections must be tables".into()));
        }
        overlay(&mut value, s);
    }
    overlay(&mut value, &serde_json::to_value(flags).map_err(|e| CliError::Usage(e.to_string()))?);
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("configuration: {e}")))
}
