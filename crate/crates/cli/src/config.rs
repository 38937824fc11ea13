//! Experiment and synthetic-data configuration: a TOML or JSON file plus
//! `key=value` overrides, merged as a JSON tree before deserializing.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub fn load<T: DeserializeOwned + Serialize + Default>(path: Option<&Path>, overrides: &[String]) -> Result<T, CliError> {
    let mut tree = match path {
        Some(p) => read_tree(p)?,
        None => serde_json::to_value(T::default()).map_err(|e| CliError::Usage(e.to_string()))?,
    };
    for item in overrides {
        apply_override(&mut tree, item)?;
    }
    serde_json::from_value(tree).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))
}

fn read_tree(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Core(reid_core::Error::from(e).context(path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let tree = if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    } else {
        let t: toml::Value = toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::to_value(t).map_err(|e| CliError::Usage(e.to_string()))?
    };
    if !tree.is_object() {
        return Err(CliError::Usage(format!("{}: configuration must be a table", path.display())));
    }
    Ok(tree)
}

/// Parses the right-hand side as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .and_then(|v| serde_json::to_value(v).ok())
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

pub fn apply_override(tree: &mut Value, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override {item:?} is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("bad override key {key:?}")));
    }
    let mut node = tree;
    for part in &path[..path.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Usage(format!("override key {key:?} descends into a non-table")))?;
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| CliError::Usage(format!("override key {key:?} descends into a non-table")))?;
    obj.insert(path[path.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}
