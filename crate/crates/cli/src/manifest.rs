//! Run manifests: a reproducibility record written next to every data
//! output, validating against `schemas/run_manifest.schema.json`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// The published manifest schema, shipped with the repository.
pub const MANIFEST_SCHEMA: &str = include_str!("../../../schemas/run_manifest.schema.json");

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: u64, outputs: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest always serializes")
    }

    /// Manifest path for a given data output: `<out>.manifest.json`.
    pub fn path_for(out: &Path) -> PathBuf {
        PathBuf::from(format!("{}.manifest.json", out.display()))
    }
}

/// Validate a manifest document against the published schema (the subset of
/// JSON Schema the schema file actually uses: required, additionalProperties,
/// type, enum, minimum, minItems, array item type).
pub fn validate_manifest(doc: &Value) -> Result<(), String> {
    let schema: Value =
        serde_json::from_str(MANIFEST_SCHEMA).map_err(|e| format!("bad schema file: {e}"))?;
    let obj = doc.as_object().ok_or("manifest is not an object")?;
    let props = schema["properties"].as_object().expect("schema properties");

    for req in schema["required"].as_array().expect("schema required") {
        let key = req.as_str().expect("required entries are strings");
        if !obj.contains_key(key) {
            return Err(format!("missing required field '{key}'"));
        }
    }
    if schema["additionalProperties"] == Value::Bool(false) {
        for key in obj.keys() {
            if !props.contains_key(key) {
                return Err(format!("unknown field '{key}'"));
            }
        }
    }
    for (key, rule) in props {
        let Some(value) = obj.get(key) else { continue };
        let ty = rule["type"].as_str().unwrap_or("any");
        let ok = match ty {
            "string" => value.is_string(),
            "object" => value.is_object(),
            "array" => value.is_array(),
            "integer" => value.is_u64() || value.is_i64(),
            _ => true,
        };
        if !ok {
            return Err(format!("field '{key}' is not of type {ty}"));
        }
        if let Some(allowed) = rule["enum"].as_array() {
            if !allowed.contains(value) {
                return Err(format!("field '{key}' value {value} not in enum"));
            }
        }
        if let Some(min) = rule["minimum"].as_i64() {
            if value.as_i64().unwrap_or(i64::MAX) < min {
                return Err(format!("field '{key}' below minimum {min}"));
            }
        }
        if let Some(min_items) = rule["minItems"].as_u64() {
            let len = value.as_array().map(|a| a.len()).unwrap_or(0) as u64;
            if len < min_items {
                return Err(format!("field '{key}' has fewer than {min_items} items"));
            }
        }
        if ty == "array" {
            if let (Some(items), Some(arr)) = (rule["items"]["type"].as_str(), value.as_array()) {
                if items == "string" && !arr.iter().all(|v| v.is_string()) {
                    return Err(format!("field '{key}' items are not all strings"));
                }
            }
        }
    }
    Ok(())
}
