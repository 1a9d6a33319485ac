//! Shared test support: a small JSON Schema validator covering the subset
//! used by the schemas shipped in `schemas/` (type, required, properties,
//! additionalProperties, items, enum, minimum, definitions and local or
//! cross-file `$ref`).

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde_json::Value;

pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

pub struct SchemaSet {
    schemas: HashMap<String, Value>,
}

impl SchemaSet {
    pub fn load() -> Self {
        let mut schemas = HashMap::new();
        for entry in std::fs::read_dir(schema_dir()).expect("schemas directory exists") {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) == Some("json") {
                let name = path.file_name().unwrap().to_str().unwrap().to_string();
                let text = std::fs::read_to_string(&path).unwrap();
                schemas.insert(name, serde_json::from_str(&text).unwrap());
            }
        }
        Self { schemas }
    }

    pub fn validate(&self, schema_file: &str, value: &Value) -> Result<(), String> {
        let schema = self
            .schemas
            .get(schema_file)
            .ok_or_else(|| format!("no schema {schema_file}"))?;
        self.check(schema, schema, value, schema_file)
    }

    fn resolve<'a>(&'a self, root: &'a Value, reference: &str) -> Result<(&'a Value, &'a Value), String> {
        if let Some(pointer) = reference.strip_prefix("#/") {
            let mut node = root;
            for part in pointer.split('/') {
                node = node
                    .get(part)
                    .ok_or_else(|| format!("dangling $ref {reference}"))?;
            }
            Ok((root, node))
        } else {
            let schema = self
                .schemas
                .get(reference)
                .ok_or_else(|| format!("unknown schema file {reference}"))?;
            Ok((schema, schema))
        }
    }

    fn check(&self, root: &Value, schema: &Value, value: &Value, at: &str) -> Result<(), String> {
        let obj = match schema.as_object() {
            Some(o) => o,
            None => return Ok(()),
        };
        if let Some(reference) = obj.get("$ref").and_then(|r| r.as_str()) {
            let (new_root, target) = self.resolve(root, reference)?;
            return self.check(new_root, target, value, at);
        }
        if let Some(ty) = obj.get("type").and_then(|t| t.as_str()) {
            let ok = match ty {
                "object" => value.is_object(),
                "array" => value.is_array(),
                "string" => value.is_string(),
                "integer" => value.is_i64() || value.is_u64(),
                "number" => value.is_number(),
                "boolean" => value.is_boolean(),
                "null" => value.is_null(),
                _ => return Err(format!("{at}: unsupported type {ty}")),
            };
            if !ok {
                return Err(format!("{at}: expected {ty}, got {value}"));
            }
        }
        if let Some(options) = obj.get("enum").and_then(|e| e.as_array()) {
            if !options.contains(value) {
                return Err(format!("{at}: {value} not in enum"));
            }
        }
        if let Some(min) = obj.get("minimum").and_then(|m| m.as_f64()) {
            let x = value.as_f64().ok_or_else(|| format!("{at}: minimum on non-number"))?;
            if x < min {
                return Err(format!("{at}: {x} below minimum {min}"));
            }
        }
        if let Some(map) = value.as_object() {
            if let Some(required) = obj.get("required").and_then(|r| r.as_array()) {
                for key in required {
                    let key = key.as_str().unwrap();
                    if !map.contains_key(key) {
                        return Err(format!("{at}: missing required field {key}"));
                    }
                }
            }
            let props = obj.get("properties").and_then(|p| p.as_object());
            for (key, field) in map {
                if let Some(field_schema) = props.and_then(|p| p.get(key)) {
                    self.check(root, field_schema, field, &format!("{at}.{key}"))?;
                } else {
                    match obj.get("additionalProperties") {
                        Some(Value::Bool(false)) => {
                            return Err(format!("{at}: unexpected field {key}"))
                        }
                        Some(extra) if extra.is_object() => {
                            self.check(root, extra, field, &format!("{at}.{key}"))?
                        }
                        _ => {}
                    }
                }
            }
        }
        if let (Some(items), Some(array)) = (obj.get("items"), value.as_array()) {
            for (i, item) in array.iter().enumerate() {
                self.check(root, items, item, &format!("{at}[{i}]"))?;
            }
        }
        Ok(())
    }
}

/// Named graphs written as graph files, for CLI round trips.
pub fn write_graph_file(dir: &Path, name: &str, g: &qgsym::graph::SimpleGraph) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, g.to_file_string()).unwrap();
    path
}

pub fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qgsym-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
