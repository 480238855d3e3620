//! Test support: running the binary and validating outputs against the
//! shipped schemas with a small JSON-Schema subset checker (type, enum,
//! required, properties, additionalProperties, items, oneOf — what the
//! schemas in docs/schemas use).

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn plap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plap"))
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    plap()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

pub fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

pub fn load_schema(name: &str) -> Value {
    let path = schema_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_str(&text).expect("schema parses")
}

pub fn assert_valid(schema_name: &str, value: &Value) {
    let schema = load_schema(schema_name);
    if let Err(e) = validate(&schema, value, "$") {
        panic!("{schema_name} validation failed: {e}\nvalue: {value:#}");
    }
}

pub fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    let obj = schema.as_object().ok_or("schema must be an object")?;

    if let Some(variants) = obj.get("oneOf").and_then(Value::as_array) {
        let matches = variants
            .iter()
            .filter(|v| validate(v, value, path).is_ok())
            .count();
        if matches != 1 {
            return Err(format!("{path}: matched {matches} oneOf variants, expected 1"));
        }
        return Ok(());
    }

    if let Some(allowed) = obj.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return Err(format!("{path}: {value} not in enum {allowed:?}"));
        }
        return Ok(());
    }

    if let Some(ty) = obj.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "boolean" => value.is_boolean(),
            "number" => value.is_number(),
            "integer" => value.is_i64() || value.is_u64(),
            other => return Err(format!("{path}: unsupported schema type '{other}'")),
        };
        if !ok {
            return Err(format!("{path}: expected {ty}, got {value}"));
        }
    }

    if let Some(map) = value.as_object() {
        if let Some(required) = obj.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !map.contains_key(key) {
                    return Err(format!("{path}: missing required key '{key}'"));
                }
            }
        }
        let props = obj.get("properties").and_then(Value::as_object);
        if obj.get("additionalProperties") == Some(&Value::Bool(false)) {
            if let Some(props) = props {
                for key in map.keys() {
                    if !props.contains_key(key) {
                        return Err(format!("{path}: unexpected key '{key}'"));
                    }
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = map.get(key) {
                    validate(sub, v, &format!("{path}.{key}"))?;
                }
            }
        }
    }

    if let (Some(items), Some(arr)) = (obj.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            validate(items, v, &format!("{path}[{i}]"))?;
        }
    }

    Ok(())
}
