//! JSON-lines store files.
//!
//! One entity per line: `{"kind": "user", "id": 42, "props": {...}}`.
//! Strings, integers, floats and booleans map to atomics, arrays of scalars
//! to multi-valued properties, objects to nested entities. `null` is
//! rejected everywhere. Output is sorted by key so dumps are byte-stable.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::model::{
    AtomicValue, EntityId, EntityKey, MemoryState, PropertyMap, PropertyValue, ValueList, VERSION_PROPERTY,
};

#[derive(Debug, Error)]
pub enum PersistError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate key {key}")]
    DuplicateKey { line: usize, key: EntityKey },
    #[error("{key}: float `{name}` is not finite and cannot be stored")]
    NonFinite { key: EntityKey, name: String },
}

pub fn load_store(path: &Path) -> Result<MemoryState, PersistError> {
    read_store(BufReader::new(File::open(path)?))
}

pub fn read_store(reader: impl BufRead) -> Result<MemoryState, PersistError> {
    let mut ms = MemoryState::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| PersistError::Parse { line: line_no, message };
        let json: Value = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        let (key, props) = entity_from_json(&json).map_err(parse_err)?;
        if ms.contains(&key) {
            return Err(PersistError::DuplicateKey { line: line_no, key });
        }
        ms.insert(key, props);
    }
    Ok(ms)
}

/// Writes `ds` to `path` through a temporary file and an atomic rename, so
/// readers see either the old or the new complete file.
pub fn dump_store(ds: &MemoryState, path: &Path) -> Result<(), PersistError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "store path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp-{}", std::process::id()));
    let tmp_path = path.with_file_name(tmp_name);

    let result = (|| {
        let mut writer = BufWriter::new(File::create(&tmp_path)?);
        write_store(ds, &mut writer)?;
        writer.flush()?;
        writer.get_ref().sync_all()?;
        drop(writer);
        fs::rename(&tmp_path, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp_path);
    }
    result
}

pub fn write_store(ds: &MemoryState, mut writer: impl Write) -> Result<(), PersistError> {
    for (key, props) in ds.iter() {
        let json = entity_to_json(key, props)?;
        serde_json::to_writer(&mut writer, &json).map_err(io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn entity_to_json(key: &EntityKey, props: &PropertyMap) -> Result<Value, PersistError> {
    let props = map_to_json(props).map_err(|name| PersistError::NonFinite { key: key.clone(), name })?;
    let Value::Object(mut obj) = key_to_json(key) else {
        unreachable!()
    };
    obj.insert("props".into(), props);
    Ok(Value::Object(obj))
}

/// `{"kind": .., "id": ..}`
pub fn key_to_json(key: &EntityKey) -> Value {
    let id = match key.id() {
        EntityId::Int(v) => Value::from(*v),
        EntityId::Str(s) => Value::from(s.as_str()),
    };
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::from(key.kind()));
    obj.insert("id".into(), id);
    Value::Object(obj)
}

/// JSON form of a property value. Fails on non-finite floats.
pub fn value_to_json(value: &PropertyValue) -> Option<Value> {
    match value {
        PropertyValue::Atomic(a) => atomic_to_json(a),
        PropertyValue::MultiValued(list) => list
            .as_slice()
            .iter()
            .map(atomic_to_json)
            .collect::<Option<Vec<_>>>()
            .map(Value::Array),
        PropertyValue::Nested(map) => map_to_json(map).ok(),
    }
}

fn atomic_to_json(a: &AtomicValue) -> Option<Value> {
    Some(match a {
        AtomicValue::Text(s) => Value::from(s.as_str()),
        AtomicValue::Int(v) => Value::from(*v),
        AtomicValue::Float(v) => Value::Number(Number::from_f64(*v)?),
        AtomicValue::Bool(v) => Value::from(*v),
    })
}

// Err carries the offending property name.
fn map_to_json(map: &PropertyMap) -> Result<Value, String> {
    let mut obj = Map::new();
    for (name, value) in map.iter() {
        let json = value_to_json(value).ok_or_else(|| name.to_owned())?;
        obj.insert(name.to_owned(), json);
    }
    Ok(Value::Object(obj))
}

pub fn entity_from_json(json: &Value) -> Result<(EntityKey, PropertyMap), String> {
    let obj = json.as_object().ok_or("expected a JSON object")?;
    if let Some(extra) = obj.keys().find(|k| !matches!(k.as_str(), "kind" | "id" | "props")) {
        return Err(format!("unexpected field `{extra}`"));
    }
    let kind = match obj.get("kind") {
        Some(Value::String(s)) if !s.is_empty() => s.clone(),
        Some(Value::String(_)) => return Err("`kind` must not be empty".into()),
        Some(_) => return Err("`kind` must be a string".into()),
        None => return Err("missing `kind`".into()),
    };
    let id = match obj.get("id") {
        Some(Value::String(s)) => EntityId::Str(s.clone()),
        Some(Value::Number(n)) => EntityId::Int(n.as_i64().ok_or("`id` must be a string or a 64-bit integer")?),
        Some(_) => return Err("`id` must be a string or an integer".into()),
        None => return Err("missing `id`".into()),
    };
    let props = match obj.get("props") {
        Some(v) => map_from_json(v, "props")?,
        None => return Err("missing `props`".into()),
    };
    Ok((EntityKey::new(kind, id), props))
}

fn map_from_json(json: &Value, path: &str) -> Result<PropertyMap, String> {
    let obj = json.as_object().ok_or_else(|| format!("`{path}` must be an object"))?;
    let mut map = PropertyMap::new();
    for (name, value) in obj {
        if name.is_empty() {
            return Err(format!("empty property name in `{path}`"));
        }
        let child = format!("{path}.{name}");
        let value = value_from_json(value).map_err(|m| format!("`{child}`: {m}"))?;
        map.set(name.as_str(), value);
    }
    if map.version().is_err() {
        return Err(format!("`{path}.{VERSION_PROPERTY}` must be an integer >= 0"));
    }
    Ok(map)
}

pub fn value_from_json(json: &Value) -> Result<PropertyValue, String> {
    match json {
        Value::Array(items) => {
            let atoms = items
                .iter()
                .map(|item| match item {
                    Value::Array(_) | Value::Object(_) => Err("lists may only contain scalars".to_owned()),
                    other => atomic_from_json(other),
                })
                .collect::<Result<Vec<_>, _>>()?;
            ValueList::new(atoms)
                .map(PropertyValue::MultiValued)
                .ok_or_else(|| "lists must not be empty".to_owned())
        }
        Value::Object(_) => map_from_json(json, "nested").map(PropertyValue::Nested),
        other => atomic_from_json(other).map(PropertyValue::Atomic),
    }
}

fn atomic_from_json(json: &Value) -> Result<AtomicValue, String> {
    match json {
        Value::Null => Err("null values are not supported".into()),
        Value::Bool(b) => Ok(AtomicValue::Bool(*b)),
        Value::String(s) => Ok(AtomicValue::Text(s.clone())),
        Value::Number(n) => {
            if let Some(v) = n.as_i64() {
                Ok(AtomicValue::Int(v))
            } else if n.is_u64() {
                Err(format!("integer {n} does not fit in 64 signed bits"))
            } else {
                n.as_f64()
                    .map(AtomicValue::Float)
                    .ok_or_else(|| format!("unrepresentable number {n}"))
            }
        }
        Value::Array(_) | Value::Object(_) => unreachable!("handled by caller"),
    }
}
