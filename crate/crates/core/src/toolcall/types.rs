use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::value::{JsonMap, JsonValue};

/// One function invocation: a name and its arguments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolCall {
    pub name: String,
    pub arguments: JsonMap,
}

impl ToolCall {
    pub fn new(name: impl Into<String>) -> Self {
        ToolCall { name: name.into(), arguments: JsonMap::new() }
    }

    pub fn with_arg(mut self, key: impl Into<String>, value: impl Into<JsonValue>) -> Self {
        self.arguments.insert(key.into(), value.into());
        self
    }

    /// Validates a JSON value as a call object: exactly the keys `name` and
    /// `arguments`, a non-empty string name and an object of arguments.
    pub fn from_json(value: &JsonValue) -> Result<ToolCall, String> {
        let obj = value
            .as_object()
            .ok_or_else(|| format!("call must be an object, found {}", value.kind()))?;
        if obj.len() != 2 || !obj.contains_key("name") || !obj.contains_key("arguments") {
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            return Err(format!("call keys must be exactly [name, arguments], found {keys:?}"));
        }
        let name = match &obj["name"] {
            JsonValue::String(s) if !s.is_empty() => s.clone(),
            JsonValue::String(_) => return Err("call name is empty".into()),
            other => return Err(format!("call name must be a string, found {}", other.kind())),
        };
        let arguments = match &obj["arguments"] {
            JsonValue::Object(m) => m.clone(),
            other => return Err(format!("call arguments must be an object, found {}", other.kind())),
        };
        Ok(ToolCall { name, arguments })
    }

    /// Whether `other` has the same name and exactly the same argument set.
    pub fn exact_eq(&self, other: &ToolCall) -> bool {
        self == other
    }
}

/// Parses a JSON array of call objects (the dataset `answers` shape).
pub fn calls_from_json(value: &JsonValue) -> Result<Vec<ToolCall>, String> {
    match value {
        JsonValue::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, item)| ToolCall::from_json(item).map_err(|e| format!("call {i}: {e}")))
            .collect(),
        other => Err(format!("expected an array of calls, found {}", other.kind())),
    }
}

/// Compact JSON serialization of a call list.
pub fn serialize_calls(calls: &[ToolCall]) -> String {
    serde_json::to_string(calls).expect("ToolCall serialization is infallible")
}

/// A tool from the catalog offered to the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub parameters: IndexMap<String, ParamSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    #[serde(rename = "type", default)]
    pub kind: String,
    /// Catalogs that omit the flag mark optional parameters in the type tag
    /// (`"str, optional"`).
    #[serde(default = "default_required")]
    pub required: bool,
    #[serde(default)]
    pub description: String,
}

fn default_required() -> bool {
    true
}

impl ParamSpec {
    pub fn new(kind: impl Into<String>, required: bool, description: impl Into<String>) -> Self {
        ParamSpec { kind: kind.into(), required, description: description.into() }
    }
}

/// Reads a tool catalog, accepting parameter entries with or without an
/// explicit `required` flag.
pub fn tools_from_json(value: &serde_json::Value) -> Result<Vec<ToolSpec>, String> {
    let items = value
        .as_array()
        .ok_or_else(|| "tools must be an array".to_string())?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let mut spec: ToolSpec =
                serde_json::from_value(item.clone()).map_err(|e| format!("tool {i}: {e}"))?;
            let has_flag = |p: &str| {
                item.get("parameters")
                    .and_then(|ps| ps.get(p))
                    .and_then(|p| p.get("required"))
                    .is_some()
            };
            for (pname, param) in spec.parameters.iter_mut() {
                if !has_flag(pname) {
                    param.required = !param.kind.contains("optional");
                }
            }
            Ok(spec)
        })
        .collect()
}
