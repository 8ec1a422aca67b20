//! xLAM-style dataset records: reading, writing and train/test splitting.
//!
//! `answers` and `tools` may be stored in-line or as JSON-encoded strings;
//! both decode to the same record.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::toolcall::{calls_from_json, tools_from_json, JsonValue, ToolCall, ToolSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetRecord {
    pub id: u64,
    pub query: String,
    pub answers: Vec<ToolCall>,
    pub tools: Vec<ToolSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    JsonLines,
    JsonArray,
}

impl DatasetFormat {
    /// A document whose first non-blank character is `[` is a JSON array.
    pub fn detect(text: &str) -> Self {
        if text.trim_start().starts_with('[') {
            DatasetFormat::JsonArray
        } else {
            DatasetFormat::JsonLines
        }
    }
}

/// How `answers` and `tools` are written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldEncoding {
    #[default]
    Inline,
    /// JSON-encoded strings, as the upstream dataset stores them.
    Stringified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedRecord {
    /// 1-based line (JSON lines) or element (JSON array) number.
    pub position: usize,
    pub id: Option<u64>,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadedDataset {
    pub records: Vec<DatasetRecord>,
    pub malformed: Vec<MalformedRecord>,
}

pub fn load_dataset(path: impl AsRef<Path>, format: Option<DatasetFormat>) -> Result<LoadedDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, format.unwrap_or_else(|| DatasetFormat::detect(&text)))
}

pub fn parse_dataset(text: &str, format: DatasetFormat) -> Result<LoadedDataset> {
    let rows: Vec<(usize, std::result::Result<Value, String>)> = match format {
        DatasetFormat::JsonLines => text
            .lines()
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(i, line)| (i + 1, serde_json::from_str(line).map_err(|e| e.to_string())))
            .collect(),
        DatasetFormat::JsonArray => {
            if text.trim().is_empty() {
                Vec::new()
            } else {
                let items: Vec<Value> = serde_json::from_str(text)
                    .map_err(|e| Error::Validation(format!("dataset is not a JSON array: {e}")))?;
                items.into_iter().enumerate().map(|(i, v)| (i + 1, Ok(v))).collect()
            }
        }
    };

    let mut out = LoadedDataset::default();
    let mut seen = HashSet::new();
    for (position, row) in rows {
        let decoded = row.map_err(|e| (None, e)).and_then(|v| decode_record(&v));
        match decoded {
            Ok(record) if !seen.insert(record.id) => out.malformed.push(MalformedRecord {
                position,
                id: Some(record.id),
                reason: format!("duplicate id {}", record.id),
            }),
            Ok(record) => out.records.push(record),
            Err((id, reason)) => out.malformed.push(MalformedRecord { position, id, reason }),
        }
    }
    Ok(out)
}

/// Decodes one row. Errors carry the id when it could be read.
pub fn decode_record(value: &Value) -> std::result::Result<DatasetRecord, (Option<u64>, String)> {
    let obj = value.as_object().ok_or((None, "record is not an object".to_string()))?;
    let id = match obj.get("id") {
        Some(v) => v.as_u64().ok_or((None, format!("id must be a non-negative integer, found {v}")))?,
        None => return Err((None, "missing field `id`".into())),
    };
    let field = |name: &str| obj.get(name).ok_or((Some(id), format!("missing field `{name}`")));
    let query = field("query")?
        .as_str()
        .ok_or((Some(id), "query must be a string".to_string()))?
        .to_string();
    let answers = unstringify(field("answers")?)
        .and_then(|v| calls_from_json(&JsonValue::from(v)))
        .map_err(|e| (Some(id), format!("answers: {e}")))?;
    let tools = unstringify(field("tools")?)
        .and_then(|v| tools_from_json(&v))
        .map_err(|e| (Some(id), format!("tools: {e}")))?;
    Ok(DatasetRecord { id, query, answers, tools })
}

fn unstringify(value: &Value) -> std::result::Result<Value, String> {
    match value {
        Value::String(s) => serde_json::from_str(s).map_err(|e| format!("embedded JSON does not parse: {e}")),
        other => Ok(other.clone()),
    }
}

pub fn encode_record(record: &DatasetRecord, encoding: FieldEncoding) -> Value {
    let answers = serde_json::to_value(&record.answers).expect("calls serialize");
    let tools = serde_json::to_value(&record.tools).expect("tools serialize");
    let (answers, tools) = match encoding {
        FieldEncoding::Inline => (answers, tools),
        FieldEncoding::Stringified => (Value::String(answers.to_string()), Value::String(tools.to_string())),
    };
    serde_json::json!({
        "id": record.id,
        "query": record.query,
        "answers": answers,
        "tools": tools,
    })
}

pub fn write_dataset(
    path: impl AsRef<Path>,
    records: &[DatasetRecord],
    format: DatasetFormat,
    encoding: FieldEncoding,
) -> Result<()> {
    let path = path.as_ref();
    let rows: Vec<Value> = records.iter().map(|r| encode_record(r, encoding)).collect();
    let text = match format {
        DatasetFormat::JsonLines => rows.iter().map(|r| format!("{r}\n")).collect::<String>(),
        DatasetFormat::JsonArray => {
            serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
        }
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CompletionRow {
    pub id: u64,
    pub completion: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadedCompletions {
    pub completions: HashMap<u64, String>,
    pub malformed: Vec<MalformedRecord>,
}

/// Reads JSON lines of `{"id": .., "completion": ..}`. A repeated id keeps
/// the last completion.
pub fn load_completions(path: impl AsRef<Path>) -> Result<LoadedCompletions> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_completions(&text))
}

pub fn parse_completions(text: &str) -> LoadedCompletions {
    let mut out = LoadedCompletions::default();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match serde_json::from_str::<CompletionRow>(line) {
            Ok(row) => {
                out.completions.insert(row.id, row.completion);
            }
            Err(e) => out.malformed.push(MalformedRecord { position: i + 1, id: None, reason: e.to_string() }),
        }
    }
    out
}

pub fn write_completions(path: impl AsRef<Path>, rows: &[CompletionRow]) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut buf, row).expect("completion rows serialize");
        buf.write_all(b"\n").expect("writing to a Vec cannot fail");
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Seeded disjoint train/test subsets.
pub fn split_sample<T: Clone>(records: &[T], train_n: usize, test_n: usize, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    let needed = train_n.checked_add(test_n);
    if needed.is_none_or(|n| n > records.len()) {
        return Err(Error::Oversubscribed { train: train_n, test: test_n, available: records.len() });
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |idx: &[usize]| idx.iter().map(|&i| records[i].clone()).collect::<Vec<T>>();
    Ok((pick(&order[..train_n]), pick(&order[train_n..train_n + test_n])))
}

#[cfg(test)]
mod tests {
    use super::*;

    const STRINGIFIED_ROW: &str = r#"{"id": 0, "query": "Where can I find live giveaways for beta access and games?", "answers": "[{\"name\": \"live_giveaways_by_type\", \"arguments\": {\"type\": \"beta\"}}, {\"name\": \"live_giveaways_by_type\", \"arguments\": {\"type\": \"game\"}}]", "tools": "[{\"name\": \"live_giveaways_by_type\", \"description\": \"Retrieve live giveaways from the GamerPower API based on the specified type.\", \"parameters\": {\"type\": {\"description\": \"The type of giveaways to retrieve (e.g., game, loot, beta).\", \"type\": \"str\", \"default\": \"game\"}}}]"}"#;

    #[test]
    fn stringified_fields_decode() {
        let ds = parse_dataset(STRINGIFIED_ROW, DatasetFormat::JsonLines).unwrap();
        assert!(ds.malformed.is_empty());
        let rec = &ds.records[0];
        assert_eq!(rec.answers.len(), 2);
        assert_eq!(rec.answers[1], ToolCall::new("live_giveaways_by_type").with_arg("type", "game"));
        assert_eq!(rec.tools[0].parameters["type"].kind, "str");
        assert!(rec.tools[0].parameters["type"].required);
    }

    #[test]
    fn inline_and_stringified_are_equivalent() {
        let stringified = parse_dataset(STRINGIFIED_ROW, DatasetFormat::JsonLines).unwrap().records;
        let inline = encode_record(&stringified[0], FieldEncoding::Inline).to_string();
        assert!(inline.contains(r#""answers":[{"#));
        let reparsed = parse_dataset(&inline, DatasetFormat::JsonLines).unwrap().records;
        assert_eq!(reparsed, stringified);
    }

    #[test]
    fn empty_input() {
        for format in [DatasetFormat::JsonLines, DatasetFormat::JsonArray] {
            let ds = parse_dataset("", format).unwrap();
            assert!(ds.records.is_empty() && ds.malformed.is_empty());
        }
    }

    #[test]
    fn malformed_rows_are_counted_and_skipped() {
        let text = [
            r#"{"id": 1, "query": "q", "answers": [], "tools": []}"#,
            r#"{"id": 2, "query": "q", "tools": []}"#,
            "not json",
            r#"{"id": 3, "query": "q", "answers": "[{\"name\": 1}]", "tools": []}"#,
            r#"{"id": 1, "query": "dup", "answers": [], "tools": []}"#,
        ]
        .join("\n");
        let ds = parse_dataset(&text, DatasetFormat::JsonLines).unwrap();
        assert_eq!(ds.records.len(), 1);
        let got: Vec<(usize, Option<u64>)> = ds.malformed.iter().map(|m| (m.position, m.id)).collect();
        assert_eq!(got, vec![(2, Some(2)), (3, None), (4, Some(3)), (5, Some(1))]);
        assert!(ds.malformed[0].reason.contains("answers"));
    }

    #[test]
    fn array_format() {
        let text = format!("[{STRINGIFIED_ROW}]");
        assert_eq!(DatasetFormat::detect(&text), DatasetFormat::JsonArray);
        let ds = parse_dataset(&text, DatasetFormat::JsonArray).unwrap();
        assert_eq!(ds.records.len(), 1);
        assert!(parse_dataset("[1,", DatasetFormat::JsonArray).is_err());
    }

    #[test]
    fn split_is_disjoint_and_seeded() {
        let ids: Vec<u32> = (0..10).collect();
        let (train, test) = split_sample(&ids, 0, 10, 3).unwrap();
        assert!(train.is_empty());
        let mut sorted = test.clone();
        sorted.sort();
        assert_eq!(sorted, ids);
        assert_eq!(split_sample(&ids, 6, 4, 3).unwrap(), split_sample(&ids, 6, 4, 3).unwrap());
        assert!(matches!(
            split_sample(&ids, 6, 5, 3),
            Err(Error::Oversubscribed { train: 6, test: 5, available: 10 })
        ));
    }

    #[test]
    fn completions_jsonl() {
        let loaded = parse_completions("{\"id\":1,\"completion\":\"[]\"}\n\n{\"id\":2}\n");
        assert_eq!(loaded.completions[&1], "[]");
        assert_eq!(loaded.malformed.len(), 1);
        assert_eq!(loaded.malformed[0].position, 3);
    }
}
