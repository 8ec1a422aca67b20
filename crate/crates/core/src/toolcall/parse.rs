//! Strict classification of raw model completions.

use std::fmt;

use serde::de::IgnoredAny;
use serde::{Deserialize, Serialize};

use super::types::ToolCall;
use super::value::JsonValue;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseOutcome {
    Calls(Vec<ToolCall>),
    /// A JSON array or object is present but surrounded by other content.
    ExtraneousText,
    InvalidJson,
    Empty,
    /// Parses as one JSON value that is not a call or call list.
    NonConforming(String),
}

/// Tag of a [`ParseOutcome`] without its payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeTag {
    Calls,
    ExtraneousText,
    InvalidJson,
    Empty,
    NonConforming,
}

impl OutcomeTag {
    pub const ALL: [OutcomeTag; 5] = [
        OutcomeTag::Calls,
        OutcomeTag::ExtraneousText,
        OutcomeTag::InvalidJson,
        OutcomeTag::Empty,
        OutcomeTag::NonConforming,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeTag::Calls => "calls",
            OutcomeTag::ExtraneousText => "extraneous_text",
            OutcomeTag::InvalidJson => "invalid_json",
            OutcomeTag::Empty => "empty",
            OutcomeTag::NonConforming => "non_conforming",
        }
    }

    /// Outcomes that force a zero reward.
    pub fn is_fatal(self) -> bool {
        matches!(self, OutcomeTag::ExtraneousText | OutcomeTag::InvalidJson | OutcomeTag::Empty)
    }

    /// Whether the whole trimmed completion was one JSON value.
    pub fn is_json(self) -> bool {
        matches!(self, OutcomeTag::Calls | OutcomeTag::NonConforming)
    }
}

impl fmt::Display for OutcomeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OutcomeTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutcomeTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown outcome tag {s:?}"))
    }
}

impl ParseOutcome {
    pub fn tag(&self) -> OutcomeTag {
        match self {
            ParseOutcome::Calls(_) => OutcomeTag::Calls,
            ParseOutcome::ExtraneousText => OutcomeTag::ExtraneousText,
            ParseOutcome::InvalidJson => OutcomeTag::InvalidJson,
            ParseOutcome::Empty => OutcomeTag::Empty,
            ParseOutcome::NonConforming(_) => OutcomeTag::NonConforming,
        }
    }

    pub fn calls(&self) -> Option<&[ToolCall]> {
        match self {
            ParseOutcome::Calls(c) => Some(c),
            _ => None,
        }
    }
}

/// Classifies a raw completion.
///
/// Surrounding whitespace is ignored. The remainder must be exactly one JSON
/// value; a lone call object is normalized to a one-element list. If the
/// remainder is not one JSON value but some `[` or `{` in it opens a complete
/// JSON value, the completion is [`ParseOutcome::ExtraneousText`]; otherwise
/// it is [`ParseOutcome::InvalidJson`].
pub fn parse_completion(raw: &str) -> ParseOutcome {
    let text = raw.trim();
    if text.is_empty() {
        return ParseOutcome::Empty;
    }
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(value) => classify(JsonValue::from(value)),
        Err(_) if contains_embedded_value(text) => ParseOutcome::ExtraneousText,
        Err(_) => ParseOutcome::InvalidJson,
    }
}

/// Lenient extraction: the first complete JSON array or object anywhere in
/// the text, classified as if it were the whole completion.
pub fn extract_lenient(raw: &str) -> ParseOutcome {
    match parse_completion(raw) {
        ParseOutcome::ExtraneousText => {
            let text = raw.trim();
            for (i, _) in text.match_indices(['[', '{']) {
                let mut stream =
                    serde_json::Deserializer::from_str(&text[i..]).into_iter::<serde_json::Value>();
                if let Some(Ok(value)) = stream.next() {
                    return classify(JsonValue::from(value));
                }
            }
            ParseOutcome::InvalidJson
        }
        other => other,
    }
}

fn contains_embedded_value(text: &str) -> bool {
    text.match_indices(['[', '{']).any(|(i, _)| {
        let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<IgnoredAny>();
        matches!(stream.next(), Some(Ok(_)))
    })
}

fn classify(value: JsonValue) -> ParseOutcome {
    match &value {
        JsonValue::Array(items) => {
            let mut calls = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                match ToolCall::from_json(item) {
                    Ok(call) => calls.push(call),
                    Err(reason) => return ParseOutcome::NonConforming(format!("element {i}: {reason}")),
                }
            }
            ParseOutcome::Calls(calls)
        }
        JsonValue::Object(_) => match ToolCall::from_json(&value) {
            Ok(call) => ParseOutcome::Calls(vec![call]),
            Err(reason) => ParseOutcome::NonConforming(reason),
        },
        other => ParseOutcome::NonConforming(format!("top-level {} is not a call list", other.kind())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VALID: &str = r#"[{"name":"f","arguments":{}}]"#;

    #[test]
    fn leading_prose_is_extraneous() {
        let raw = format!("This is the correct tool call: {VALID}");
        assert_eq!(parse_completion(&raw), ParseOutcome::ExtraneousText);
    }

    #[test]
    fn whitespace_framing_is_tolerated() {
        let raw = format!("  {VALID}  \n");
        assert_eq!(parse_completion(&raw), ParseOutcome::Calls(vec![ToolCall::new("f")]));
    }

    #[test]
    fn empty_and_blank() {
        assert_eq!(parse_completion(""), ParseOutcome::Empty);
        assert_eq!(parse_completion(" \n\t "), ParseOutcome::Empty);
    }

    #[test]
    fn trailing_text_is_extraneous() {
        assert_eq!(parse_completion(&format!("{VALID} extra")), ParseOutcome::ExtraneousText);
    }

    #[test]
    fn single_object_is_normalized() {
        let out = parse_completion(r#"{"name":"f","arguments":{"x":1}}"#);
        assert_eq!(out, ParseOutcome::Calls(vec![ToolCall::new("f").with_arg("x", 1)]));
    }

    #[test]
    fn code_fence_is_extraneous() {
        let raw = format!("```json\n{VALID}\n```");
        assert_eq!(parse_completion(&raw), ParseOutcome::ExtraneousText);
    }

    #[test]
    fn broken_json_is_invalid() {
        assert_eq!(parse_completion(r#"[{"name":"f","#), ParseOutcome::InvalidJson);
        assert_eq!(parse_completion("no json here"), ParseOutcome::InvalidJson);
        assert_eq!(parse_completion("I counted 3 tools"), ParseOutcome::InvalidJson);
    }

    #[test]
    fn non_call_values_are_non_conforming() {
        for raw in ["42", "\"hi\"", "null", "[1,2]", r#"{"tool":"f"}"#, r#"[{"name":"f","arguments":{}},7]"#] {
            assert_eq!(parse_completion(raw).tag(), OutcomeTag::NonConforming, "{raw}");
        }
    }

    #[test]
    fn empty_array_is_an_empty_call_list() {
        assert_eq!(parse_completion("[]"), ParseOutcome::Calls(vec![]));
    }

    #[test]
    fn lenient_extraction_recovers_wrapped_calls() {
        let raw = format!("Sure! {VALID} Hope that helps.");
        assert_eq!(extract_lenient(&raw), ParseOutcome::Calls(vec![ToolCall::new("f")]));
        assert_eq!(extract_lenient("nothing"), ParseOutcome::InvalidJson);
    }

    #[test]
    fn tag_names_round_trip() {
        for tag in OutcomeTag::ALL {
            assert_eq!(tag.as_str().parse::<OutcomeTag>().unwrap(), tag);
        }
    }
}
