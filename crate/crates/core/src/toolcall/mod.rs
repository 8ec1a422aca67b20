//! Tool-call domain model and the strict completion parser.

mod parse;
mod types;
mod value;

pub use parse::{extract_lenient, parse_completion, OutcomeTag, ParseOutcome};
pub use types::{calls_from_json, serialize_calls, tools_from_json, ParamSpec, ToolCall, ToolSpec};
pub use value::{canonical_equal, JsonMap, JsonValue, Number};
