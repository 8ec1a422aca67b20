use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::dataset::DatasetRecord;
use crate::reward::{score_outcome, RewardWeights};
use crate::toolcall::{extract_lenient, parse_completion, OutcomeTag};

/// How JSON validity is counted. Rewards always use strict parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityMode {
    /// The whole trimmed completion must be one JSON value.
    #[default]
    Strict,
    /// Any complete JSON array or object inside the text counts.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    pub weights: RewardWeights,
    pub validity: ValidityMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub id: u64,
    pub outcome: OutcomeTag,
    pub r_final: f64,
    pub exact_match: bool,
    pub json_valid: bool,
    pub completion_chars: usize,
    /// No completion was supplied; scored as empty.
    pub missing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_records: usize,
    pub n_missing: usize,
    pub json_validity: f64,
    pub overall_accuracy: f64,
    pub mean_reward: f64,
    pub mean_completion_chars: f64,
    /// Sorted by id.
    pub rows: Vec<RecordRow>,
}

impl EvalReport {
    /// Recomputes every aggregate from per-record rows. Rows are reduced in
    /// id order so the result does not depend on input order.
    pub fn from_rows(mut rows: Vec<RecordRow>) -> Self {
        rows.sort_by_key(|r| r.id);
        let n = rows.len();
        let frac = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
        let mean = |sum: f64| if n == 0 { 0.0 } else { sum / n as f64 };
        EvalReport {
            n_records: n,
            n_missing: rows.iter().filter(|r| r.missing).count(),
            json_validity: frac(rows.iter().filter(|r| r.json_valid).count()),
            overall_accuracy: frac(rows.iter().filter(|r| r.exact_match).count()),
            mean_reward: mean(rows.iter().map(|r| r.r_final).sum()),
            mean_completion_chars: mean(rows.iter().map(|r| r.completion_chars as f64).sum()),
            rows,
        }
    }

    pub fn missing_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.rows.iter().filter(|r| r.missing).map(|r| r.id)
    }

    pub fn outcome_counts(&self) -> Vec<(OutcomeTag, usize)> {
        OutcomeTag::ALL
            .into_iter()
            .map(|t| (t, self.rows.iter().filter(|r| r.outcome == t).count()))
            .collect()
    }
}

pub fn evaluate(records: &[DatasetRecord], completions: &HashMap<u64, String>, weights: &RewardWeights) -> EvalReport {
    evaluate_with(records, completions, &EvalOptions { weights: *weights, ..EvalOptions::default() })
}

pub fn evaluate_with(records: &[DatasetRecord], completions: &HashMap<u64, String>, opts: &EvalOptions) -> EvalReport {
    let rows = records
        .iter()
        .map(|record| {
            let (raw, missing) = match completions.get(&record.id) {
                Some(c) => (c.as_str(), false),
                None => ("", true),
            };
            let outcome = parse_completion(raw);
            let json_valid = match opts.validity {
                ValidityMode::Strict => outcome.tag().is_json(),
                ValidityMode::Lenient => extract_lenient(raw).tag().is_json(),
            };
            let breakdown = score_outcome(outcome, &record.answers, &opts.weights);
            RecordRow {
                id: record.id,
                outcome: breakdown.outcome,
                r_final: breakdown.r_final,
                exact_match: breakdown.exact_match,
                json_valid,
                completion_chars: raw.chars().count(),
                missing,
            }
        })
        .collect();
    EvalReport::from_rows(rows)
}
