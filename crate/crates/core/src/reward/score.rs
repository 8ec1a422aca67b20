use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matching::{match_calls, MatchReport};
use crate::error::{Error, Result};
use crate::toolcall::{parse_completion, OutcomeTag, ParseOutcome, ToolCall};

/// Component weights of the reward. The defaults sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub json: f64,
    pub name: f64,
    pub args: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights { json: 0.125, name: 0.375, args: 0.5 }
    }
}

impl RewardWeights {
    pub fn new(json: f64, name: f64, args: f64) -> Result<Self> {
        let w = RewardWeights { json, name, args };
        w.validate()?;
        Ok(w)
    }

    /// Early-curriculum weights: JSON validity carries half the reward.
    pub fn json_first() -> Self {
        RewardWeights { json: 0.5, name: 0.375 * 0.5 / 0.875, args: 0.5 * 0.5 / 0.875 }
    }

    pub fn validate(&self) -> Result<()> {
        for (label, w) in [("json", self.json), ("name", self.name), ("args", self.args)] {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidConfig(format!("weight {label} must be finite and >= 0, got {w}")));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.json + self.name + self.args
    }
}

impl FromStr for RewardWeights {
    type Err = Error;

    /// Parses `json,name,args`, e.g. `0.125,0.375,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [json, name, args] = parts.as_slice() else {
            return Err(Error::InvalidConfig(format!("weights need three comma-separated values, got {s:?}")));
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("weight {v:?} is not a number")))
        };
        RewardWeights::new(num(json)?, num(name)?, num(args)?)
    }
}

impl fmt::Display for RewardWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.json, self.name, self.args)
    }
}

/// Every component of one scored completion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardBreakdown {
    pub outcome: OutcomeTag,
    pub r_json: f64,
    pub r_fn: f64,
    pub r_args: f64,
    pub r_fn_scaled: f64,
    pub r_args_scaled: f64,
    pub r_final: f64,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    pub match_report: Option<MatchReport>,
    /// Predicted calls equal the expected calls as a multiset, with no extra
    /// argument keys and no extra calls.
    pub exact_match: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RewardBreakdown {
    fn zero(outcome: OutcomeTag, detail: Option<String>) -> Self {
        RewardBreakdown {
            outcome,
            r_json: 0.0,
            r_fn: 0.0,
            r_args: 0.0,
            r_fn_scaled: 0.0,
            r_args_scaled: 0.0,
            r_final: 0.0,
            match_report: None,
            exact_match: false,
            detail,
        }
    }

    pub fn scaling_factor(&self) -> Option<f64> {
        self.match_report.as_ref().map(|m| m.scaling_factor)
    }
}

pub fn compute_reward(raw: &str, expected: &[ToolCall], weights: &RewardWeights) -> RewardBreakdown {
    score_outcome(parse_completion(raw), expected, weights)
}

/// Scores an already classified completion.
pub fn score_outcome(outcome: ParseOutcome, expected: &[ToolCall], weights: &RewardWeights) -> RewardBreakdown {
    let predicted = match outcome {
        ParseOutcome::Calls(calls) => calls,
        ParseOutcome::NonConforming(reason) => {
            let mut b = RewardBreakdown::zero(OutcomeTag::NonConforming, Some(reason));
            b.r_json = weights.json;
            b.r_final = weights.json;
            return b;
        }
        other => return RewardBreakdown::zero(other.tag(), None),
    };
    score_calls(&predicted, expected, weights)
}

/// Scores a parsed call list.
pub fn score_calls(predicted: &[ToolCall], expected: &[ToolCall], weights: &RewardWeights) -> RewardBreakdown {
    let report = match_calls(expected, predicted);
    let n_expected = expected.len();
    let n_predicted = predicted.len();
    let denom = n_expected.max(1) as f64;
    let correct = report.n_correct_functions as f64;
    let arg_sum = report.arg_score_sum();
    // Σ A_i = numer / denom_a; keep the products exact where the result is representable.
    let (arg_numer, arg_denom) = (*arg_sum.numer() as f64, *arg_sum.denom() as f64);

    let (r_fn, r_args) = if n_expected == 0 && n_predicted == 0 {
        (weights.name, weights.args)
    } else {
        (
            weights.name * correct / denom,
            weights.args * arg_numer / (arg_denom * denom),
        )
    };
    let (r_fn_scaled, r_args_scaled) = if n_predicted > n_expected {
        // R · max(n_e,1)/n_p, with the max(n_e,1) factors cancelled.
        let n_p = n_predicted as f64;
        (weights.name * correct / n_p, weights.args * arg_numer / (arg_denom * n_p))
    } else {
        (r_fn, r_args)
    };

    RewardBreakdown {
        outcome: OutcomeTag::Calls,
        r_json: weights.json,
        r_fn,
        r_args,
        r_fn_scaled,
        r_args_scaled,
        r_final: r_fn_scaled + r_args_scaled + weights.json,
        exact_match: is_exact_set_match(expected, predicted),
        match_report: Some(report),
        detail: None,
    }
}

fn is_exact_set_match(expected: &[ToolCall], predicted: &[ToolCall]) -> bool {
    if expected.len() != predicted.len() {
        return false;
    }
    let mut used = vec![false; predicted.len()];
    expected.iter().all(|e| {
        let hit = predicted
            .iter()
            .enumerate()
            .find(|(i, p)| !used[*i] && e.exact_eq(p))
            .map(|(i, _)| i);
        hit.map(|i| used[i] = true).is_some()
    })
}

/// Element-wise [`compute_reward`], order preserving.
pub fn reward_batch<S: AsRef<str>>(
    raws: &[S],
    expected: &[Vec<ToolCall>],
    weights: &RewardWeights,
) -> Result<Vec<RewardBreakdown>> {
    if raws.len() != expected.len() {
        return Err(Error::SizeMismatch { completions: raws.len(), expected: expected.len() });
    }
    Ok(raws
        .iter()
        .zip(expected)
        .map(|(raw, exp)| compute_reward(raw.as_ref(), exp, weights))
        .collect())
}
