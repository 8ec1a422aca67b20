//! One-to-one pairing of predicted calls with expected calls.
//!
//! Only calls with equal names may pair. The chosen matching maximizes the
//! summed argument score, then the number of pairs; among equally good
//! matchings the lexicographically smallest `(expected, predicted)` sequence
//! wins. Instances with at most [`EXHAUSTIVE_LIMIT`] calls on each side are
//! solved by exhaustive search, larger ones greedily by best score.

use num_rational::Ratio;
use serde::Serialize;

use crate::toolcall::{canonical_equal, ToolCall};

/// Largest list length (per side) solved exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 6;

/// Fraction of an expected call's arguments reproduced by a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArgScore {
    pub correct: u32,
    pub total: u32,
}

impl ArgScore {
    /// Compares every expected key against the predicted value. Extra
    /// predicted keys are ignored.
    pub fn of(expected: &ToolCall, predicted: &ToolCall) -> Self {
        let correct = expected
            .arguments
            .iter()
            .filter(|(k, v)| predicted.arguments.get(*k).is_some_and(|p| canonical_equal(v, p)))
            .count();
        ArgScore { correct: correct as u32, total: expected.arguments.len() as u32 }
    }

    /// Exact value; a call without expected arguments scores 1.
    pub fn ratio(self) -> Ratio<u64> {
        if self.total == 0 {
            Ratio::from_integer(1)
        } else {
            Ratio::new(self.correct as u64, self.total as u64)
        }
    }

    pub fn value(self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedPair {
    pub expected: usize,
    pub predicted: usize,
    pub args: ArgScore,
    /// `args` as a fraction in `[0, 1]`.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub n_expected: usize,
    pub n_predicted: usize,
    pub n_correct_functions: usize,
    /// Sorted by expected index.
    pub pairs: Vec<MatchedPair>,
    pub scaling_factor: f64,
}

impl MatchReport {
    /// Exact sum of the pair argument scores.
    pub fn arg_score_sum(&self) -> Ratio<u64> {
        self.pairs.iter().map(|p| p.args.ratio()).sum()
    }
}

/// Over-generation factor: `max(n_expected, 1) / n_predicted` when more calls
/// are predicted than expected, else 1.
pub fn scaling_factor(n_expected: usize, n_predicted: usize) -> f64 {
    if n_predicted > n_expected {
        n_expected.max(1) as f64 / n_predicted as f64
    } else {
        1.0
    }
}

pub fn match_calls(expected: &[ToolCall], predicted: &[ToolCall]) -> MatchReport {
    let candidates: Vec<Vec<Option<ArgScore>>> = expected
        .iter()
        .map(|e| {
            predicted
                .iter()
                .map(|p| (e.name == p.name).then(|| ArgScore::of(e, p)))
                .collect()
        })
        .collect();

    let chosen = if expected.len() <= EXHAUSTIVE_LIMIT && predicted.len() <= EXHAUSTIVE_LIMIT {
        exhaustive(&candidates, predicted.len())
    } else {
        greedy(&candidates)
    };

    let pairs: Vec<MatchedPair> = chosen
        .into_iter()
        .map(|(e, p)| {
            let args = candidates[e][p].expect("matched pair has equal names");
            MatchedPair { expected: e, predicted: p, args, score: args.value() }
        })
        .collect();

    MatchReport {
        n_expected: expected.len(),
        n_predicted: predicted.len(),
        n_correct_functions: pairs.len(),
        pairs,
        scaling_factor: scaling_factor(expected.len(), predicted.len()),
    }
}

struct Search<'a> {
    candidates: &'a [Vec<Option<ArgScore>>],
    used: Vec<bool>,
    current: Vec<(usize, usize)>,
    best: Vec<(usize, usize)>,
    best_sum: Ratio<u64>,
}

impl Search<'_> {
    // Depth-first over expected indices, trying predicted indices in
    // ascending order and "unmatched" last, so the first optimum reached is
    // the lexicographically smallest one.
    fn visit(&mut self, row: usize, sum: Ratio<u64>) {
        if row == self.candidates.len() {
            let better = sum > self.best_sum
                || (sum == self.best_sum && self.current.len() > self.best.len());
            if better {
                self.best_sum = sum;
                self.best.clone_from(&self.current);
            }
            return;
        }
        for col in 0..self.used.len() {
            if self.used[col] {
                continue;
            }
            if let Some(score) = self.candidates[row][col] {
                self.used[col] = true;
                self.current.push((row, col));
                self.visit(row + 1, sum + score.ratio());
                self.current.pop();
                self.used[col] = false;
            }
        }
        self.visit(row + 1, sum);
    }
}

fn exhaustive(candidates: &[Vec<Option<ArgScore>>], n_predicted: usize) -> Vec<(usize, usize)> {
    let mut search = Search {
        candidates,
        used: vec![false; n_predicted],
        current: Vec::new(),
        best: Vec::new(),
        best_sum: Ratio::from_integer(0),
    };
    search.visit(0, Ratio::from_integer(0));
    search.best
}

fn greedy(candidates: &[Vec<Option<ArgScore>>]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(Ratio<u64>, usize, usize)> = candidates
        .iter()
        .enumerate()
        .flat_map(|(e, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(p, s)| s.map(|s| (s.ratio(), e, p)))
        })
        .collect();
    edges.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let n_predicted = candidates.first().map_or(0, Vec::len);
    let mut used_e = vec![false; candidates.len()];
    let mut used_p = vec![false; n_predicted];
    let mut chosen = Vec::new();
    for (_, e, p) in edges {
        if !used_e[e] && !used_p[p] {
            used_e[e] = true;
            used_p[p] = true;
            chosen.push((e, p));
        }
    }
    chosen.sort_unstable();
    chosen
}
