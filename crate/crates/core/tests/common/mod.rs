//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)]

use itertools::Itertools;
use num_rational::Ratio;
use rand::seq::IndexedRandom;
use rand::Rng;
use toolreward_core::toolcall::{canonical_equal, JsonValue, ToolCall};

pub const NAMES: &[&str] = &["f", "g", "h"];
pub const KEYS: &[&str] = &["a", "b", "c", "d"];

pub fn random_value<R: Rng>(rng: &mut R) -> JsonValue {
    match rng.random_range(0..5) {
        0 => JsonValue::from(rng.random_range(0..3) as i64),
        1 => JsonValue::from(["x", "y", "Secure123", "secure123"].choose(rng).copied().unwrap()),
        2 => JsonValue::from(rng.random_bool(0.5)),
        3 => JsonValue::from([0.3, 7.0, 1.5].choose(rng).copied().unwrap()),
        _ => format!("[{}]", rng.random_range(0..2)).parse().unwrap(),
    }
}

pub fn random_call<R: Rng>(rng: &mut R) -> ToolCall {
    let mut call = ToolCall::new(*NAMES.choose(rng).unwrap());
    let n_args = rng.random_range(0..=3);
    for key in KEYS.choose_multiple(rng, n_args) {
        call.arguments.insert(key.to_string(), random_value(rng));
    }
    call
}

pub fn random_calls<R: Rng>(rng: &mut R, max_len: usize) -> Vec<ToolCall> {
    let n = rng.random_range(0..=max_len);
    (0..n).map(|_| random_call(rng)).collect()
}

/// A prediction correlated with `expected`: copies, perturbations, drops and
/// extra calls, so that many pairs share names and arguments.
pub fn perturbed<R: Rng>(rng: &mut R, expected: &[ToolCall], max_len: usize) -> Vec<ToolCall> {
    let mut out = Vec::new();
    for original in expected {
        if !rng.random_bool(0.8) {
            continue;
        }
        let mut c = original.clone();
        let keys: Vec<String> = c.arguments.keys().cloned().collect();
        for k in keys {
            match rng.random_range(0..6) {
                0 => {
                    c.arguments.shift_remove(&k);
                }
                1 => {
                    c.arguments.insert(k, random_value(rng));
                }
                _ => {}
            }
        }
        if rng.random_bool(0.1) {
            c.arguments.insert("extra".into(), JsonValue::from(1i64));
        }
        if rng.random_bool(0.15) {
            c.name = NAMES.choose(rng).unwrap().to_string();
        }
        out.push(c);
    }
    while out.len() < max_len && rng.random_bool(0.3) {
        out.push(random_call(rng));
    }
    // shuffle order
    let n = out.len();
    for i in (1..n).rev() {
        out.swap(i, rng.random_range(0..=i));
    }
    out
}

/// Argument score computed directly from its definition.
pub fn oracle_arg_score(expected: &ToolCall, predicted: &ToolCall) -> Ratio<u64> {
    let total = expected.arguments.len() as u64;
    if total == 0 {
        return Ratio::from_integer(1);
    }
    let correct = expected
        .arguments
        .iter()
        .filter(|(k, v)| matches!(predicted.arguments.get(*k), Some(p) if canonical_equal(v, p)))
        .count() as u64;
    Ratio::new(correct, total)
}

/// Maximum summed argument score over every one-to-one name-equal matching,
/// by enumerating each subset of expected calls against each ordered
/// selection of predicted calls. Also returns the largest matching size among
/// the optimal ones.
pub fn oracle_best_matching(expected: &[ToolCall], predicted: &[ToolCall]) -> (Ratio<u64>, usize) {
    let mut best = (Ratio::from_integer(0), 0usize);
    for k in 0..=expected.len().min(predicted.len()) {
        for subset in (0..expected.len()).combinations(k) {
            for perm in (0..predicted.len()).permutations(k) {
                if subset.iter().zip(&perm).any(|(&e, &p)| expected[e].name != predicted[p].name) {
                    continue;
                }
                let sum: Ratio<u64> = subset
                    .iter()
                    .zip(&perm)
                    .map(|(&e, &p)| oracle_arg_score(&expected[e], &predicted[p]))
                    .sum();
                if sum > best.0 || (sum == best.0 && k > best.1) {
                    best = (sum, k);
                }
            }
        }
    }
    best
}

/// Reward from the closed-form component formulas, given the oracle's
/// matching totals. Exact rational arithmetic.
pub fn oracle_reward(
    n_expected: usize,
    n_predicted: usize,
    n_correct: usize,
    arg_sum: Ratio<u64>,
) -> Ratio<u64> {
    // default weights 1/8, 3/8, 1/2
    let w_json = Ratio::new(1u64, 8);
    let w_fn = Ratio::new(3u64, 8);
    let w_args = Ratio::new(1u64, 2);
    let d = Ratio::from_integer(n_expected.max(1) as u64);
    let (r_fn, r_args) = if n_expected == 0 && n_predicted == 0 {
        (w_fn, w_args)
    } else {
        (w_fn / d * Ratio::from_integer(n_correct as u64), w_args / d * arg_sum)
    };
    let scale = if n_predicted > n_expected {
        d / Ratio::from_integer(n_predicted as u64)
    } else {
        Ratio::from_integer(1)
    };
    r_fn * scale + r_args * scale + w_json
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn random_text<R: Rng>(rng: &mut R, max_len: usize) -> String {
    const ALPHABET: &[u8] = b"abcXYZ019 :.,!?-_\"'`#*[]{}()<>/\\\n";
    let n = rng.random_range(1..=max_len);
    (0..n).map(|_| *ALPHABET.choose(rng).unwrap() as char).collect()
}
