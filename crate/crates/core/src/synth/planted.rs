//! Corpora with exactly one planted behaviour per record, assigned by quota
//! so the planted rates are exact at any corpus size.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::universe::SynthUniverse;
use crate::error::{Error, Result};
use crate::harness::{CompletionRow, DatasetRecord};
use crate::toolcall::{serialize_calls, JsonValue, ToolCall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorTag {
    Perfect,
    ExtraneousText,
    InvalidJson,
    WrongName,
    WrongArgValue,
    MissingArg,
    ExtraCall,
}

impl ErrorTag {
    pub const ALL: [ErrorTag; 7] = [
        ErrorTag::Perfect,
        ErrorTag::ExtraneousText,
        ErrorTag::InvalidJson,
        ErrorTag::WrongName,
        ErrorTag::WrongArgValue,
        ErrorTag::MissingArg,
        ErrorTag::ExtraCall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorTag::Perfect => "perfect",
            ErrorTag::ExtraneousText => "extraneous-text",
            ErrorTag::InvalidJson => "invalid-json",
            ErrorTag::WrongName => "wrong-name",
            ErrorTag::WrongArgValue => "wrong-arg-value",
            ErrorTag::MissingArg => "missing-arg",
            ErrorTag::ExtraCall => "extra-call",
        }
    }

    /// Needs an expected call with at least one argument.
    fn needs_argument(self) -> bool {
        matches!(self, ErrorTag::WrongArgValue | ErrorTag::MissingArg)
    }
}

impl fmt::Display for ErrorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "extraneous" {
            return Ok(ErrorTag::ExtraneousText);
        }
        ErrorTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s || t.as_str().replace('-', "_") == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown error tag {s:?}")))
    }
}

/// Requested fraction per error tag; the remainder is perfect completions.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ErrorMix(pub BTreeMap<ErrorTag, f64>);

impl ErrorMix {
    pub fn new<I: IntoIterator<Item = (ErrorTag, f64)>>(entries: I) -> Self {
        ErrorMix(entries.into_iter().collect())
    }

    pub fn validate(&self) -> Result<()> {
        for (tag, &f) in &self.0 {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidConfig(format!("fraction for {tag} must be in [0, 1], got {f}")));
            }
        }
        let total: f64 = self.0.values().sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::InvalidConfig(format!("error fractions sum to {total}, above 1")));
        }
        Ok(())
    }

    /// Largest-remainder apportionment of `n` records, perfect included.
    pub fn quotas(&self, n: usize) -> Result<BTreeMap<ErrorTag, usize>> {
        self.validate()?;
        let planted: f64 = self.0.iter().filter(|(t, _)| **t != ErrorTag::Perfect).map(|(_, f)| f).sum();
        let mut shares: BTreeMap<ErrorTag, f64> = self.0.clone();
        shares.insert(ErrorTag::Perfect, (1.0 - planted).max(0.0));

        let mut seats: BTreeMap<ErrorTag, usize> = BTreeMap::new();
        let mut remainders: Vec<(f64, ErrorTag)> = Vec::new();
        for (&tag, &f) in &shares {
            let exact = f * n as f64;
            let floor = exact.floor();
            seats.insert(tag, floor as usize);
            remainders.push((exact - floor, tag));
        }
        let assigned: usize = seats.values().sum();
        remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, tag) in remainders.into_iter().take(n.saturating_sub(assigned)) {
            *seats.get_mut(&tag).expect("tag present") += 1;
        }
        seats.retain(|_, c| *c > 0);
        Ok(seats)
    }
}

impl FromStr for ErrorMix {
    type Err = Error;

    /// Parses `tag=fraction` pairs separated by commas, e.g.
    /// `extraneous=0.1,wrong-name=0.2`. The empty string is the empty mix.
    fn from_str(s: &str) -> Result<Self> {
        let mut mix = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (tag, frac) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("expected tag=fraction, got {part:?}")))?;
            let frac: f64 = frac
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("fraction {frac:?} is not a number")))?;
            *mix.entry(tag.parse::<ErrorTag>()?).or_insert(0.0) += frac;
        }
        let mix = ErrorMix(mix);
        mix.validate()?;
        Ok(mix)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedRecord {
    pub record: DatasetRecord,
    pub completion: String,
    pub tag: ErrorTag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedCorpus {
    pub records: Vec<PlantedRecord>,
    /// Empirical tag frequencies of `records`.
    pub rates: BTreeMap<ErrorTag, f64>,
}

impl PlantedCorpus {
    pub fn dataset(&self) -> Vec<DatasetRecord> {
        self.records.iter().map(|r| r.record.clone()).collect()
    }

    pub fn completion_rows(&self) -> Vec<CompletionRow> {
        self.records
            .iter()
            .map(|r| CompletionRow { id: r.record.id, completion: r.completion.clone() })
            .collect()
    }

    pub fn count(&self, tag: ErrorTag) -> usize {
        self.records.iter().filter(|r| r.tag == tag).count()
    }
}

const PREAMBLES: &[&str] = &[
    "This is the correct tool call: ",
    "Sure! Here is the function call you need:\n",
    "```json\n",
    "To answer this I will call the tools below. ",
];
const TRAILERS: &[&str] = &["", "", "\n```", " Let me know if you need anything else."];

pub fn plant_corpus(universe: &SynthUniverse, seed: u64, n_records: usize, mix: &ErrorMix) -> Result<PlantedCorpus> {
    universe.validate()?;
    if universe.queries.is_empty() {
        return Err(Error::InvalidConfig("universe has no queries".into()));
    }
    let quotas = mix.quotas(n_records)?;
    let with_args: Vec<usize> = (0..universe.queries.len())
        .filter(|&q| universe.queries[q].calls.iter().any(|c| !c.values.is_empty()))
        .collect();
    if with_args.is_empty() && quotas.keys().any(|t| t.needs_argument()) {
        return Err(Error::InvalidConfig("argument error modes need a universe with parameters".into()));
    }

    let mut tags: Vec<ErrorTag> = quotas.iter().flat_map(|(&t, &c)| std::iter::repeat_n(t, c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tags.shuffle(&mut rng);

    let mut records = Vec::with_capacity(n_records);
    for (i, tag) in tags.into_iter().enumerate() {
        let query = if tag.needs_argument() {
            *with_args.choose(&mut rng).expect("checked non-empty")
        } else {
            rng.random_range(0..universe.queries.len())
        };
        let answers = universe.answer(query);
        let completion = plant(universe, &answers, tag, &mut rng);
        let record = DatasetRecord {
            id: i as u64,
            query: universe.queries[query].text.clone(),
            tools: catalog(universe, &answers, &mut rng),
            answers,
        };
        records.push(PlantedRecord { record, completion, tag });
    }

    let mut rates = BTreeMap::new();
    for r in &records {
        *rates.entry(r.tag).or_insert(0.0) += 1.0;
    }
    for v in rates.values_mut() {
        *v /= n_records as f64;
    }
    Ok(PlantedCorpus { records, rates })
}

/// The answer's tools plus up to two distractors, in universe order.
fn catalog(universe: &SynthUniverse, answers: &[ToolCall], rng: &mut ChaCha8Rng) -> Vec<crate::toolcall::ToolSpec> {
    let mut keep: Vec<bool> = universe
        .tools
        .iter()
        .map(|t| answers.iter().any(|a| a.name == t.name))
        .collect();
    let others: Vec<usize> = (0..keep.len()).filter(|&i| !keep[i]).collect();
    for &i in others.choose_multiple(rng, 2) {
        keep[i] = true;
    }
    universe
        .tools
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(t, _)| t.clone())
        .collect()
}

fn plant(universe: &SynthUniverse, answers: &[ToolCall], tag: ErrorTag, rng: &mut ChaCha8Rng) -> String {
    let mut calls = answers.to_vec();
    match tag {
        ErrorTag::Perfect => serialize_calls(&calls),
        ErrorTag::ExtraneousText => {
            let k = rng.random_range(0..PREAMBLES.len());
            format!("{}{}{}", PREAMBLES[k], serialize_calls(&calls), TRAILERS[k])
        }
        ErrorTag::InvalidJson => {
            // Cut before the first arguments object: no complete JSON value remains.
            let full = serialize_calls(&calls);
            let cut = full.find(",\"arguments\"").unwrap_or(full.len() - 1);
            full[..cut].to_string()
        }
        ErrorTag::WrongName => {
            let k = rng.random_range(0..calls.len());
            calls[k].name = format!("{}_generator", calls[k].name);
            serialize_calls(&calls)
        }
        ErrorTag::WrongArgValue | ErrorTag::MissingArg => {
            let eligible: Vec<usize> = (0..calls.len()).filter(|&k| !calls[k].arguments.is_empty()).collect();
            let k = *eligible.choose(rng).expect("query chosen with arguments");
            let a = rng.random_range(0..calls[k].arguments.len());
            if tag == ErrorTag::MissingArg {
                calls[k].arguments.shift_remove_index(a);
            } else {
                let tool = universe.tool_index(&calls[k].name).expect("answer tool in universe");
                let (_, current) = calls[k].arguments.get_index(a).expect("index in range");
                let alternatives: Vec<&JsonValue> =
                    universe.pools[tool][a].iter().filter(|v| *v != current).collect();
                let replacement = match alternatives.choose(rng) {
                    Some(v) => (*v).clone(),
                    None => perturb(current),
                };
                *calls[k].arguments.get_index_mut(a).expect("index in range").1 = replacement;
            }
            serialize_calls(&calls)
        }
        ErrorTag::ExtraCall => {
            let unused: Vec<usize> = (0..universe.tools.len())
                .filter(|&t| answers.iter().all(|a| a.name != universe.tools[t].name))
                .collect();
            let extra = match unused.choose(rng) {
                Some(&t) => universe.realize(&super::universe::CallTemplate {
                    tool: t,
                    values: vec![0; universe.pools[t].len()],
                }),
                None => ToolCall::new(format!("{}_extra", calls[0].name)),
            };
            calls.push(extra);
            serialize_calls(&calls)
        }
    }
}

fn perturb(value: &JsonValue) -> JsonValue {
    match value {
        JsonValue::Bool(b) => JsonValue::Bool(!b),
        JsonValue::String(s) => JsonValue::String(format!("{s}_alt")),
        JsonValue::Number(n) => JsonValue::from(n.as_f64().unwrap_or(0.0) + 1.0),
        _ => JsonValue::from("alt"),
    }
}
