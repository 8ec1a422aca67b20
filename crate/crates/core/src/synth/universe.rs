use indexmap::IndexMap;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::toolcall::{JsonValue, ParamSpec, ToolCall, ToolSpec};

const VERBS: &[&str] = &[
    "get", "search", "create", "update", "delete", "convert", "calculate", "send", "fetch",
    "generate", "translate", "schedule", "validate", "list", "resolve",
];
const NOUNS: &[&str] = &[
    "weather", "invoice", "user", "stock", "flight", "recipe", "qr_code", "currency", "email",
    "ticket", "playlist", "route", "timezone", "password", "image",
];
// Disjoint from every verb_noun tool name.
const PARAMS: &[&str] = &[
    "city", "amount", "format", "size", "url", "query", "limit", "language", "unit", "date",
    "count", "symbol", "account", "priority", "color", "width", "height", "code", "page", "region",
];
const WORDS: &[&str] = &[
    "paris", "tokyo", "json", "xml", "example.com", "Secure123", "celsius", "EUR", "USD", "blue",
    "high", "low", "en", "fr", "2024-05-01", "AAPL", "beta", "game", "north", "mobile",
];

/// Sizes for [`generate_universe_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniverseOptions {
    pub n_tools: usize,
    pub max_params: usize,
    /// Candidate values per parameter (booleans are capped at 2).
    pub pool_size: usize,
    pub n_queries: usize,
    pub max_calls_per_query: usize,
}

impl Default for UniverseOptions {
    fn default() -> Self {
        UniverseOptions { n_tools: 8, max_params: 3, pool_size: 4, n_queries: 12, max_calls_per_query: 2 }
    }
}

/// One call of a query's expected answer, as indices into the universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallTemplate {
    pub tool: usize,
    /// Pool index per tool parameter, in parameter order.
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryTemplate {
    pub text: String,
    pub calls: Vec<CallTemplate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthUniverse {
    pub tools: Vec<ToolSpec>,
    /// `pools[tool][param]` lists the candidate values of that parameter.
    pub pools: Vec<Vec<Vec<JsonValue>>>,
    pub queries: Vec<QueryTemplate>,
}

impl SynthUniverse {
    /// The environment used by the toy trainer's reference run.
    pub fn default_universe() -> Self {
        generate_universe(7, 8, 3).expect("default universe options are valid")
    }

    pub fn answer(&self, query: usize) -> Vec<ToolCall> {
        self.queries[query].calls.iter().map(|c| self.realize(c)).collect()
    }

    pub fn realize(&self, call: &CallTemplate) -> ToolCall {
        let tool = &self.tools[call.tool];
        let arguments = tool
            .parameters
            .keys()
            .zip(&call.values)
            .enumerate()
            .map(|(p, (name, &v))| (name.clone(), self.pools[call.tool][p][v].clone()))
            .collect();
        ToolCall { name: tool.name.clone(), arguments }
    }

    pub fn tool_index(&self, name: &str) -> Option<usize> {
        self.tools.iter().position(|t| t.name == name)
    }

    /// Checks that every query references existing tools and pool entries.
    pub fn validate(&self) -> Result<()> {
        if self.tools.is_empty() {
            return Err(Error::InvalidConfig("universe has no tools".into()));
        }
        if self.pools.len() != self.tools.len() {
            return Err(Error::InvalidConfig("one pool list per tool required".into()));
        }
        for (t, tool) in self.tools.iter().enumerate() {
            if self.pools[t].len() != tool.parameters.len() || self.pools[t].iter().any(Vec::is_empty) {
                return Err(Error::InvalidConfig(format!("tool {} needs a non-empty pool per parameter", tool.name)));
            }
        }
        for (q, query) in self.queries.iter().enumerate() {
            for call in &query.calls {
                let ok = call.tool < self.tools.len()
                    && call.values.len() == self.pools[call.tool].len()
                    && call.values.iter().zip(&self.pools[call.tool]).all(|(&v, pool)| v < pool.len());
                if !ok {
                    return Err(Error::InvalidConfig(format!("query {q} references a tool or value outside the universe")));
                }
            }
        }
        Ok(())
    }
}

pub fn generate_universe(seed: u64, n_tools: usize, max_params: usize) -> Result<SynthUniverse> {
    generate_universe_with(seed, UniverseOptions { n_tools, max_params, ..UniverseOptions::default() })
}

pub fn generate_universe_with(seed: u64, opts: UniverseOptions) -> Result<SynthUniverse> {
    if opts.n_tools == 0 {
        return Err(Error::InvalidConfig("a universe needs at least one tool".into()));
    }
    if opts.n_tools > VERBS.len() * NOUNS.len() {
        return Err(Error::InvalidConfig(format!("at most {} tools", VERBS.len() * NOUNS.len())));
    }
    if opts.max_params > PARAMS.len() {
        return Err(Error::InvalidConfig(format!("at most {} parameters per tool", PARAMS.len())));
    }
    if opts.pool_size == 0 || opts.n_queries == 0 || opts.max_calls_per_query == 0 {
        return Err(Error::InvalidConfig("pool size, query count and calls per query must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut names: Vec<String> = VERBS
        .iter()
        .flat_map(|v| NOUNS.iter().map(move |n| format!("{v}_{n}")))
        .collect();
    names.shuffle(&mut rng);
    names.truncate(opts.n_tools);

    let mut tools = Vec::with_capacity(opts.n_tools);
    let mut pools = Vec::with_capacity(opts.n_tools);
    for name in names {
        let n_params = rng.random_range(0..=opts.max_params);
        let chosen: Vec<&str> = PARAMS.choose_multiple(&mut rng, n_params).copied().collect();
        let mut parameters = IndexMap::new();
        let mut tool_pools = Vec::new();
        for pname in chosen {
            let kind = ["str", "int", "float", "bool"][rng.random_range(0..4)];
            let required = rng.random_bool(0.8);
            let tag = if required { kind.to_string() } else { format!("{kind}, optional") };
            parameters.insert(pname.to_string(), ParamSpec::new(tag, required, format!("The {pname} to use.")));
            tool_pools.push(value_pool(&mut rng, kind, opts.pool_size));
        }
        let (verb, noun) = name.split_once('_').expect("tool names are verb_noun");
        tools.push(ToolSpec {
            description: format!("{} the {}.", capitalize(verb), noun.replace('_', " ")),
            name,
            parameters,
        });
        pools.push(tool_pools);
    }

    let mut universe = SynthUniverse { tools, pools, queries: Vec::new() };
    let max_calls = opts.max_calls_per_query.min(opts.n_tools);
    for _ in 0..opts.n_queries {
        let n_calls = rng.random_range(1..=max_calls);
        let tool_ids: Vec<usize> = rand::seq::index::sample(&mut rng, opts.n_tools, n_calls).into_vec();
        let calls: Vec<CallTemplate> = tool_ids
            .into_iter()
            .map(|tool| CallTemplate {
                tool,
                values: universe.pools[tool].iter().map(|pool| rng.random_range(0..pool.len())).collect(),
            })
            .collect();
        let text = describe(&universe, &calls);
        universe.queries.push(QueryTemplate { text, calls });
    }
    universe.validate()?;
    Ok(universe)
}

fn value_pool(rng: &mut ChaCha8Rng, kind: &str, size: usize) -> Vec<JsonValue> {
    match kind {
        "bool" => [true, false].into_iter().take(size.min(2)).map(JsonValue::from).collect(),
        "int" => rand::seq::index::sample(rng, 100, size)
            .into_iter()
            .map(|n| JsonValue::from(n as i64 + 1))
            .collect(),
        "float" => rand::seq::index::sample(rng, 100, size)
            .into_iter()
            .map(|n| JsonValue::from((n as f64 + 1.0) / 10.0))
            .collect(),
        _ => WORDS.choose_multiple(rng, size.min(WORDS.len())).map(|w| JsonValue::from(*w)).collect(),
    }
}

fn describe(universe: &SynthUniverse, calls: &[CallTemplate]) -> String {
    let parts: Vec<String> = calls
        .iter()
        .map(|c| {
            let call = universe.realize(c);
            let args: Vec<String> = call.arguments.iter().map(|(k, v)| format!("{k} {v}")).collect();
            if args.is_empty() {
                call.name.replace('_', " ")
            } else {
                format!("{} with {}", call.name.replace('_', " "), args.join(" and "))
            }
        })
        .collect();
    format!("Please {}.", parts.join(", then "))
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    chars.next().map(|c| c.to_uppercase().chain(chars).collect()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_zero_argument_tool() {
        let u = generate_universe(7, 1, 0).unwrap();
        assert_eq!(u.tools.len(), 1);
        assert!(u.tools[0].parameters.is_empty());
        assert!(u.queries.iter().all(|q| q.calls.len() == 1 && q.calls[0].values.is_empty()));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_universe(7, 5, 3).unwrap(), generate_universe(7, 5, 3).unwrap());
        assert_ne!(generate_universe(7, 5, 3).unwrap(), generate_universe(8, 5, 3).unwrap());
    }

    #[test]
    fn respects_tool_and_parameter_counts() {
        let u = generate_universe(7, 20, 4).unwrap();
        assert_eq!(u.tools.len(), 20);
        assert!(u.tools.iter().all(|t| t.parameters.len() <= 4));
        let names: std::collections::HashSet<_> = u.tools.iter().map(|t| &t.name).collect();
        assert_eq!(names.len(), 20);
        for t in &u.tools {
            assert!(t.parameters.keys().all(|p| !names.contains(p)));
        }
    }

    #[test]
    fn zero_tools_rejected() {
        assert!(matches!(generate_universe(7, 0, 2), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn answers_reference_universe_tools() {
        let u = SynthUniverse::default_universe();
        u.validate().unwrap();
        for q in 0..u.queries.len() {
            for call in u.answer(q) {
                assert!(u.tool_index(&call.name).is_some());
            }
        }
    }
}
