//! Tabular stand-in for a language model: per query, independent softmax
//! distributions over each choice that can go wrong in a tool-call answer.

use rand::Rng;
use serde::Serialize;

use crate::synth::SynthUniverse;
use crate::toolcall::{serialize_calls, JsonMap, ToolCall};

/// Prefix emitted when the extraneous-text flag is sampled.
pub const EXTRANEOUS_PREFIX: &str = "This is the correct tool call: ";

/// Which failure modes the policy can express.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolicyModes {
    pub extraneous_text: bool,
    /// Call count is a choice (from 1 to one more than expected) rather than
    /// fixed to the expected count.
    pub call_count: bool,
}

impl Default for PolicyModes {
    fn default() -> Self {
        PolicyModes { extraneous_text: true, call_count: true }
    }
}

impl PolicyModes {
    pub fn none() -> Self {
        PolicyModes { extraneous_text: false, call_count: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Categorical {
    pub logits: Vec<f64>,
}

impl Categorical {
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "a categorical needs at least one outcome");
        Categorical { logits: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.logits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logits.is_empty()
    }

    pub fn probs(&self) -> Vec<f64> {
        let max = self.logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = self.logits.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / z).collect()
    }

    pub fn log_prob(&self, choice: usize) -> f64 {
        let max = self.logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = self.logits.iter().map(|l| (l - max).exp()).sum();
        self.logits[choice] - max - z.ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.logits.len() == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let probs = self.probs();
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Gradient of `log p(choice)` with respect to the logits.
    pub fn grad_log_prob(&self, choice: usize) -> Vec<f64> {
        let mut g: Vec<f64> = self.probs().into_iter().map(|p| -p).collect();
        g[choice] += 1.0;
        g
    }
}

/// Identifies one categorical within a query's table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Decision {
    Extraneous,
    Count,
    Name { slot: usize },
    Arg { slot: usize, tool: usize, param: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotTable {
    pub name: Categorical,
    /// `args[tool][param]` over that parameter's value pool.
    pub args: Vec<Vec<Categorical>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryTable {
    pub extraneous: Categorical,
    pub count: Categorical,
    /// Call count represented by count choice 0.
    pub min_calls: usize,
    pub slots: Vec<SlotTable>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledCompletion {
    pub text: String,
    pub decisions: Vec<(Decision, usize)>,
    pub extraneous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyPolicy {
    pub modes: PolicyModes,
    pub queries: Vec<QueryTable>,
}

impl ToyPolicy {
    /// All distributions start uniform.
    pub fn new(universe: &SynthUniverse, modes: PolicyModes) -> Self {
        let n_tools = universe.tools.len();
        let queries = universe
            .queries
            .iter()
            .map(|q| {
                let expected = q.calls.len();
                let (min_calls, max_calls) = if modes.call_count { (1, expected + 1) } else { (expected, expected) };
                let slots = (0..max_calls)
                    .map(|_| SlotTable {
                        name: Categorical::uniform(n_tools),
                        args: universe
                            .pools
                            .iter()
                            .map(|tool| tool.iter().map(|pool| Categorical::uniform(pool.len())).collect())
                            .collect(),
                    })
                    .collect();
                QueryTable {
                    extraneous: Categorical::uniform(if modes.extraneous_text { 2 } else { 1 }),
                    count: Categorical::uniform(max_calls - min_calls + 1),
                    min_calls,
                    slots,
                }
            })
            .collect();
        ToyPolicy { modes, queries }
    }

    fn categorical(&self, query: usize, d: Decision) -> &Categorical {
        let t = &self.queries[query];
        match d {
            Decision::Extraneous => &t.extraneous,
            Decision::Count => &t.count,
            Decision::Name { slot } => &t.slots[slot].name,
            Decision::Arg { slot, tool, param } => &t.slots[slot].args[tool][param],
        }
    }

    fn categorical_mut(&mut self, query: usize, d: Decision) -> &mut Categorical {
        let t = &mut self.queries[query];
        match d {
            Decision::Extraneous => &mut t.extraneous,
            Decision::Count => &mut t.count,
            Decision::Name { slot } => &mut t.slots[slot].name,
            Decision::Arg { slot, tool, param } => &mut t.slots[slot].args[tool][param],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, universe: &SynthUniverse, query: usize, rng: &mut R) -> SampledCompletion {
        let table = &self.queries[query];
        let mut decisions = Vec::new();
        let mut decide = |d: Decision, rng: &mut R| {
            let choice = self.categorical(query, d).sample(rng);
            decisions.push((d, choice));
            choice
        };

        let extraneous = decide(Decision::Extraneous, rng) == 1;
        let n_calls = table.min_calls + decide(Decision::Count, rng);
        let mut calls = Vec::with_capacity(n_calls);
        for slot in 0..n_calls {
            let tool = decide(Decision::Name { slot }, rng);
            let spec = &universe.tools[tool];
            let mut arguments = JsonMap::new();
            for (param, pname) in spec.parameters.keys().enumerate() {
                let v = decide(Decision::Arg { slot, tool, param }, rng);
                arguments.insert(pname.clone(), universe.pools[tool][param][v].clone());
            }
            calls.push(ToolCall { name: spec.name.clone(), arguments });
        }

        let json = serialize_calls(&calls);
        let text = if extraneous { format!("{EXTRANEOUS_PREFIX}{json}") } else { json };
        SampledCompletion { text, decisions, extraneous }
    }

    pub fn log_prob(&self, query: usize, decisions: &[(Decision, usize)]) -> f64 {
        decisions.iter().map(|&(d, c)| self.categorical(query, d).log_prob(c)).sum()
    }

    /// Ascends `step_size * Σ_i weight_i · ∇ log p(sample_i)`. All gradients
    /// are taken at the current logits before any are applied.
    pub fn reinforce(&mut self, query: usize, samples: &[(&[(Decision, usize)], f64)], step_size: f64) {
        let mut deltas: Vec<(Decision, Vec<f64>)> = Vec::new();
        for &(decisions, weight) in samples {
            if weight == 0.0 {
                continue;
            }
            for &(d, choice) in decisions {
                let grad = self.categorical(query, d).grad_log_prob(choice);
                deltas.push((d, grad.into_iter().map(|g| step_size * weight * g).collect()));
            }
        }
        for (d, delta) in deltas {
            for (l, g) in self.categorical_mut(query, d).logits.iter_mut().zip(delta) {
                *l += g;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn softmax_normalizes() {
        let c = Categorical { logits: vec![1.0, -2.0, 0.5, 300.0] };
        let p = c.probs();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((c.log_prob(3) - p[3].ln()).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = Categorical { logits: vec![0.3, -0.7, 1.1] };
        let g = c.grad_log_prob(1);
        let h = 1e-6;
        for (j, gj) in g.iter().enumerate() {
            let mut up = c.clone();
            up.logits[j] += h;
            let mut down = c.clone();
            down.logits[j] -= h;
            let fd = (up.log_prob(1) - down.log_prob(1)) / (2.0 * h);
            assert!((fd - gj).abs() < 1e-7, "j={j}: {fd} vs {gj}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let u = SynthUniverse::default_universe();
        let p = ToyPolicy::new(&u, PolicyModes::default());
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|i| p.sample(&u, i % u.queries.len(), &mut rng).text).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
    }

    #[test]
    fn log_prob_of_sample_under_uniform_tables() {
        let u = SynthUniverse::default_universe();
        let p = ToyPolicy::new(&u, PolicyModes::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = p.sample(&u, 0, &mut rng);
        let expected: f64 = s
            .decisions
            .iter()
            .map(|(d, _)| -(p.categorical(0, *d).len() as f64).ln())
            .sum();
        assert!((p.log_prob(0, &s.decisions) - expected).abs() < 1e-12);
    }

    #[test]
    fn positive_weight_raises_sample_probability() {
        let u = SynthUniverse::default_universe();
        let mut p = ToyPolicy::new(&u, PolicyModes::default());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = p.sample(&u, 1, &mut rng);
        let before = p.log_prob(1, &s.decisions);
        p.reinforce(1, &[(&s.decisions, 1.0)], 0.1);
        assert!(p.log_prob(1, &s.decisions) > before);
    }
}
