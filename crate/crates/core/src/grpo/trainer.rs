use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::advantage::GroupSample;
use super::curve::{StepRecord, TrainingCurve};
use super::policy::{PolicyModes, ToyPolicy};
use crate::error::{Error, Result};
use crate::reward::{reward_batch, RewardWeights};
use crate::synth::SynthUniverse;
use crate::toolcall::OutcomeTag;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainerConfig {
    pub group_size: usize,
    /// Zero is accepted and leaves the policy untouched (a control run).
    pub learning_rate: f64,
    pub max_steps: usize,
    pub seed: u64,
    pub weights: RewardWeights,
    pub modes: PolicyModes,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            group_size: 8,
            learning_rate: 0.5,
            max_steps: 2000,
            seed: 42,
            weights: RewardWeights::default(),
            modes: PolicyModes::default(),
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.group_size < 2 {
            return Err(Error::InvalidConfig(format!("group size must be at least 2, got {}", self.group_size)));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRun {
    pub curve: TrainingCurve,
    pub policy: ToyPolicy,
}

/// Group-relative policy gradient on the toy policy: per step, draw a query,
/// sample a group of completions, score them, standardize the rewards within
/// the group and ascend the advantage-weighted log-likelihood.
pub fn train_toy_policy(config: &TrainerConfig, universe: &SynthUniverse) -> Result<TrainingRun> {
    config.validate()?;
    universe.validate()?;
    if universe.queries.is_empty() {
        return Err(Error::InvalidConfig("universe has no queries".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut policy = ToyPolicy::new(universe, config.modes);
    let answers: Vec<_> = (0..universe.queries.len()).map(|q| universe.answer(q)).collect();
    let mut steps = Vec::with_capacity(config.max_steps);
    let g = config.group_size;

    for step in 0..config.max_steps {
        let query = rng.random_range(0..universe.queries.len());
        let samples: Vec<_> = (0..g).map(|_| policy.sample(universe, query, &mut rng)).collect();
        let texts: Vec<String> = samples.iter().map(|s| s.text.clone()).collect();
        let expected = vec![answers[query].clone(); g];
        let scored = reward_batch(&texts, &expected, &config.weights)?;
        let rewards: Vec<f64> = scored.iter().map(|b| b.r_final).collect();

        let extraneous = scored.iter().filter(|b| b.outcome == OutcomeTag::ExtraneousText).count();
        let chars: usize = texts.iter().map(|t| t.chars().count()).sum();
        steps.push(StepRecord {
            step,
            mean_reward: rewards.iter().sum::<f64>() / g as f64,
            extraneous_rate: extraneous as f64 / g as f64,
            mean_completion_chars: chars as f64 / g as f64,
        });

        let group = GroupSample::new(query, texts, rewards)?;
        if config.learning_rate > 0.0 {
            let weighted: Vec<_> = samples
                .iter()
                .zip(&group.advantages)
                .map(|(s, &a)| (s.decisions.as_slice(), a))
                .collect();
            policy.reinforce(query, &weighted, config.learning_rate / g as f64);
        }
    }

    Ok(TrainingRun { curve: TrainingCurve { steps }, policy })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_configs_are_rejected() {
        let u = SynthUniverse::default_universe();
        for bad in [
            TrainerConfig { group_size: 1, ..Default::default() },
            TrainerConfig { learning_rate: -0.1, ..Default::default() },
            TrainerConfig { learning_rate: f64::NAN, ..Default::default() },
            TrainerConfig { max_steps: 0, ..Default::default() },
        ] {
            assert!(matches!(train_toy_policy(&bad, &u), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn short_runs_are_reproducible() {
        let u = SynthUniverse::default_universe();
        let cfg = TrainerConfig { max_steps: 50, ..Default::default() };
        assert_eq!(train_toy_policy(&cfg, &u).unwrap(), train_toy_policy(&cfg, &u).unwrap());
    }
}
