use serde::Serialize;

use crate::error::{Error, Result};

/// Floor on the group standard deviation; groups below it get zero advantage.
pub const ADVANTAGE_EPS: f64 = 1e-8;

/// Group-relative advantages: each reward standardized by the group's mean
/// and population standard deviation.
pub fn group_advantages(rewards: &[f64]) -> Result<Vec<f64>> {
    let n = rewards.len();
    if n < 2 {
        return Err(Error::DegenerateGroup(n));
    }
    let nf = n as f64;
    let naive = rewards.iter().sum::<f64>() / nf;
    // second pass removes the rounding error of the first
    let mean = naive + rewards.iter().map(|r| r - naive).sum::<f64>() / nf;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / nf;
    let std = var.sqrt();
    if std < ADVANTAGE_EPS {
        return Ok(vec![0.0; n]);
    }
    Ok(rewards.iter().map(|r| (r - mean) / std.max(ADVANTAGE_EPS)).collect())
}

/// One query's sampled completions with their rewards and advantages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSample {
    pub query_id: usize,
    pub completions: Vec<String>,
    pub rewards: Vec<f64>,
    pub advantages: Vec<f64>,
}

impl GroupSample {
    pub fn new(query_id: usize, completions: Vec<String>, rewards: Vec<f64>) -> Result<Self> {
        if completions.len() != rewards.len() {
            return Err(Error::SizeMismatch { completions: completions.len(), expected: rewards.len() });
        }
        let advantages = group_advantages(&rewards)?;
        Ok(GroupSample { query_id, completions, rewards, advantages })
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}
