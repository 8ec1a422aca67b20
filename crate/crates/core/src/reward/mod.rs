//! Capability-aware reward: JSON validity, function-name and argument
//! credit, over-generation scaling, and the zero rule for extraneous text,
//! invalid JSON and empty output.

mod matching;
mod score;

pub use matching::{match_calls, scaling_factor, ArgScore, MatchReport, MatchedPair, EXHAUSTIVE_LIMIT};
pub use score::{compute_reward, reward_batch, score_calls, score_outcome, RewardBreakdown, RewardWeights};
