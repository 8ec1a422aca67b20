//! Group-relative advantages and a tabular policy-gradient trainer driven by
//! the tool-call reward.

mod advantage;
mod curve;
mod policy;
mod trainer;

pub use advantage::{group_advantages, GroupSample, ADVANTAGE_EPS};
pub use curve::{curve_stats, StepRecord, TrainingCurve, WindowStats};
pub use policy::{Categorical, Decision, PolicyModes, QueryTable, SampledCompletion, SlotTable, ToyPolicy, EXTRANEOUS_PREFIX};
pub use trainer::{train_toy_policy, TrainerConfig, TrainingRun};
