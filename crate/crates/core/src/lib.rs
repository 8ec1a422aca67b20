//! Scoring engine for structured tool-call outputs.
//!
//! - [`toolcall`]: call model and the strict completion parser.
//! - [`reward`]: capability-aware reward with over-generation scaling.
//! - [`grpo`]: group-relative advantages and a toy policy-gradient trainer.
//! - [`synth`]: synthetic tool universes and planted-error corpora.
//! - [`harness`]: dataset ingestion, splits, metrics and reports.

pub mod error;
pub mod grpo;
pub mod harness;
pub mod reward;
pub mod synth;
pub mod toolcall;

pub use error::{Error, Result};
pub use grpo::{curve_stats, group_advantages, train_toy_policy, TrainerConfig, TrainingCurve};
pub use harness::{evaluate, load_dataset, split_sample, DatasetRecord, EvalReport};
pub use reward::{compute_reward, match_calls, reward_batch, MatchReport, RewardBreakdown, RewardWeights};
pub use synth::{generate_universe, plant_corpus, ErrorMix, ErrorTag, PlantedCorpus, SynthUniverse};
pub use toolcall::{canonical_equal, parse_completion, JsonValue, OutcomeTag, ParseOutcome, ToolCall, ToolSpec};
