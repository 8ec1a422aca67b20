use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub mean_reward: f64,
    /// Fraction of the step's group classified as extraneous text.
    pub extraneous_rate: f64,
    pub mean_completion_chars: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingCurve {
    pub steps: Vec<StepRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub first_step: usize,
    pub last_step: usize,
    pub mean_reward: f64,
    pub min_reward: f64,
    pub max_reward: f64,
    pub extraneous_rate: f64,
    pub mean_completion_chars: f64,
}

/// Aggregates over consecutive windows of `window` steps; the last window
/// may be shorter. A window longer than the curve covers the whole curve.
pub fn curve_stats(curve: &TrainingCurve, window: usize) -> Result<Vec<WindowStats>> {
    if curve.steps.is_empty() {
        return Err(Error::EmptyCurve);
    }
    if window == 0 {
        return Err(Error::InvalidConfig("window must be positive".into()));
    }
    Ok(curve.steps.chunks(window).map(window_stats).collect())
}

fn window_stats(steps: &[StepRecord]) -> WindowStats {
    let n = steps.len() as f64;
    let mean = |f: fn(&StepRecord) -> f64| steps.iter().map(f).sum::<f64>() / n;
    WindowStats {
        first_step: steps[0].step,
        last_step: steps[steps.len() - 1].step,
        mean_reward: mean(|s| s.mean_reward),
        min_reward: steps.iter().map(|s| s.mean_reward).fold(f64::INFINITY, f64::min),
        max_reward: steps.iter().map(|s| s.mean_reward).fold(f64::NEG_INFINITY, f64::max),
        extraneous_rate: mean(|s| s.extraneous_rate),
        mean_completion_chars: mean(|s| s.mean_completion_chars),
    }
}

impl TrainingCurve {
    /// Tab-separated columns with a header row, one row per step.
    pub fn to_tsv(&self) -> String {
        let mut writer = csv::WriterBuilder::new().delimiter(b'\t').from_writer(Vec::new());
        if self.steps.is_empty() {
            writer
                .write_record(["step", "mean_reward", "extraneous_rate", "mean_completion_chars"])
                .expect("header");
        }
        for s in &self.steps {
            writer.serialize(s).expect("steps serialize");
        }
        String::from_utf8(writer.into_inner().expect("flush to Vec")).expect("TSV is UTF-8")
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(text.as_bytes());
        let steps = reader
            .deserialize()
            .collect::<std::result::Result<Vec<StepRecord>, _>>()
            .map_err(|e| Error::Validation(format!("curve file: {e}")))?;
        Ok(TrainingCurve { steps })
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv(&text)
    }
}
