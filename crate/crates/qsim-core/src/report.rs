//! Machine- and human-readable run results.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Engine counters attached to a result. `switch_pc` and `snapshot_size`
/// only appear for hybrid runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultMetrics {
    pub calc_amp_calls: u64,
    pub max_depth: usize,
    pub peak_frames: usize,
    pub largest_alloc: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_pc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_size: Option<usize>,
}

/// One sampling run: which engine, how many shots, the seed actually used,
/// the outcome histogram keyed by bitstring, engine metrics, and wall time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub engine: String,
    pub shots: u64,
    pub seed: u64,
    pub histogram: BTreeMap<String, u64>,
    pub metrics: ResultMetrics,
    pub elapsed_ms: f64,
}

impl RunResult {
    /// Build a result, checking that the histogram accounts for every shot.
    pub fn new(
        engine: impl Into<String>,
        shots: u64,
        seed: u64,
        histogram: BTreeMap<String, u64>,
        metrics: ResultMetrics,
        elapsed_ms: f64,
    ) -> Result<Self> {
        if shots == 0 || histogram.values().sum::<u64>() != shots {
            return Err(Error::InvalidShots);
        }
        Ok(RunResult {
            engine: engine.into(),
            shots,
            seed,
            histogram,
            metrics,
            elapsed_ms,
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Json,
}

/// Render a result. Text mode prints header lines then an aligned
/// bitstring/count/frequency table sorted by descending count, ties by
/// bitstring; JSON mode is a single object with fixed field names.
pub fn format_result(result: &RunResult, mode: OutputMode) -> String {
    match mode {
        OutputMode::Json => {
            serde_json::to_string_pretty(result).expect("result serializes")
        }
        OutputMode::Text => {
            let mut out = String::new();
            writeln!(out, "engine: {}", result.engine).unwrap();
            writeln!(out, "shots: {}", result.shots).unwrap();
            writeln!(out, "seed: {}", result.seed).unwrap();
            writeln!(out, "elapsed_ms: {:.3}", result.elapsed_ms).unwrap();
            writeln!(out, "calc_amp_calls: {}", result.metrics.calc_amp_calls).unwrap();
            writeln!(out, "max_depth: {}", result.metrics.max_depth).unwrap();
            if let Some(pc) = result.metrics.switch_pc {
                writeln!(out, "switch_pc: {pc}").unwrap();
            }
            if let Some(size) = result.metrics.snapshot_size {
                writeln!(out, "snapshot_size: {size}").unwrap();
            }

            let mut rows: Vec<(&String, u64)> =
                result.histogram.iter().map(|(s, &c)| (s, c)).collect();
            rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            let count_width = rows
                .iter()
                .map(|(_, c)| c.to_string().len())
                .max()
                .unwrap_or(1);
            for (bits, count) in rows {
                let frequency = count as f64 / result.shots as f64;
                writeln!(out, "{bits} {count:>count_width$} {frequency:.6}").unwrap();
            }
            out
        }
    }
}
