//! In-memory convergence records handed to the harness for serialization.

use serde::{Deserialize, Serialize};

/// One checkpoint along an inner loop. `inner_iter = -1` marks the selected
/// stage output rather than an inner iterate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Trial index; `-1` marks theoretical reference rows.
    pub trial: i64,
    pub stage: i64,
    pub inner_iter: i64,
    /// Cumulative measurement (or pool-index) draws.
    pub samples: u64,
    /// Distance to the target set.
    pub dist: f64,
    /// Loss estimate at the checkpoint (NaN when not evaluated).
    pub loss: f64,
    /// Wall-clock time since the trial started. Excluded from determinism.
    pub wall_ms: f64,
}

/// Per-stage summary: the resolved stage parameters and the selected output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Step size `α_t` used by the stage.
    pub alpha: f64,
    /// Proximal weight `ρ_t` (0 for the plain restart scheme).
    pub rho: f64,
    /// Ensemble tolerance `ε_t` (0 when no ensemble runs).
    pub tolerance: f64,
    /// Set when the ensemble found no majority ball and fell back to the
    /// best-count point.
    pub ensemble_failed: bool,
    pub samples: u64,
    pub dist: f64,
    pub loss: f64,
    pub wall_ms: f64,
}

/// Full record of one trial.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
    pub stages: Vec<StageRecord>,
}

impl ConvergenceTrace {
    pub fn push_record(&mut self, record: TraceRecord) {
        if let Some(last) = self.records.last() {
            debug_assert!(
                record.samples > last.samples,
                "cumulative samples must be strictly increasing"
            );
        }
        self.records.push(record);
    }
}
