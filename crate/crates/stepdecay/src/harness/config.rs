//! Experiment configuration: JSON-loadable, flag-overridable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::problems::{ModelTag, ProblemTag};

/// `Display` for the tag enums via their serde names, so the CLI, config
/// files, and CSV columns all agree on spelling.
macro_rules! fmt_display_via_serde {
    () => {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            let s = serde_json::to_string(self).map_err(|_| std::fmt::Error)?;
            f.write_str(s.trim_matches('"'))
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmTag {
    Rmba,
    Rpmba,
    Rda,
    #[serde(rename = "proxgrad-poly")]
    ProxGradPoly,
}

impl std::fmt::Display for AlgorithmTag {
    fmt_display_via_serde!();
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Fresh measurement per step.
    Streaming,
    /// A pool of `m` measurements drawn once per trial, cycled uniformly
    /// with replacement.
    Finite,
}

impl std::fmt::Display for SamplingMode {
    fmt_display_via_serde!();
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::fmt::Display for OutputFormat {
    fmt_display_via_serde!();
}

/// Overrides for desk-scale runs where the theorem-prescribed counts are
/// infeasible. The initial step is recomputed for an overridden inner count.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScheduleOverride {
    pub inner_iters: Option<usize>,
    pub stages: Option<usize>,
    pub ensemble_size: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub problem: ProblemTag,
    pub model: ModelTag,
    pub algorithm: AlgorithmTag,
    /// Ambient dimension `d`; blind deconvolution uses `d₁ = d₂ = d`.
    pub dim: usize,
    pub p_fail: f64,
    pub mode: SamplingMode,
    /// Pool size for finite mode; defaults to `8·d`.
    pub m_samples: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Target accuracy `ε`.
    pub eps: f64,
    /// Tube parameter `γ`.
    pub gamma: f64,
    /// Failure budget `δ₂` of the restart schedule.
    pub delta2: f64,
    /// Failure budget `δ′` of the high-probability schedule.
    pub delta_prime: f64,
    /// Initial distance `R₀` (signals are unit-normalized).
    pub r0: f64,
    /// Corruption scale `σ_ξ` (variance `σ_ξ²`).
    pub noise_scale: f64,
    /// Blind-deconvolution constraint multiplier `ν > 1`.
    pub nu: f64,
    /// Inner-loop output: averaged (`true`) or uniformly sampled (`false`).
    pub is_conv: bool,
    /// Scale the schedule's `α₀` by `2^p` (step-size sensitivity).
    pub step_scale_exponent: i32,
    /// Checkpoint cadence in inner steps; defaults to `⌈K/100⌉`.
    pub cadence: Option<usize>,
    /// Stop a trial once the distance falls to this value (checked every
    /// step, recorded in the trace).
    pub stop_dist: Option<f64>,
    /// Hard cap on total measurement draws per trial.
    pub max_total_samples: Option<u64>,
    /// Monte Carlo sample count for constant estimation.
    pub mc_samples: usize,
    /// Fixed batch size for streaming loss estimates.
    pub eval_batch: usize,
    /// Sensitivity sweep exponent range (inclusive).
    pub sensitivity_p_min: i32,
    pub sensitivity_p_max: i32,
    pub schedule_override: Option<ScheduleOverride>,
    /// ℓ1 weight for the logistic family.
    pub tau: f64,
    /// Exponent `p` in the sharpness grid `μ = τ·√d·2^{−p}`.
    pub mu_grid_exponent: i32,
    /// Sample count for the synthetic logistic instance.
    pub n_samples: usize,
    pub sparsity: usize,
    /// RDA quadratic weight (grid-searched in the source experiments).
    pub gamma_rda: f64,
    /// Polynomial proximal-gradient parameters `λ_k = c·k^{−p}`.
    pub poly_c: f64,
    pub poly_p: f64,
    /// Optional IDX inputs replacing the synthetic logistic instance.
    pub idx_images: Option<PathBuf>,
    pub idx_labels: Option<PathBuf>,
    /// Digit classes mapped to labels −1/+1 when loading IDX data.
    pub idx_digits: (u8, u8),
    pub out: PathBuf,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemTag::Phase,
            model: ModelTag::ProxLinear,
            algorithm: AlgorithmTag::Rmba,
            dim: 20,
            p_fail: 0.0,
            mode: SamplingMode::Streaming,
            m_samples: None,
            trials: 10,
            seed: 0,
            eps: 1e-5,
            gamma: 1.0,
            delta2: 1.0 / 10f64.sqrt(),
            delta_prime: 0.1,
            r0: 0.25,
            noise_scale: 10.0,
            nu: 1.5,
            is_conv: false,
            step_scale_exponent: 0,
            cadence: None,
            stop_dist: None,
            max_total_samples: None,
            mc_samples: 100_000,
            eval_batch: 256,
            sensitivity_p_min: -10,
            sensitivity_p_max: 10,
            schedule_override: None,
            tau: 0.1,
            mu_grid_exponent: 0,
            n_samples: 2000,
            sparsity: 5,
            gamma_rda: 1.0,
            poly_c: 1.0,
            poly_p: 0.5,
            idx_images: None,
            idx_labels: None,
            idx_digits: (6, 7),
            out: PathBuf::from("out.csv"),
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad config: {e}"))
        })
    }

    /// Pool size for finite mode.
    pub fn pool_size(&self) -> usize {
        self.m_samples.unwrap_or(8 * self.dim)
    }

    /// Key/value echo embedded in every output file.
    pub fn meta(&self) -> Vec<(String, String)> {
        vec![
            ("problem".into(), self.problem.to_string()),
            ("model".into(), self.model.to_string()),
            ("algorithm".into(), self.algorithm.to_string()),
            ("dim".into(), self.dim.to_string()),
            ("p_fail".into(), format!("{}", self.p_fail)),
            ("mode".into(), self.mode.to_string()),
            ("m_samples".into(), format!("{:?}", self.m_samples)),
            ("trials".into(), self.trials.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("eps".into(), format!("{}", self.eps)),
            ("gamma".into(), format!("{}", self.gamma)),
            ("delta2".into(), format!("{}", self.delta2)),
            ("delta_prime".into(), format!("{}", self.delta_prime)),
            ("r0".into(), format!("{}", self.r0)),
            ("nu".into(), format!("{}", self.nu)),
            ("is_conv".into(), self.is_conv.to_string()),
            (
                "step_scale_exponent".into(),
                self.step_scale_exponent.to_string(),
            ),
        ]
    }
}
