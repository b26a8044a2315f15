//! Experiment runner CLI: convergence, step-size sensitivity, and activity
//! identification, with deterministic seeding and CSV/JSON output.
//!
//! Exit codes: 0 on success, 2 when a schedule precondition rejects the
//! configuration, 1 on IO or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stepdecay::harness::{
    run_convergence, run_identification, run_stepsize_sensitivity, AlgorithmTag,
    ExperimentConfig, HarnessError, OutputFormat, SamplingMode, ScheduleOverride,
};
use stepdecay::problems::{ModelTag, ProblemTag};

#[derive(Parser)]
#[command(name = "stepdecay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multi-trial convergence runs against the theorem schedules.
    Convergence(RunArgs),
    /// Step-size sensitivity sweep: scale the schedule's α₀ by 2^p.
    Sensitivity(RunArgs),
    /// Sparse logistic regression activity identification vs. baselines.
    Identification(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem family: phase | blind | logistic.
    #[arg(long)]
    problem: Option<String>,
    /// Model: subgradient | clipped | proxlinear | proxpoint | proxgrad.
    #[arg(long)]
    model: Option<String>,
    /// Algorithm: rmba | rpmba | rda | proxgrad-poly.
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    pfail: Option<f64>,
    /// Sampling mode: streaming | finite.
    #[arg(long)]
    mode: Option<String>,
    /// Pool size for finite mode (default 8·d).
    #[arg(long)]
    m_samples: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long)]
    delta_prime: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    noise_scale: Option<f64>,
    /// Use the averaged inner-loop output.
    #[arg(long)]
    is_conv: bool,
    /// Scale α₀ by 2^p for a single run.
    #[arg(long)]
    step_scale: Option<i32>,
    /// Sensitivity sweep exponent range.
    #[arg(long)]
    p_min: Option<i32>,
    #[arg(long)]
    p_max: Option<i32>,
    #[arg(long)]
    cadence: Option<usize>,
    #[arg(long)]
    stop_dist: Option<f64>,
    #[arg(long)]
    max_total_samples: Option<u64>,
    /// Desk-scale overrides of the schedule counts.
    #[arg(long)]
    override_k: Option<usize>,
    #[arg(long)]
    override_t: Option<usize>,
    #[arg(long)]
    override_m: Option<usize>,
    /// ℓ1 weight for the logistic family.
    #[arg(long)]
    tau: Option<f64>,
    /// Sharpness grid exponent: μ = τ·√d·2^{−p}.
    #[arg(long)]
    mu_grid_p: Option<i32>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    sparsity: Option<usize>,
    #[arg(long)]
    gamma_rda: Option<f64>,
    #[arg(long)]
    poly_c: Option<f64>,
    #[arg(long)]
    poly_p: Option<f64>,
    #[arg(long)]
    idx_images: Option<PathBuf>,
    #[arg(long)]
    idx_labels: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long)]
    format: Option<String>,
}

fn parse_tag<T: serde::de::DeserializeOwned>(value: &str, what: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| format!("unknown {what}: {value}"))
}

impl RunArgs {
    fn resolve(self) -> Result<ExperimentConfig, String> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path).map_err(|e| e.to_string())?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.problem {
            config.problem = parse_tag::<ProblemTag>(v, "problem")?;
        }
        if let Some(v) = &self.model {
            config.model = parse_tag::<ModelTag>(v, "model")?;
        }
        if let Some(v) = &self.algorithm {
            config.algorithm = parse_tag::<AlgorithmTag>(v, "algorithm")?;
        }
        if let Some(v) = &self.mode {
            config.mode = parse_tag::<SamplingMode>(v, "mode")?;
        }
        if let Some(v) = &self.format {
            config.format = parse_tag::<OutputFormat>(v, "format")?;
        }
        macro_rules! set {
            ($($field:ident <- $arg:ident),* $(,)?) => {
                $(if let Some(v) = self.$arg { config.$field = v; })*
            };
        }
        set!(
            dim <- d,
            p_fail <- pfail,
            trials <- trials,
            seed <- seed,
            eps <- eps,
            gamma <- gamma,
            delta2 <- delta2,
            delta_prime <- delta_prime,
            r0 <- r0,
            nu <- nu,
            noise_scale <- noise_scale,
            step_scale_exponent <- step_scale,
            sensitivity_p_min <- p_min,
            sensitivity_p_max <- p_max,
            tau <- tau,
            mu_grid_exponent <- mu_grid_p,
            n_samples <- n_samples,
            sparsity <- sparsity,
            gamma_rda <- gamma_rda,
            poly_c <- poly_c,
            poly_p <- poly_p,
            out <- out,
        );
        if self.is_conv {
            config.is_conv = true;
        }
        if self.m_samples.is_some() {
            config.m_samples = self.m_samples;
        }
        if self.cadence.is_some() {
            config.cadence = self.cadence;
        }
        if self.stop_dist.is_some() {
            config.stop_dist = self.stop_dist;
        }
        if self.max_total_samples.is_some() {
            config.max_total_samples = self.max_total_samples;
        }
        if self.idx_images.is_some() {
            config.idx_images = self.idx_images;
        }
        if self.idx_labels.is_some() {
            config.idx_labels = self.idx_labels;
        }
        if self.override_k.is_some() || self.override_t.is_some() || self.override_m.is_some() {
            config.schedule_override = Some(ScheduleOverride {
                inner_iters: self.override_k,
                stages: self.override_t,
                ensemble_size: self.override_m,
            });
        }
        Ok(config)
    }
}

fn exit_for(err: &HarnessError) -> ExitCode {
    match err {
        HarnessError::Schedule(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (label, result): (&str, Result<ExperimentConfig, String>) = match cli.command {
        Command::Convergence(args) => ("convergence", args.resolve()),
        Command::Sensitivity(args) => ("sensitivity", args.resolve()),
        Command::Identification(args) => ("identification", args.resolve()),
    };
    let config = match result {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let outcome: Result<(), HarnessError> = match label {
        "convergence" => run_convergence(&config).map(|o| {
            eprintln!(
                "convergence: {} trials, T={}, K={}, wrote {}",
                config.trials,
                o.aggregate.schedule.stages,
                o.aggregate.schedule.inner_iters,
                config.out.display()
            );
        }),
        "sensitivity" => run_stepsize_sensitivity(&config).map(|o| {
            eprintln!(
                "sensitivity: {} exponent rows, cap {}, wrote {}",
                o.rows.len(),
                o.cap,
                config.out.display()
            );
        }),
        _ => run_identification(&config).map(|o| {
            eprintln!(
                "identification: support size {}, budget {}, wrote {}",
                o.support_size,
                o.schedule.stages * (o.schedule.inner_iters + 1),
                config.out.display()
            );
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
