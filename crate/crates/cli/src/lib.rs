//! Pipeline driver behind the `dipoed` binary.
//!
//! Every step reads one JSON config (plus `path=value` overrides), validates
//! it completely, runs, writes its artifacts under `output_dir` and records
//! them in `output_dir/manifest.json`.

pub mod config;

mod artifacts;
mod commands;
mod setup;

use std::path::{Path, PathBuf};

use clap::ValueEnum;

pub use artifacts::MANIFEST;
pub use config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Step {
    /// Draw prior samples.
    SamplePrior,
    /// Generate a training dataset of prior samples and observables.
    GenData,
    /// Compute active-subspace and POD bases.
    BuildBases,
    /// Train a projected network surrogate.
    Train,
    /// Estimate the EIG of one design by double-loop Monte Carlo.
    EstimateEig,
    /// Greedy sensor selection.
    Greedy,
    /// EIG error against surrogate generalization error.
    Verify,
    /// Closed-form linear-Gaussian EIG and exhaustive design search.
    Oracle,
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::SamplePrior => "sample-prior",
            Step::GenData => "gen-data",
            Step::BuildBases => "build-bases",
            Step::Train => "train",
            Step::EstimateEig => "estimate-eig",
            Step::Greedy => "greedy",
            Step::Verify => "verify",
            Step::Oracle => "oracle",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("{step}: {source}")]
    Core {
        step: &'static str,
        #[source]
        source: dipoed::Error,
    },
    #[error("missing input {}", .0.display())]
    MissingInput(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for invalid configuration or arguments, 3 for numerical failures,
    /// 4 for I/O and artifact problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::MissingInput(_) | CliError::Io { .. } => 4,
            CliError::Core { source, .. } => {
                if source.is_numerical() {
                    3
                } else if source.is_io() || matches!(innermost(source), dipoed::Error::Json(_)) {
                    4
                } else {
                    2
                }
            }
        }
    }
}

fn innermost(e: &dipoed::Error) -> &dipoed::Error {
    match e {
        dipoed::Error::AtSample { source, .. } | dipoed::Error::Context { source, .. } => innermost(source),
        other => other,
    }
}

/// What a step produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    /// Artifact file names relative to the output directory.
    pub files: Vec<String>,
}

/// Reads the config at `config_path`, applies `overrides` and runs `step`.
pub fn run(step: Step, config_path: &Path, overrides: &[String]) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(|source| CliError::Io {
        path: config_path.to_path_buf(),
        source,
    })?;
    let mut doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(vec![format!("{}: {e}", config_path.display())]))?;
    let mut problems = Vec::new();
    for o in overrides {
        if let Err(p) = config::apply_override(&mut doc, o) {
            problems.push(p);
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    run_document(step, doc)
}

/// Runs `step` on an in-memory config document.
pub fn run_document(step: Step, doc: serde_json::Value) -> Result<Outcome, CliError> {
    let cfg = config::parse(doc).map_err(CliError::Config)?;
    let problems = cfg.validate(step);
    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    match cfg.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(vec![format!("threads: {e}")]))?
            .install(|| commands::execute(step, &cfg)),
        None => commands::execute(step, &cfg),
    }
}
