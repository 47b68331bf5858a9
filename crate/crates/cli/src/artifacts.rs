//! Output directory handling and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use dipoed::json::to_string_fixed;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::{CliError, Outcome, Step};

pub const MANIFEST: &str = "manifest.json";

/// Artifacts written by one step.
pub struct Workspace {
    dir: PathBuf,
    step: Step,
    files: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Workspace {
    pub fn open(cfg: &RunConfig, step: Step) -> Result<Self, CliError> {
        let dir = PathBuf::from(cfg.output_dir.as_deref().expect("validated: output_dir present"));
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Self {
            dir,
            step,
            files: Vec::new(),
        })
    }

    pub fn core(&self) -> impl Fn(dipoed::Error) -> CliError {
        let step = self.step.name();
        move |source| CliError::Core { step, source }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Path of an input artifact, which must already exist.
    pub fn input(&self, name: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        if p.is_file() {
            Ok(p)
        } else {
            Err(CliError::MissingInput(p))
        }
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = to_string_fixed(value).map_err(|e| self.core()(e.into()))?;
        self.write_text(name, &text)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, text).map_err(io_err(&p))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Records a header + sidecar pair already saved under `stem`.
    pub fn saved_container(&mut self, stem: &str) {
        self.files.push(format!("{stem}.json"));
        self.files.push(format!("{stem}.bin"));
    }

    /// Adds this step to the manifest and returns the outcome.
    pub fn finish(self, seeds: Value, solves: Value, summary: String) -> Result<Outcome, CliError> {
        let path = self.path(MANIFEST);
        let mut steps = fs::read_to_string(&path)
            .ok()
            .and_then(|t| serde_json::from_str::<Value>(&t).ok())
            .and_then(|v| v.get("steps").and_then(Value::as_object).cloned())
            .unwrap_or_default();
        steps.insert(
            self.step.name().to_string(),
            json!({
                "files": self.files,
                "seeds": seeds,
                "solve_budget": solves,
                "summary": summary,
            }),
        );
        // serde_json's map is ordered by key, so the file is stable
        let steps: Map<String, Value> = steps.into_iter().collect();
        let manifest = json!({ "format": "dipoed-manifest-v1", "steps": steps });
        let text = to_string_fixed(&manifest).map_err(|e| self.core()(e.into()))?;
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(Outcome {
            summary,
            files: self.files,
        })
    }
}
