use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RNG_ALGORITHM;

use super::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Written as `manifest.json` in every output directory.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub kind: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    /// Experiment-specific facts such as the potential at the truth.
    pub extras: serde_json::Map<String, serde_json::Value>,
    pub files: Vec<String>,
    /// The only field that differs between identical runs.
    pub wall_time_seconds: f64,
}

impl<'a> Manifest<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Self {
        Self {
            kind: config.kind.name(),
            version: VERSION,
            rng: RNG_ALGORITHM,
            seed: config.seed,
            config,
            extras: serde_json::Map::new(),
            files: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }
}

/// Collects files under one output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }

    pub fn write_text(&mut self, relative: &str, contents: &str) -> Result<()> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.written.push(relative.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, relative: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(relative, &text)
    }

    /// Write the manifest last so it lists every other file.
    pub fn finish(mut self, mut manifest: Manifest<'_>) -> Result<PathBuf> {
        manifest.files = self.written.clone();
        self.write_json("manifest.json", &manifest)?;
        Ok(self.root)
    }
}

/// Trace export: `step,value,accepted`.
pub fn trace_csv(steps: &[u64], values: &[f64], accepted: &[bool]) -> String {
    let mut out = String::with_capacity(24 * values.len() + 20);
    out.push_str("step,value,accepted\n");
    for ((s, v), a) in steps.iter().zip(values).zip(accepted) {
        let _ = writeln!(out, "{s},{v},{}", u8::from(*a));
    }
    out
}
