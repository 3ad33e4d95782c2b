//! Run settings: config file < `SIMPLIKIT_*` environment < flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use simplikit_core::gateway::{DEFAULT_MAX_LEN, MAX_BEAM};

use crate::error::CliError;

pub const DEFAULT_BACKEND: &str = "catalog";
pub const DEFAULT_BEAM: usize = 10;

/// Flags shared by every subcommand. Each falls back to its environment
/// variable, then to the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Run config file (TOML).
    #[arg(long, env = "SIMPLIKIT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Backend id: `catalog`, `reducer`, or an id from the registry.
    #[arg(long, env = "SIMPLIKIT_BACKEND")]
    pub backend: Option<String>,
    /// Candidates requested per method.
    #[arg(long, env = "SIMPLIKIT_BEAM")]
    pub beam: Option<usize>,
    /// Token limit for generated candidates.
    #[arg(long, env = "SIMPLIKIT_MAX_LEN")]
    pub max_len: Option<usize>,
    #[arg(long, env = "SIMPLIKIT_SEED")]
    pub seed: Option<u64>,
    /// Methods processed in parallel.
    #[arg(long, env = "SIMPLIKIT_WORKERS")]
    pub workers: Option<usize>,
    /// Project config (TOML or JSON) used for validation.
    #[arg(long, env = "SIMPLIKIT_PROJECT")]
    pub project: Option<PathBuf>,
    /// Backend registry (TOML).
    #[arg(long, env = "SIMPLIKIT_REGISTRY")]
    pub registry: Option<PathBuf>,
    /// Machine-readable output file (default: stdout).
    #[arg(long, env = "SIMPLIKIT_OUT")]
    pub out: Option<PathBuf>,
}

/// The run config file. Relative paths are resolved against its directory.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub backend: Option<String>,
    pub beam: Option<usize>,
    pub max_len: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub project: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = crate::error::read_input(path)?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.project, &mut cfg.registry, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub backend: String,
    pub beam: usize,
    pub max_len: usize,
    pub seed: u64,
    pub workers: usize,
    pub project: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        self.layer(file)
    }

    /// `self` (flags and environment) over `file` over defaults.
    pub fn layer(&self, file: FileConfig) -> Result<RunConfig, CliError> {
        let cfg = RunConfig {
            backend: self.backend.clone().or(file.backend).unwrap_or_else(|| DEFAULT_BACKEND.into()),
            beam: self.beam.or(file.beam).unwrap_or(DEFAULT_BEAM),
            max_len: self.max_len.or(file.max_len).unwrap_or(DEFAULT_MAX_LEN),
            seed: self.seed.or(file.seed).unwrap_or(0),
            workers: self.workers.or(file.workers).unwrap_or(1),
            project: self.project.clone().or(file.project),
            registry: self.registry.clone().or(file.registry),
            out: self.out.clone().or(file.out),
        };
        if cfg.beam == 0 || cfg.beam > MAX_BEAM {
            return Err(CliError::Config(format!("beam must be in 1..={MAX_BEAM}, got {}", cfg.beam)));
        }
        if cfg.max_len == 0 {
            return Err(CliError::Config("max_len must be positive".into()));
        }
        if cfg.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if cfg.backend.trim().is_empty() {
            return Err(CliError::Config("backend id is empty".into()));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_which_overrides_defaults() {
        let file = FileConfig {
            backend: Some("remote".into()),
            beam: Some(5),
            workers: Some(3),
            ..Default::default()
        };
        let flags = Common {
            beam: Some(2),
            ..Default::default()
        };
        let cfg = flags.layer(file).unwrap();
        assert_eq!((cfg.backend.as_str(), cfg.beam, cfg.workers, cfg.seed), ("remote", 2, 3, 0));
        let cfg = Common::default().layer(FileConfig::default()).unwrap();
        assert_eq!((cfg.backend.as_str(), cfg.beam, cfg.max_len), (DEFAULT_BACKEND, DEFAULT_BEAM, DEFAULT_MAX_LEN));
    }

    #[test]
    fn rejects_bad_values() {
        for c in [
            Common { beam: Some(0), ..Default::default() },
            Common { beam: Some(MAX_BEAM + 1), ..Default::default() },
            Common { workers: Some(0), ..Default::default() },
        ] {
            assert_eq!(c.layer(FileConfig::default()).unwrap_err().code(), 2);
        }
    }

    #[test]
    fn file_paths_resolve_against_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "project = \"p/cfg.toml\"\nbeam = 4\n").unwrap();
        let f = FileConfig::load(&path).unwrap();
        assert_eq!(f.project, Some(dir.path().join("p/cfg.toml")));
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert_eq!(FileConfig::load(&path).unwrap_err().code(), 2);
    }
}
