//! Session configuration from a JSON file and inline flags; flags win.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use colorweyl::statistics::{FactorDescriptor, FactorError, PresetKind};
use colorweyl::CommutationFactor;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_PRECISION: usize = 128;
pub const MIN_PRECISION: usize = 53;
pub const MAX_PRECISION: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("invalid config {path}: {reason}")]
    Json { path: PathBuf, reason: String },
    #[error("no factor given; pass --config or --preset with --N")]
    NoFactor,
    #[error("--preset needs --N")]
    NoSize,
    #[error("invalid factor: {0}")]
    Factor(#[from] FactorError),
    #[error("precision must lie in {MIN_PRECISION}..={MAX_PRECISION} bits, got {0}")]
    Precision(usize),
    #[error("occupation cap must be at least 1")]
    Cap,
}

/// A config file: a session object or a bare factor descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionFile {
    pub factor: FactorDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub preset: Option<PresetKind>,
    pub n: Option<usize>,
    pub cap: Option<u32>,
    pub precision: Option<usize>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionConfig {
    pub factor: FactorDescriptor,
    pub cap: u32,
    pub precision: usize,
    pub format: Format,
    pub seed: u64,
}

/// A validated configuration with its factor built.
#[derive(Debug, Clone)]
pub struct Session {
    pub config: SessionConfig,
    pub factor: Arc<CommutationFactor>,
}

pub fn read_config(path: &Path) -> Result<SessionFile, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.into(), reason: e.to_string() })?;
    let json = |e: serde_json::Error| ConfigError::Json { path: path.into(), reason: e.to_string() };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(json)?;
    if value.get("factor").is_some() {
        serde_json::from_value(value).map_err(json)
    } else {
        let factor = serde_json::from_value(value).map_err(json)?;
        Ok(SessionFile { factor, cap: None, precision: None, format: None, seed: None })
    }
}

impl Session {
    pub fn resolve(o: &Overrides) -> Result<Session, ConfigError> {
        let file = o.config.as_deref().map(read_config).transpose()?;
        let mut factor = file.as_ref().map(|f| f.factor.clone());
        match (o.preset, o.n, &mut factor) {
            (Some(kind), Some(n), _) => factor = Some(FactorDescriptor::preset(kind, n)),
            (Some(kind), None, Some(d)) => *d = FactorDescriptor::preset(kind, d.n),
            (Some(_), None, None) => return Err(ConfigError::NoSize),
            (None, Some(n), Some(d)) => d.n = n,
            (None, _, _) => {}
        }
        let factor = factor.ok_or(ConfigError::NoFactor)?;
        let pick = |flag: Option<u32>, file: Option<u32>| flag.or(file);
        let cap = pick(o.cap, file.as_ref().and_then(|f| f.cap)).unwrap_or(1);
        let precision = o.precision.or(file.as_ref().and_then(|f| f.precision)).unwrap_or(DEFAULT_PRECISION);
        let format = o.format.or(file.as_ref().and_then(|f| f.format)).unwrap_or_default();
        let seed = o.seed.or(file.as_ref().and_then(|f| f.seed)).unwrap_or(0);
        if cap == 0 {
            return Err(ConfigError::Cap);
        }
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&precision) {
            return Err(ConfigError::Precision(precision));
        }
        let c = factor.build()?;
        Ok(Session { config: SessionConfig { factor, cap, precision, format, seed }, factor: Arc::new(c) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inline(kind: PresetKind, n: usize) -> Overrides {
        Overrides { preset: Some(kind), n: Some(n), ..Default::default() }
    }

    #[test]
    fn defaults() {
        let s = Session::resolve(&inline(PresetKind::Example3Cf, 2)).unwrap();
        assert_eq!((s.config.cap, s.config.precision, s.config.seed), (1, DEFAULT_PRECISION, 0));
        assert_eq!(s.config.format, Format::Json);
        assert_eq!(s.factor.dim(), 2);
    }

    #[test]
    fn invalid_sessions() {
        assert!(matches!(Session::resolve(&Overrides::default()), Err(ConfigError::NoFactor)));
        let e = Session::resolve(&inline(PresetKind::AppendixEven, 3)).unwrap_err();
        assert!(e.to_string().contains("appendix_even"), "{e}");
        let mut o = inline(PresetKind::Example3Cf, 2);
        o.precision = Some(16);
        assert!(matches!(Session::resolve(&o), Err(ConfigError::Precision(16))));
        o.precision = None;
        o.cap = Some(0);
        assert!(matches!(Session::resolve(&o), Err(ConfigError::Cap)));
    }
}
