use std::collections::BTreeMap;
use std::path::Path;

use ramsey_moments::moments::{EngineConfig, DEFAULT_PRECISION_BITS, DEFAULT_PROFILE_NODE_CAP};
use ramsey_moments::oracle::{OracleConfig, DEFAULT_ORACLE_MAX_N, ORACLE_HARD_MAX_N};
use ramsey_moments::simulator::DEFAULT_SUBSET_COST_CAP;
use thiserror::Error;

use crate::args::{GlobalArgs, OutputMode};

/// Keys a config file may set, matching the global flag names.
pub const CONFIG_KEYS: &[&str] = &[
    "output",
    "precision",
    "cap-profile-nodes",
    "cap-oracle-n",
    "cap-subset-cost",
    "seed",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: line {line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] ramsey_moments::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Core(ramsey_moments::Error::ResourceLimit(_)) => 3,
            CliError::Core(_) | CliError::Io(_) | CliError::VerifyFailed { .. } => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Resolved global settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub output: OutputMode,
    pub precision: u32,
    pub cap_profile_nodes: u64,
    pub cap_oracle_n: u32,
    pub cap_subset_cost: f64,
    pub seed: Option<u64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            output: OutputMode::Pretty,
            precision: DEFAULT_PRECISION_BITS,
            cap_profile_nodes: DEFAULT_PROFILE_NODE_CAP,
            cap_oracle_n: DEFAULT_ORACLE_MAX_N,
            cap_subset_cost: DEFAULT_SUBSET_COST_CAP,
            seed: None,
        }
    }
}

impl Settings {
    pub fn engine(&self) -> EngineConfig {
        EngineConfig {
            profile_node_cap: self.cap_profile_nodes,
            precision_bits: self.precision,
            ..EngineConfig::default()
        }
    }

    pub fn oracle(&self) -> OracleConfig {
        OracleConfig {
            max_n: self.cap_oracle_n,
        }
    }

    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(flags: &GlobalArgs) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(path) = &flags.config {
            s.apply_file(path)?;
        }
        if let Some(o) = flags.output {
            s.output = o;
        }
        if flags.json {
            s.output = OutputMode::Json;
        }
        if flags.csv {
            s.output = OutputMode::Csv;
        }
        if let Some(p) = flags.precision {
            s.precision = p;
        }
        if let Some(c) = flags.cap_profile_nodes {
            s.cap_profile_nodes = c;
        }
        if let Some(c) = flags.cap_oracle_n {
            s.cap_oracle_n = c;
        }
        if let Some(c) = flags.cap_subset_cost {
            s.cap_subset_cost = c;
        }
        if flags.seed.is_some() {
            s.seed = flags.seed;
        }
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.precision < 64 {
            return Err(usage(format!(
                "--precision must be at least 64, got {}",
                self.precision
            )));
        }
        if self.cap_profile_nodes == 0 {
            return Err(usage("--cap-profile-nodes must be positive"));
        }
        if self.cap_oracle_n == 0 || self.cap_oracle_n > ORACLE_HARD_MAX_N {
            return Err(usage(format!(
                "--cap-oracle-n must be between 1 and {ORACLE_HARD_MAX_N}, got {}",
                self.cap_oracle_n
            )));
        }
        if self.cap_subset_cost.is_nan() || self.cap_subset_cost <= 0.0 {
            return Err(usage("--cap-subset-cost must be positive"));
        }
        Ok(())
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let shown = path.display().to_string();
        for (key, (line, value)) in parse_config(&text, &shown)? {
            let bad = |message: String| CliError::Config {
                path: shown.clone(),
                line,
                message,
            };
            let num = |what: &str| bad(format!("{key}: {value:?} is not a valid {what}"));
            match key.as_str() {
                "output" => {
                    self.output =
                        <OutputMode as clap::ValueEnum>::from_str(&value, true).map_err(|_| {
                            bad(format!("output must be pretty, json or csv, got {value:?}"))
                        })?
                }
                "precision" => self.precision = value.parse().map_err(|_| num("integer"))?,
                "cap-profile-nodes" => {
                    self.cap_profile_nodes = value.parse().map_err(|_| num("integer"))?
                }
                "cap-oracle-n" => self.cap_oracle_n = value.parse().map_err(|_| num("integer"))?,
                "cap-subset-cost" => {
                    self.cap_subset_cost = value.parse().map_err(|_| num("number"))?
                }
                "seed" => self.seed = Some(value.parse().map_err(|_| num("integer"))?),
                _ => unreachable!("parse_config rejects unknown keys"),
            }
        }
        Ok(())
    }
}

/// `key = value` lines; `#` starts a comment. Later lines win.
fn parse_config(text: &str, path: &str) -> Result<BTreeMap<String, (usize, String)>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CliError::Config {
            path: path.to_string(),
            line: i + 1,
            message,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
        let k = k.trim().trim_start_matches("--").to_string();
        if !CONFIG_KEYS.contains(&k.as_str()) {
            return Err(err(format!(
                "unknown key {k:?}; known keys: {}",
                CONFIG_KEYS.join(", ")
            )));
        }
        out.insert(k, (i + 1, v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rm.conf");
        std::fs::write(&path, "# defaults\noutput = csv\nprecision=128\nseed = 9\n").unwrap();
        let flags = GlobalArgs {
            config: Some(path),
            precision: Some(300),
            ..GlobalArgs::default()
        };
        let s = Settings::resolve(&flags).unwrap();
        assert_eq!(s.output, OutputMode::Csv);
        assert_eq!(s.precision, 300);
        assert_eq!(s.seed, Some(9));
    }

    #[test]
    fn bad_files_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        for body in [
            "colour = red\n",
            "precision\n",
            "precision = many\n",
            "precision = 32\n",
        ] {
            let path = dir.path().join("bad.conf");
            std::fs::write(&path, body).unwrap();
            let flags = GlobalArgs {
                config: Some(path),
                ..GlobalArgs::default()
            };
            assert_eq!(
                Settings::resolve(&flags).unwrap_err().exit_code(),
                2,
                "{body}"
            );
        }
    }
}
