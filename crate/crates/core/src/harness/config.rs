//! `key = value` configuration files.

use thiserror::Error;

use crate::ir::InputConfig;
use crate::values::{ImplParams, ParamsError};

pub const FUEL_BASE: u64 = 64;
pub const DEFAULT_FUEL_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessConfig {
    pub params: ImplParams,
    /// Inputs per function and per loop.
    pub tests: usize,
    pub seed: u64,
    pub fuel_cap: u64,
    pub max_array_len: usize,
    pub max_attempts: u64,
    pub step_cap: u64,
    pub indent: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        let inputs = InputConfig::default();
        HarnessConfig {
            params: ImplParams::default(),
            tests: 1000,
            seed: 0,
            fuel_cap: DEFAULT_FUEL_CAP,
            max_array_len: inputs.max_array_len,
            max_attempts: inputs.max_attempts,
            step_cap: crate::ir::DEFAULT_STEP_CAP,
            indent: 4,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` needs a positive integer, got `{value}`")]
    BadValue { line: usize, key: String, value: String },
    #[error(transparent)]
    Params(#[from] ParamsError),
}

const SIZE_KEYS: [&str; 5] = ["bits_char", "bits_short", "bits_int", "bits_long", "bits_llong"];

impl HarnessConfig {
    pub fn input_config(&self) -> InputConfig {
        InputConfig {
            max_array_len: self.max_array_len,
            max_attempts: self.max_attempts,
        }
    }

    /// Applies a config file. Blank lines and `#` comments are ignored.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        self.apply_lines(text, false)
    }

    /// Applies a sizes file, which may only set `bits_*` keys.
    pub fn apply_sizes(&mut self, text: &str) -> Result<(), ConfigError> {
        self.apply_lines(text, true)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = HarnessConfig::default();
        c.apply_file(text)?;
        Ok(c)
    }

    fn apply_lines(&mut self, text: &str, sizes_only: bool) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let Some((k, v)) = l.split_once('=') else {
                return Err(ConfigError::Syntax { line });
            };
            let (k, v) = (k.trim(), v.trim());
            if sizes_only && !SIZE_KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey { line, key: k.into() });
            }
            self.set(line, k, v)?;
        }
        self.params.validate()?;
        Ok(())
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            line,
            key: key.into(),
            value: value.into(),
        };
        let n: u64 = value.parse().map_err(|_| bad())?;
        // the seed may be zero, nothing else may
        if n == 0 && key != "seed" {
            return Err(bad());
        }
        let small = |n: u64| u32::try_from(n).map_err(|_| bad());
        let size = |n: u64| usize::try_from(n).map_err(|_| bad());
        match key {
            "bits_char" => self.params.bits_char = small(n)?,
            "bits_short" => self.params.bits_short = small(n)?,
            "bits_int" => self.params.bits_int = small(n)?,
            "bits_long" => self.params.bits_long = small(n)?,
            "bits_llong" => self.params.bits_llong = small(n)?,
            "tests" => self.tests = size(n)?,
            "seed" => self.seed = n,
            "fuel_cap" => self.fuel_cap = n,
            "max_array_len" => self.max_array_len = size(n)?,
            "max_attempts" => self.max_attempts = n,
            "step_cap" => self.step_cap = n,
            "indent" => self.indent = size(n)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.into(),
                })
            }
        }
        Ok(())
    }
}
