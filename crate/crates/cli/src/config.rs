//! Flat `key = value` run configuration with `#` comments.
//!
//! One format serves every subcommand; commands read the keys they need and
//! ignore the rest. Violations are reported with the offending line number.

use std::collections::HashMap;

use crate::CliError;

/// Keys any command may consume. Anything else is rejected so typos fail
/// loudly instead of silently falling back to a default.
const KNOWN_KEYS: &[&str] = &[
    "protocol",
    "target_spectrum",
    "machine_spectrum",
    "beta_r",
    "beta_h",
    "tolerance",
    "max_cycles",
    "seed",
    "trials",
    "d_s_max",
    "d_m_max",
    "n_max",
    "e_max",
    "sweep_key",
    "sweep_values",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolChoice {
    Optimal,
    MaxSwap,
    IncoherentMaxSwap,
    SingleSwapQubit,
    ThreeQubitIncoherent,
}

impl ProtocolChoice {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "optimal" => Some(Self::Optimal),
            "max-swap" => Some(Self::MaxSwap),
            "incoherent-max-swap" => Some(Self::IncoherentMaxSwap),
            "single-swap-qubit" => Some(Self::SingleSwapQubit),
            "three-qubit-incoherent" => Some(Self::ThreeQubitIncoherent),
            _ => None,
        }
    }
}

/// Raw parsed file: key -> (line number, value text).
#[derive(Debug)]
pub struct ConfigFile {
    entries: HashMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = HashMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "line {line_no}: expected `key = value`, got `{line}`"
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::config(format!(
                    "line {line_no}: unknown key `{key}`"
                )));
            }
            if let Some((prev_line, _)) = entries.insert(key.clone(), (line_no, value)) {
                return Err(CliError::config(format!(
                    "line {line_no}: key `{key}` already set on line {prev_line}"
                )));
            }
        }
        Ok(Self { entries })
    }

    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn bad(&self, key: &str, what: &str) -> CliError {
        let line = self.get(key).map(|(l, _)| *l).unwrap_or(0);
        CliError::config(format!("line {line}: {key}: {what}"))
    }

    fn missing(key: &str) -> CliError {
        CliError::config(format!("missing required key `{key}`"))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some((_, v)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| self.bad(key, &format!("invalid number `{v}`"))),
        }
    }

    pub fn f64_req(&self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?.ok_or_else(|| Self::missing(key))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some((_, v)) => v
                .parse::<usize>()
                .map_err(|_| self.bad(key, &format!("invalid integer `{v}`"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some((_, v)) => v
                .parse::<u64>()
                .map_err(|_| self.bad(key, &format!("invalid integer `{v}`"))),
        }
    }

    pub fn usize_req(&self, key: &str) -> Result<usize, CliError> {
        match self.get(key) {
            None => Err(Self::missing(key)),
            Some((_, v)) => v
                .parse::<usize>()
                .map_err(|_| self.bad(key, &format!("invalid integer `{v}`"))),
        }
    }

    pub fn levels_req(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let (_, v) = self.get(key).ok_or_else(|| Self::missing(key))?;
        let mut out = Vec::new();
        for part in v.split(',') {
            let part = part.trim();
            out.push(
                part.parse::<f64>()
                    .map_err(|_| self.bad(key, &format!("invalid number `{part}`")))?,
            );
        }
        Ok(out)
    }

    /// `beta_h` accepts a number or the keyword `inf-temp` (the hot bath at
    /// infinite temperature, encoded as beta = 0).
    pub fn beta_h_opt(&self) -> Result<Option<f64>, CliError> {
        match self.get("beta_h") {
            None => Ok(None),
            Some((_, v)) if v == "inf-temp" => Ok(Some(0.0)),
            Some((_, v)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| self.bad("beta_h", &format!("invalid number `{v}` (or `inf-temp`)"))),
        }
    }

    pub fn protocol_req(&self) -> Result<ProtocolChoice, CliError> {
        let (_, v) = self
            .get("protocol")
            .ok_or_else(|| Self::missing("protocol"))?;
        ProtocolChoice::parse(v).ok_or_else(|| {
            self.bad(
                "protocol",
                &format!(
                    "unknown protocol `{v}` (expected optimal, max-swap, incoherent-max-swap, \
                     single-swap-qubit or three-qubit-incoherent)"
                ),
            )
        })
    }

    pub fn str_opt(&self, key: &str) -> Option<&str> {
        self.get(key).map(|(_, v)| v.as_str())
    }

    /// Copy of the config with one key replaced (sweeps fan out this way).
    pub fn with_override(&self, key: &str, value: &str) -> Self {
        let mut entries = self.entries.clone();
        let line = entries.get(key).map(|(l, _)| *l).unwrap_or(0);
        entries.insert(key.to_string(), (line, value.to_string()));
        Self { entries }
    }
}
