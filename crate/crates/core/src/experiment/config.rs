//! Sweep configuration files, CSV output and run manifests.
//!
//! A sweep is described by a flat TOML file:
//!
//! ```toml
//! n = 1000
//! gamma = 100
//! k = 6                 # fixed-k prior; use `p = 0.006` for a Bernoulli prior
//! s11 = 0.8             # default 1
//! s01 = 0.0             # default 0
//! epsilon = 0.1         # default 0.1
//! seed = 2024
//! trials = 100
//! m = [50, 100, 150]
//! families = ["bernoulli", "doubly_regular", "doubly_regular:multi"]
//! # p_threshold = 0.006 # decoder prior, defaults to k/n or p
//! ```
//!
//! A family entry is a family name, optionally followed by `:simple` or
//! `:multi` (simple is the default).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AggregateRow, TrialConfig};
use crate::design::{DesignSpec, Family};
use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, Prior};

pub const CSV_HEADER: &str =
    "family,multi,n,k,p,s11,s01,gamma,m,trials,success_rate,ci_low,ci_high,mean_overlap,failures,seed";

fn default_s11() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub gamma: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_threshold: Option<f64>,
    #[serde(default = "default_s11")]
    pub s11: f64,
    #[serde(default)]
    pub s01: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub seed: u64,
    pub trials: usize,
    pub m: Vec<usize>,
    pub families: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyEntry {
    pub family: Family,
    pub multi: bool,
}

pub fn parse_family_entry(s: &str) -> Result<FamilyEntry> {
    let (name, variant) = match s.split_once(':') {
        Some((name, v)) => (name, Some(v)),
        None => (s, None),
    };
    let family: Family = name.trim().parse()?;
    let multi = match variant.map(str::trim) {
        None | Some("simple") => false,
        Some("multi") => true,
        Some(v) => {
            return Err(Error::invalid(format!(
                "unknown variant {v:?} in family entry {s:?} (expected simple or multi)"
            )))
        }
    };
    Ok(FamilyEntry { family, multi })
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::invalid(format!("field `{field}`: {msg}"))
}

impl SweepConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })?;
        cfg.trial_config()?;
        cfg.family_list()?;
        Ok(cfg)
    }

    pub fn prior(&self) -> Result<Prior> {
        match (self.k, self.p) {
            (Some(k), None) => Ok(Prior::Fixed(k)),
            (None, Some(p)) => Ok(Prior::Bernoulli(p)),
            _ => Err(field_error("k", "give exactly one of `k` (fixed prior) or `p` (Bernoulli prior)")),
        }
    }

    pub fn trial_config(&self) -> Result<TrialConfig> {
        if self.m.is_empty() {
            return Err(field_error("m", "grid is empty"));
        }
        if self.m.contains(&0) {
            return Err(field_error("m", "query counts must be positive"));
        }
        if self.trials == 0 {
            return Err(field_error("trials", "must be positive"));
        }
        let prior = self.prior()?;
        prior.validate(self.n).map_err(|e| field_error(if self.k.is_some() { "k" } else { "p" }, e))?;
        let channel = ChannelMatrix::new(self.s11, self.s01).map_err(|e| field_error("s11", e))?;
        let design = DesignSpec::new(self.n, self.m[0], self.gamma, Family::DoublyRegular, true)
            .map_err(|e| field_error("gamma", e))?;
        let config = TrialConfig {
            design,
            prior,
            channel,
            p_for_threshold: self.p_threshold,
            epsilon: self.epsilon,
            base_seed: self.seed,
        };
        let p = config.threshold_p();
        if !(p > 0.0 && p < 1.0) {
            return Err(field_error("p_threshold", format!("decoder prior {p} must lie in (0, 1)")));
        }
        if !(self.epsilon > 0.0) {
            return Err(field_error("epsilon", "must be positive"));
        }
        Ok(config)
    }

    pub fn family_list(&self) -> Result<Vec<(Family, bool)>> {
        if self.families.is_empty() {
            return Err(field_error("families", "list is empty"));
        }
        let base = self.trial_config()?;
        self.families
            .iter()
            .map(|s| {
                let e = parse_family_entry(s).map_err(|e| field_error("families", e))?;
                base.with_family(e.family, e.multi)
                    .design
                    .validate()
                    .map_err(|err| field_error("families", format!("{s}: {err}")))?;
                Ok((e.family, e.multi))
            })
            .collect()
    }
}

/// Renders aggregate rows as CSV with a fixed column set and number format.
pub fn write_csv(config: &SweepConfig, rows: &[AggregateRow]) -> Result<String> {
    let base = config.trial_config()?;
    let k = config.k.map(|k| k.to_string()).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{},{}",
            r.family,
            r.multi,
            config.n,
            k,
            base.threshold_p(),
            config.s11,
            config.s01,
            config.gamma,
            r.m,
            r.trials,
            r.success_rate,
            r.ci_low,
            r.ci_high,
            r.mean_overlap,
            r.failures,
            config.seed
        );
    }
    Ok(out)
}

/// Resolved inputs of a run, echoed next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
}

impl RunManifest {
    pub fn new<T: Serialize>(command: &str, seed: u64, parameters: &T) -> Result<Self> {
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            parameters: serde_json::to_value(parameters)
                .map_err(|e| Error::Io(format!("cannot serialise manifest: {e}")))?,
        })
    }
}
