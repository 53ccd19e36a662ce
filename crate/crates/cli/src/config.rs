//! Config files and the flag > file > default merge.

use std::path::Path;

use anyhow::{bail, Context};
use espec_core::analysis::PhaseLabels;
use espec_core::scan::EngineChoice;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A single value, an explicit list, or `start:stop:count` / comma text.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AxisValue {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

impl AxisValue {
    pub fn values(&self) -> anyhow::Result<Vec<f64>> {
        match self {
            AxisValue::One(x) => Ok(vec![*x]),
            AxisValue::Many(v) => Ok(v.clone()),
            AxisValue::Text(s) => parse_axis(s),
        }
    }
}

/// `a:b:n` expands to `n` evenly spaced points from `a` to `b` inclusive;
/// otherwise a comma-separated list.
pub fn parse_axis(s: &str) -> anyhow::Result<Vec<f64>> {
    let s = s.trim();
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let start: f64 = start.trim().parse().with_context(|| format!("axis start in {s:?}"))?;
            let stop: f64 = stop.trim().parse().with_context(|| format!("axis stop in {s:?}"))?;
            let count: usize = count.trim().parse().with_context(|| format!("axis count in {s:?}"))?;
            if count == 0 {
                bail!("axis {s:?} has zero points");
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let step = (stop - start) / (count - 1) as f64;
            Ok((0..count)
                .map(|k| if k == count - 1 { stop } else { start + step * k as f64 })
                .collect())
        }
        [_] => s
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .with_context(|| format!("axis value {v:?}"))
            })
            .collect(),
        _ => bail!("axis {s:?} is neither a list nor start:stop:count"),
    }
}

/// Everything a config file may set. Keys match the long flag names.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    #[serde(rename = "LA")]
    pub cut_len: Option<usize>,
    pub t: Option<f64>,
    pub dt: Option<AxisValue>,
    #[serde(rename = "U")]
    pub u: Option<AxisValue>,
    pub rel_tol: Option<f64>,
    pub free_rel_tol: Option<f64>,
    pub ed_rel_tol: Option<f64>,
    pub max_levels: Option<usize>,
    pub xi_window: Option<f64>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub max_basis: Option<usize>,
    pub sector_cap: Option<usize>,
    pub floor: Option<f64>,
    pub audit_sectors: Option<bool>,
    pub audit: Option<bool>,
    pub engine: Option<EngineChoice>,
    pub workers: Option<usize>,
    pub format: Option<Format>,
    pub phase_labels: Option<PhaseLabels>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// The single `δt` value a one-point run needs.
    pub fn single(axis: &Option<AxisValue>, name: &str) -> anyhow::Result<Option<f64>> {
        match axis {
            None => Ok(None),
            Some(a) => match a.values()?.as_slice() {
                [x] => Ok(Some(*x)),
                _ => bail!("config key {name} must be a single value here"),
            },
        }
    }
}
