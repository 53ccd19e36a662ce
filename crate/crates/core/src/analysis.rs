//! Degenerate multiplets of the leading entanglement levels and the phase
//! signature read off from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{EntanglementSpectrum, EsLevel};

/// Default grouping tolerance for exact-diagonalization spectra.
pub const ED_REL_TOL: f64 = 1e-6;
/// Default grouping tolerance for free-fermion spectra.
pub const FREE_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyGroup {
    /// Mean `ξ` of the members.
    pub xi_rep: f64,
    pub members: Vec<EsLevel>,
    pub multiplicity: usize,
}

impl DegeneracyGroup {
    fn from_members(members: Vec<EsLevel>) -> Self {
        let xi_rep = members.iter().map(|l| l.xi).sum::<f64>() / members.len() as f64;
        Self {
            xi_rep,
            multiplicity: members.len(),
            members,
        }
    }

    /// Largest minus smallest member weight.
    pub fn splitting(&self) -> f64 {
        let (lo, hi) = self
            .members
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
                (lo.min(l.weight), hi.max(l.weight))
            });
        if self.members.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    pub fn labels(&self) -> Vec<(usize, usize)> {
        self.members.iter().map(EsLevel::labels).collect()
    }
}

/// Single-linkage grouping on weights.
///
/// Neighbouring levels (in `ξ` order) share a group when their weights differ
/// by at most `rel_tol · λ_max`. Groups come out by descending weight.
pub fn group_levels(spec: &EntanglementSpectrum, rel_tol: f64) -> Vec<DegeneracyGroup> {
    let mut levels = spec.levels.clone();
    crate::spectrum::sort_levels(&mut levels);
    let Some(first) = levels.first() else {
        return Vec::new();
    };
    let tol = rel_tol * first.weight;
    let mut groups = Vec::new();
    let mut current: Vec<EsLevel> = Vec::new();
    for level in levels {
        if let Some(prev) = current.last() {
            if (prev.weight - level.weight).abs() > tol {
                groups.push(DegeneracyGroup::from_members(std::mem::take(&mut current)));
            }
        }
        current.push(level);
    }
    groups.push(DegeneracyGroup::from_members(current));
    groups
}

pub fn ground_multiplicity(groups: &[DegeneracyGroup]) -> Result<usize> {
    groups
        .first()
        .map(|g| g.multiplicity)
        .ok_or(Error::EmptySpectrum)
}

/// Multiplicity of one group split by `(n_up, n_down)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<DistributionEntry>", into = "Vec<DistributionEntry>")]
pub struct DistributionTable {
    pub counts: BTreeMap<(usize, usize), usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub n_up: usize,
    pub n_down: usize,
    pub count: usize,
}

impl From<Vec<DistributionEntry>> for DistributionTable {
    fn from(entries: Vec<DistributionEntry>) -> Self {
        let mut counts = BTreeMap::new();
        for e in entries {
            *counts.entry((e.n_up, e.n_down)).or_insert(0) += e.count;
        }
        Self { counts }
    }
}

impl From<DistributionTable> for Vec<DistributionEntry> {
    fn from(table: DistributionTable) -> Self {
        table
            .counts
            .into_iter()
            .map(|((n_up, n_down), count)| DistributionEntry {
                n_up,
                n_down,
                count,
            })
            .collect()
    }
}

impl DistributionTable {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn get(&self, n_up: usize, n_down: usize) -> usize {
        self.counts.get(&(n_up, n_down)).copied().unwrap_or(0)
    }
}

pub fn distribution(group: &DegeneracyGroup) -> DistributionTable {
    let mut counts = BTreeMap::new();
    for l in &group.members {
        *counts.entry(l.labels()).or_insert(0) += 1;
    }
    DistributionTable { counts }
}

/// Every `label_a - label_b` over pairs of members, as `(Δn_up, Δn_down)`.
pub fn pairwise_offsets(group: &DegeneracyGroup) -> BTreeSet<(i64, i64)> {
    let labels: Vec<(i64, i64)> = group
        .members
        .iter()
        .map(|l| (l.n_up as i64, l.n_down as i64))
        .collect();
    let mut out = BTreeSet::new();
    for a in &labels {
        for b in &labels {
            out.insert((a.0 - b.0, a.1 - b.1));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PhaseTag {
    NonDegenerate,
    Sixteenfold,
    /// Four levels whose labels differ by adding or removing opposite-spin pairs.
    FourfoldDiagonal,
    /// Four levels whose labels differ by trading one spin species for the other.
    FourfoldAntidiagonal,
    Other(usize),
}

impl PhaseTag {
    /// Image under `n_down → L_A - n_down`.
    pub fn particle_hole(self) -> Self {
        match self {
            PhaseTag::FourfoldDiagonal => PhaseTag::FourfoldAntidiagonal,
            PhaseTag::FourfoldAntidiagonal => PhaseTag::FourfoldDiagonal,
            other => other,
        }
    }
}

impl fmt::Display for PhaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseTag::NonDegenerate => f.write_str("NonDegenerate"),
            PhaseTag::Sixteenfold => f.write_str("Sixteenfold"),
            PhaseTag::FourfoldDiagonal => f.write_str("FourfoldDiagonal"),
            PhaseTag::FourfoldAntidiagonal => f.write_str("FourfoldAntidiagonal"),
            PhaseTag::Other(m) => write!(f, "Other({m})"),
        }
    }
}

impl FromStr for PhaseTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "NonDegenerate" => Ok(PhaseTag::NonDegenerate),
            "Sixteenfold" => Ok(PhaseTag::Sixteenfold),
            "FourfoldDiagonal" => Ok(PhaseTag::FourfoldDiagonal),
            "FourfoldAntidiagonal" => Ok(PhaseTag::FourfoldAntidiagonal),
            _ => s
                .strip_prefix("Other(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|m| m.parse().ok())
                .map(PhaseTag::Other)
                .ok_or_else(|| format!("unknown phase tag {s:?}")),
        }
    }
}

impl From<PhaseTag> for String {
    fn from(tag: PhaseTag) -> Self {
        tag.to_string()
    }
}

impl TryFrom<String> for PhaseTag {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSignature {
    pub tag: PhaseTag,
    pub ground_multiplicity: usize,
    /// Weight spread inside the ground group.
    pub splitting: f64,
}

/// Tag the ground group.
///
/// A fourfold group is diagonal when every pairwise label offset is a multiple
/// of `(1, 1)` and antidiagonal when every offset is a multiple of `(1, -1)`.
/// An empty list yields `Other(0)`.
pub fn classify(groups: &[DegeneracyGroup]) -> PhaseSignature {
    let Some(ground) = groups.first() else {
        return PhaseSignature {
            tag: PhaseTag::Other(0),
            ground_multiplicity: 0,
            splitting: 0.0,
        };
    };
    let m = ground.multiplicity;
    let tag = match m {
        1 => PhaseTag::NonDegenerate,
        16 => PhaseTag::Sixteenfold,
        4 => {
            let offsets = pairwise_offsets(ground);
            if offsets.iter().all(|&(a, b)| a == b) {
                PhaseTag::FourfoldDiagonal
            } else if offsets.iter().all(|&(a, b)| a == -b) {
                PhaseTag::FourfoldAntidiagonal
            } else {
                PhaseTag::Other(4)
            }
        }
        m => PhaseTag::Other(m),
    };
    PhaseSignature {
        tag,
        ground_multiplicity: m,
        splitting: ground.splitting(),
    }
}

/// Phase numerals attached to signature tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLabels {
    pub non_degenerate: String,
    pub sixteenfold: String,
    pub fourfold_diagonal: String,
    pub fourfold_antidiagonal: String,
}

impl Default for PhaseLabels {
    fn default() -> Self {
        Self {
            non_degenerate: "I".into(),
            sixteenfold: "II".into(),
            fourfold_diagonal: "III".into(),
            fourfold_antidiagonal: "IV".into(),
        }
    }
}

impl PhaseLabels {
    pub fn label(&self, tag: PhaseTag) -> Option<&str> {
        match tag {
            PhaseTag::NonDegenerate => Some(&self.non_degenerate),
            PhaseTag::Sixteenfold => Some(&self.sixteenfold),
            PhaseTag::FourfoldDiagonal => Some(&self.fourfold_diagonal),
            PhaseTag::FourfoldAntidiagonal => Some(&self.fourfold_antidiagonal),
            PhaseTag::Other(_) => None,
        }
    }
}
