//! Serialized results of single-point runs.

use std::fmt::Write as _;

use espec_core::analysis::{DegeneracyGroup, DistributionTable, PhaseLabels, PhaseSignature};
use espec_core::ed::EdOptions;
use espec_core::scan::{format_float, Engine};
use espec_core::{CutSpec, EsLevel, ModelParams};
use serde::{Deserialize, Serialize};

/// Engine settings in force for the run, as resolved from flags, config file
/// and defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub rel_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ed: Option<EdOptions>,
    pub phase_labels: PhaseLabels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub engine: Engine,
    pub version: String,
    pub params: ModelParams,
    pub cut: CutSpec,
    pub seed: Option<u64>,
    pub wall_time: f64,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub gap: Option<f64>,
    /// `[E₀, E₁]` of the half-filled sector.
    pub energies: Option<[f64; 2]>,
    /// False when the level list was truncated.
    pub complete: bool,
    pub settings: Settings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub metadata: Metadata,
    pub levels: Vec<EsLevel>,
    pub groups: Vec<DegeneracyGroup>,
    /// Labels of the ground group.
    pub distribution: DistributionTable,
    pub signature: PhaseSignature,
    pub phase: Option<String>,
}

impl SpectrumDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// `xi,n_up,n_down,weight` per level.
    pub fn levels_csv(&self) -> String {
        let mut out = String::from("xi,n_up,n_down,weight\n");
        for l in &self.levels {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_float(l.xi),
                l.n_up,
                l.n_down,
                format_float(l.weight)
            );
        }
        out
    }

    /// Total subsystem particle number against `ξ`, one row per level.
    pub fn plot_table(&self) -> String {
        let mut out = String::from("n_total,xi\n");
        for l in &self.levels {
            let _ = writeln!(out, "{},{}", l.particles(), format_float(l.xi));
        }
        out
    }
}

/// gnuplot commands drawing a plot table written to `table`.
pub fn gnuplot_script(table: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key off\n\
         set title \"{title}\"\n\
         set xlabel 'particles in subsystem'\n\
         set ylabel 'xi'\n\
         plot '{table}' using 1:2 skip 1 with points pt 2\n"
    )
}
