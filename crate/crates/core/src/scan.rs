//! `(δt, U)` sweeps at fixed `(L, L_A)`.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, PhaseSignature, PhaseTag};
use crate::ed::{self, EdOptions};
use crate::error::{Error, Result};
use crate::freefermion::{self, DEFAULT_MAX_LEVELS, DEFAULT_XI_WINDOW};
use crate::model::{CutSpec, ModelParams};
use crate::spectrum::{label_matched_deviation, EntanglementSpectrum};

/// Version of the tabular output layout.
pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 9] = [
    "schema_version",
    "delta_t",
    "U",
    "multiplicity",
    "signature",
    "ground_xi",
    "splitting",
    "engine",
    "error",
];
/// Largest ring on which `audit` cross-checks the free engine against ED.
pub const AUDIT_MAX_SITES: usize = 10;
pub const AUDIT_TOL: f64 = 1e-9;
/// Weights at or below this are left out of engine comparisons.
pub const COMPARE_FLOOR: f64 = 1e-12;
/// Worker-count override for sweeps.
pub const THREADS_ENV: &str = "ESPEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    /// Free fermions on `U = 0` rows, exact diagonalization elsewhere.
    #[default]
    Auto,
    Free,
    Ed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Free,
    Ed,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Free => "free",
            Engine::Ed => "ed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "free" => Some(Engine::Free),
            "ed" => Some(Engine::Ed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub delta_t_values: Vec<f64>,
    #[serde(rename = "U_values")]
    pub u_values: Vec<f64>,
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(rename = "L_A")]
    pub cut_len: usize,
    #[serde(default = "unit")]
    pub t: f64,
    #[serde(default)]
    pub engine: EngineChoice,
    #[serde(default = "free_rel_tol")]
    pub free_rel_tol: f64,
    #[serde(default = "ed_rel_tol")]
    pub ed_rel_tol: f64,
    #[serde(default = "max_levels")]
    pub max_levels: usize,
    #[serde(default = "xi_window")]
    pub xi_window: f64,
    #[serde(default)]
    pub ed: EdOptions,
    /// Re-run `U = 0` points with ED (for `L <= 10`) and compare spectra.
    #[serde(default)]
    pub audit: bool,
}

fn unit() -> f64 {
    1.0
}
fn free_rel_tol() -> f64 {
    analysis::FREE_REL_TOL
}
fn ed_rel_tol() -> f64 {
    analysis::ED_REL_TOL
}
fn max_levels() -> usize {
    DEFAULT_MAX_LEVELS
}
fn xi_window() -> f64 {
    DEFAULT_XI_WINDOW
}

impl GridSpec {
    pub fn new(sites: usize, cut_len: usize, delta_t_values: Vec<f64>, u_values: Vec<f64>) -> Self {
        Self {
            delta_t_values,
            u_values,
            sites,
            cut_len,
            t: 1.0,
            engine: EngineChoice::Auto,
            free_rel_tol: analysis::FREE_REL_TOL,
            ed_rel_tol: analysis::ED_REL_TOL,
            max_levels: DEFAULT_MAX_LEVELS,
            xi_window: DEFAULT_XI_WINDOW,
            ed: EdOptions::default(),
            audit: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_t_values.is_empty() || self.u_values.is_empty() {
            return Err(Error::InvalidParams("grid axes must be nonempty".into()));
        }
        for &dt in &self.delta_t_values {
            for &u in &self.u_values {
                self.params(dt, u).validate()?;
            }
        }
        CutSpec::new(self.cut_len).validate(self.sites)?;
        if self.engine == EngineChoice::Free && self.u_values.iter().any(|&u| u != 0.0) {
            return Err(Error::InvalidParams(
                "the free engine only applies to U = 0".into(),
            ));
        }
        for (name, v) in [
            ("free_rel_tol", self.free_rel_tol),
            ("ed_rel_tol", self.ed_rel_tol),
            ("xi_window", self.xi_window),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and >= 0")));
            }
        }
        if self.max_levels == 0 {
            return Err(Error::InvalidParams("max_levels must be positive".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.delta_t_values.len() * self.u_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points, `δt` outer and `U` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.delta_t_values
            .iter()
            .flat_map(|&dt| self.u_values.iter().map(move |&u| (dt, u)))
            .collect()
    }

    pub fn params(&self, delta_t: f64, u: f64) -> ModelParams {
        ModelParams::new(self.sites, self.t, delta_t, u)
    }

    pub fn engine_for(&self, u: f64) -> Engine {
        match self.engine {
            EngineChoice::Free => Engine::Free,
            EngineChoice::Ed => Engine::Ed,
            EngineChoice::Auto if u == 0.0 => Engine::Free,
            EngineChoice::Auto => Engine::Ed,
        }
    }
}

/// Failure recorded in place of a result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellError {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for CellError {
    fn from(e: &Error) -> Self {
        Self {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl CellError {
    fn to_field(&self) -> String {
        format!("{}: {}", self.kind, self.message)
    }

    fn from_field(s: &str) -> Self {
        match s.split_once(": ") {
            Some((kind, message)) => Self {
                kind: kind.into(),
                message: message.into(),
            },
            None => Self {
                kind: s.into(),
                message: String::new(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramCell {
    pub delta_t: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub signature: Option<PhaseSignature>,
    pub ground_xi: Option<f64>,
    pub ground_multiplicity: Option<usize>,
    pub splitting: Option<f64>,
    pub engine_used: Engine,
    pub error: Option<CellError>,
    /// Seconds spent on this cell. Kept out of the serialized forms so that
    /// they stay reproducible; see [`timing_table`].
    #[serde(skip)]
    pub wall_time: f64,
}

impl PhaseDiagramCell {
    fn failed(delta_t: f64, u: f64, engine: Engine, e: &Error) -> Self {
        Self {
            delta_t,
            u,
            signature: None,
            ground_xi: None,
            ground_multiplicity: None,
            splitting: None,
            engine_used: engine,
            error: Some(e.into()),
            wall_time: 0.0,
        }
    }

    pub fn tag(&self) -> Option<PhaseTag> {
        self.signature.map(|s| s.tag)
    }
}

fn spectrum_for(grid: &GridSpec, params: &ModelParams, engine: Engine) -> Result<EntanglementSpectrum> {
    let cut = CutSpec::new(grid.cut_len);
    match engine {
        Engine::Free => {
            Ok(freefermion::free_solution(params, cut, grid.max_levels, grid.xi_window)?.spectrum)
        }
        Engine::Ed => ed::ed_entanglement_spectrum(params, cut, &grid.ed),
    }
}

/// Free spectrum against ED, both taken down to [`COMPARE_FLOOR`].
pub fn audit_point(grid: &GridSpec, params: &ModelParams) -> Result<f64> {
    let cut = CutSpec::new(grid.cut_len);
    let free = freefermion::free_solution(params, cut, usize::MAX, f64::INFINITY)?.spectrum;
    let exact = ed::ed_entanglement_spectrum(params, cut, &grid.ed)?;
    match label_matched_deviation(&free, &exact, COMPARE_FLOOR) {
        Some(d) if d <= AUDIT_TOL => Ok(d),
        Some(d) => Err(Error::AuditMismatch { deviation: d }),
        None => Err(Error::AuditMismatch {
            deviation: f64::INFINITY,
        }),
    }
}

pub fn compute_cell(grid: &GridSpec, delta_t: f64, u: f64) -> PhaseDiagramCell {
    let start = Instant::now();
    let engine = grid.engine_for(u);
    let params = grid.params(delta_t, u);
    let rel_tol = match engine {
        Engine::Free => grid.free_rel_tol,
        Engine::Ed => grid.ed_rel_tol,
    };
    let outcome = spectrum_for(grid, &params, engine).and_then(|spec| {
        if grid.audit && u == 0.0 && grid.sites <= AUDIT_MAX_SITES && engine == Engine::Free {
            audit_point(grid, &params)?;
        }
        Ok(spec)
    });
    let mut cell = match outcome {
        Ok(spec) => {
            let groups = analysis::group_levels(&spec, rel_tol);
            let signature = analysis::classify(&groups);
            PhaseDiagramCell {
                delta_t,
                u,
                signature: Some(signature),
                ground_xi: spec.min_xi(),
                ground_multiplicity: Some(signature.ground_multiplicity),
                splitting: Some(signature.splitting),
                engine_used: engine,
                error: None,
                wall_time: 0.0,
            }
        }
        Err(e) => PhaseDiagramCell::failed(delta_t, u, engine, &e),
    };
    cell.wall_time = start.elapsed().as_secs_f64();
    cell
}

/// Workers used when none is given: `ESPEC_THREADS`, else the hardware count.
pub fn default_workers() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

pub fn sweep(grid: &GridSpec) -> Result<Vec<PhaseDiagramCell>> {
    sweep_with_workers(grid, default_workers())
}

/// Every grid point, in grid order, on a pool of `workers` threads.
///
/// Only an invalid grid is an error; failures at individual points are
/// stored in their cells.
pub fn sweep_with_workers(grid: &GridSpec, workers: usize) -> Result<Vec<PhaseDiagramCell>> {
    grid.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    let points = grid.points();
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|&(dt, u)| compute_cell(grid, dt, u))
            .collect()
    }))
}

/// Sweep output together with the grid that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub cells: Vec<PhaseDiagramCell>,
}

impl PhaseDiagram {
    pub fn new(grid: GridSpec, cells: Vec<PhaseDiagramCell>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            grid,
            cells,
        }
    }
}

/// Floats with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

/// One CSV row per cell under [`CSV_HEADER`].
pub fn diagram_to_table(cells: &[PhaseDiagramCell]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for c in cells {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            format_float(c.delta_t),
            format_float(c.u),
            opt(c.ground_multiplicity, |m| m.to_string()),
            opt(c.tag(), |t| t.to_string()),
            opt(c.ground_xi, format_float),
            opt(c.splitting, format_float),
            c.engine_used.as_str().to_string(),
            opt(c.error.as_ref(), CellError::to_field),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn field_error(row: usize, what: &str) -> Error {
    Error::InvalidParams(format!("row {row}: bad {what}"))
}

fn parse_opt<T: std::str::FromStr>(s: &str, row: usize, what: &str) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| field_error(row, what))
    }
}

/// Inverse of [`diagram_to_table`]. Wall times are not stored and come back as 0.
pub fn table_to_diagram(table: &str) -> Result<Vec<PhaseDiagramCell>> {
    let mut r = csv::Reader::from_reader(table.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::InvalidParams(format!("header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidParams("unexpected table header".into()));
    }
    let mut cells = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidParams(format!("row {row}: {e}")))?;
        let version: u32 = rec[0].parse().map_err(|_| field_error(row, "schema_version"))?;
        if version != SCHEMA_VERSION {
            return Err(Error::InvalidParams(format!(
                "row {row}: schema version {version} is not {SCHEMA_VERSION}"
            )));
        }
        let delta_t = rec[1].parse().map_err(|_| field_error(row, "delta_t"))?;
        let u = rec[2].parse().map_err(|_| field_error(row, "U"))?;
        let multiplicity: Option<usize> = parse_opt(&rec[3], row, "multiplicity")?;
        let tag: Option<PhaseTag> = parse_opt(&rec[4], row, "signature")?;
        let ground_xi = parse_opt(&rec[5], row, "ground_xi")?;
        let splitting: Option<f64> = parse_opt(&rec[6], row, "splitting")?;
        let engine = Engine::parse(&rec[7]).ok_or_else(|| field_error(row, "engine"))?;
        let error = (!rec[8].is_empty()).then(|| CellError::from_field(&rec[8]));
        let signature = match (tag, multiplicity, splitting) {
            (Some(tag), Some(ground_multiplicity), Some(splitting)) => Some(PhaseSignature {
                tag,
                ground_multiplicity,
                splitting,
            }),
            (None, _, _) => None,
            _ => return Err(field_error(row, "signature columns")),
        };
        cells.push(PhaseDiagramCell {
            delta_t,
            u,
            signature,
            ground_xi,
            ground_multiplicity: multiplicity,
            splitting,
            engine_used: engine,
            error,
            wall_time: 0.0,
        });
    }
    Ok(cells)
}

/// `delta_t,U,wall_time` per cell.
pub fn timing_table(cells: &[PhaseDiagramCell]) -> String {
    let mut out = String::from("delta_t,U,wall_time\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_float(c.delta_t),
            format_float(c.u),
            format_float(c.wall_time)
        );
    }
    out
}

/// Ground multiplicity as a gnuplot `matrix nonuniform` block: first row the
/// `δt` axis, then one row per `U`. Failed cells are `NaN`.
pub fn multiplicity_matrix(grid: &GridSpec, cells: &[PhaseDiagramCell]) -> String {
    let nu = grid.u_values.len();
    let mut out = String::new();
    let _ = write!(out, "{}", grid.delta_t_values.len());
    for &dt in &grid.delta_t_values {
        let _ = write!(out, " {}", format_float(dt));
    }
    out.push('\n');
    for (j, &u) in grid.u_values.iter().enumerate() {
        let _ = write!(out, "{}", format_float(u));
        for i in 0..grid.delta_t_values.len() {
            let m = cells
                .get(i * nu + j)
                .and_then(|c| c.ground_multiplicity)
                .map(|m| m.to_string())
                .unwrap_or_else(|| "NaN".into());
            let _ = write!(out, " {m}");
        }
        out.push('\n');
    }
    out
}
