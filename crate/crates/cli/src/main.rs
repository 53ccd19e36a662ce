mod config;
mod document;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use espec_core::analysis::{self, PhaseLabels};
use espec_core::ed::{self, EdOptions};
use espec_core::freefermion::{self, DEFAULT_MAX_LEVELS, DEFAULT_XI_WINDOW};
use espec_core::lanczos::LanczosOptions;
use espec_core::scan::{self, Engine, EngineChoice, GridSpec, PhaseDiagram};
use espec_core::{validation, CutSpec, EntanglementSpectrum, ModelParams};

use config::{parse_axis, FileConfig, Format};
use document::{Metadata, Settings, SpectrumDocument};

#[derive(Parser)]
#[command(name = "espec", version, about = "Entanglement spectra of the SSH-Hubbard ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free-fermion spectrum (U = 0)
    Free(FreeArgs),
    /// Exact-diagonalization spectrum
    Ed(EdArgs),
    /// Sweep a (dt, U) grid into a phase diagram
    Scan(ScanArgs),
    /// Run the built-in consistency checks
    Validate,
}

#[derive(Args)]
struct ModelArgs {
    /// Ring length
    #[arg(long = "L")]
    sites: Option<usize>,
    /// Subsystem length (defaults to L/2)
    #[arg(long = "LA")]
    cut_len: Option<usize>,
    /// Dimerization
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// On-site interaction
    #[arg(long = "U", allow_negative_numbers = true)]
    u: Option<f64>,
    /// Mean hopping
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Relative grouping tolerance on weights
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an (n_total, xi) plot table here, plus a gnuplot script next to it
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// TOML file with defaults for any of these flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FreeOpts {
    #[arg(long)]
    max_levels: Option<usize>,
    /// Keep levels with xi up to the lowest xi plus this
    #[arg(long)]
    xi_window: Option<f64>,
}

#[derive(Args)]
struct EdOpts {
    /// Seed of the Lanczos start vector
    #[arg(long)]
    seed: Option<u64>,
    /// Residual required of each eigenpair
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    max_basis: Option<usize>,
    #[arg(long)]
    sector_cap: Option<usize>,
    /// Drop reduced-density eigenvalues below this
    #[arg(long)]
    floor: Option<f64>,
    /// Check that the neighbouring (L/2 ± 1, L/2 ∓ 1) sectors lie higher
    #[arg(long)]
    audit_sectors: bool,
}

#[derive(Args)]
struct FreeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    free: FreeOpts,
}

#[derive(Args)]
struct EdArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    ed: EdOpts,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long = "L")]
    sites: Option<usize>,
    #[arg(long = "LA")]
    cut_len: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// dt axis: comma list or start:stop:count
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    /// U axis: comma list or start:stop:count
    #[arg(long = "U", allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Cross-check U = 0 points against ED (L <= 10)
    #[arg(long)]
    audit: bool,
    /// Worker threads (default: ESPEC_THREADS, else all cores)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    free_rel_tol: Option<f64>,
    #[arg(long)]
    ed_rel_tol: Option<f64>,
    /// Output directory (CSV to stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the multiplicity matrix for gnuplot
    #[arg(long)]
    matrix: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    free: FreeOpts,
    #[command(flatten)]
    ed: EdOpts,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum EngineArg {
    Auto,
    Free,
    Ed,
}

impl From<EngineArg> for EngineChoice {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Auto => EngineChoice::Auto,
            EngineArg::Free => EngineChoice::Free,
            EngineArg::Ed => EngineChoice::Ed,
        }
    }
}

enum Failure {
    Core(espec_core::Error),
    Validation,
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        use espec_core::Error as E;
        match self {
            Failure::Core(e) => match e {
                E::InvalidParams(_) | E::EngineMismatch { .. } => 2,
                E::NotConverged { .. } => 3,
                E::Gapless { .. } => 4,
                E::DegenerateGroundState { .. } => 5,
                E::SectorTooLarge { .. } => 6,
                _ => 1,
            },
            Failure::Validation => 1,
            Failure::Other(_) => 1,
        }
    }
}

impl From<espec_core::Error> for Failure {
    fn from(e: espec_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Core(espec_core::Error::InvalidParams(msg.into()))
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Free(args) => run_free(args),
        Command::Ed(args) => run_ed(args),
        Command::Scan(args) => run_scan(args),
        Command::Validate => run_validate(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Other(e) => eprintln!("error: {e:#}"),
                Failure::Validation => {}
            }
            ExitCode::from(f.code())
        }
    }
}

/// Model, cut and grouping tolerance after merging flags over the file.
struct Resolved {
    params: ModelParams,
    cut: CutSpec,
    rel_tol: f64,
    format: Format,
    labels: PhaseLabels,
}

fn resolve(m: &ModelArgs, file: &FileConfig, default_tol: f64) -> CliResult<Resolved> {
    let sites = m.sites.or(file.sites).ok_or_else(|| invalid("--L is required"))?;
    let dt = match m.dt {
        Some(v) => v,
        None => FileConfig::single(&file.dt, "dt")?.ok_or_else(|| invalid("--dt is required"))?,
    };
    let u = match m.u {
        Some(v) => v,
        None => FileConfig::single(&file.u, "U")?.unwrap_or(0.0),
    };
    let t = m.t.or(file.t).unwrap_or(1.0);
    let params = ModelParams::new(sites, t, dt, u).validate()?;
    let cut = match m.cut_len.or(file.cut_len) {
        Some(la) => CutSpec::new(la),
        None => CutSpec::half(&params),
    }
    .validate(sites)?;
    let rel_tol = m.rel_tol.or(file.rel_tol).unwrap_or(default_tol);
    if !(rel_tol.is_finite() && rel_tol >= 0.0) {
        return Err(invalid("--rel-tol must be finite and >= 0"));
    }
    Ok(Resolved {
        params,
        cut,
        rel_tol,
        format: m.format.or(file.format).unwrap_or_default(),
        labels: file.phase_labels.clone().unwrap_or_default(),
    })
}

fn free_options(o: &FreeOpts, file: &FileConfig) -> CliResult<(usize, f64)> {
    let max_levels = o.max_levels.or(file.max_levels).unwrap_or(DEFAULT_MAX_LEVELS);
    let xi_window = o.xi_window.or(file.xi_window).unwrap_or(DEFAULT_XI_WINDOW);
    if max_levels == 0 || !(xi_window >= 0.0) {
        return Err(invalid("--max-levels must be positive and --xi-window >= 0"));
    }
    Ok((max_levels, xi_window))
}

fn ed_options(o: &EdOpts, file: &FileConfig) -> EdOptions {
    let d = EdOptions::default();
    let l = LanczosOptions::default();
    EdOptions {
        lanczos: LanczosOptions {
            max_iter: o.max_iter.or(file.max_iter).unwrap_or(l.max_iter),
            tol: o.tol.or(file.tol).unwrap_or(l.tol),
            seed: o.seed.or(file.seed).unwrap_or(l.seed),
            max_basis: o.max_basis.or(file.max_basis).unwrap_or(l.max_basis),
            symmetry_probes: l.symmetry_probes,
        },
        sector_cap: o.sector_cap.or(file.sector_cap).unwrap_or(d.sector_cap),
        floor: o.floor.or(file.floor).unwrap_or(d.floor),
        audit_sectors: o.audit_sectors || file.audit_sectors.unwrap_or(false),
    }
}

struct EngineRun {
    spectrum: EntanglementSpectrum,
    seed: Option<u64>,
    iterations: Option<usize>,
    residual: Option<f64>,
    gap: Option<f64>,
    energies: Option<[f64; 2]>,
}

fn build_document(r: &Resolved, engine: Engine, run: EngineRun, settings: Settings, wall_time: f64) -> SpectrumDocument {
    let groups = analysis::group_levels(&run.spectrum, r.rel_tol);
    let signature = analysis::classify(&groups);
    let distribution = groups.first().map(analysis::distribution).unwrap_or_default();
    SpectrumDocument {
        metadata: Metadata {
            engine,
            version: env!("CARGO_PKG_VERSION").to_string(),
            params: r.params,
            cut: r.cut,
            seed: run.seed,
            wall_time,
            iterations: run.iterations,
            residual: run.residual,
            gap: run.gap,
            energies: run.energies,
            complete: run.spectrum.complete,
            settings,
        },
        levels: run.spectrum.levels,
        groups,
        distribution,
        signature,
        phase: r.labels.label(signature.tag).map(str::to_string),
    }
}

fn write_document(doc: &SpectrumDocument, m: &ModelArgs, format: Format) -> CliResult<()> {
    let body = match format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.levels_csv(),
    };
    output::emit(m.out.as_deref(), &body)?;
    if let Some(plot) = &m.plot {
        output::write_atomic(plot, doc.plot_table().as_bytes())?;
        let script = plot.with_extension("gp");
        let name = plot.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let title = format!(
            "L={} L_A={} dt={} U={}",
            doc.metadata.params.sites, doc.metadata.cut.len, doc.metadata.params.delta_t, doc.metadata.params.u
        );
        output::write_atomic(&script, document::gnuplot_script(&name, &title).as_bytes())?;
    }
    Ok(())
}

fn run_free(args: FreeArgs) -> CliResult<()> {
    let file = FileConfig::load(args.model.config.as_deref())?;
    let r = resolve(&args.model, &file, analysis::FREE_REL_TOL)?;
    let (max_levels, xi_window) = free_options(&args.free, &file)?;
    let start = Instant::now();
    let sol = freefermion::free_solution(&r.params, r.cut, max_levels, xi_window)?;
    let run = EngineRun {
        spectrum: sol.spectrum,
        seed: None,
        iterations: None,
        residual: None,
        gap: None,
        energies: None,
    };
    let settings = Settings {
        rel_tol: r.rel_tol,
        max_levels: Some(max_levels),
        xi_window: Some(xi_window),
        ed: None,
        phase_labels: r.labels.clone(),
    };
    let doc = build_document(&r, Engine::Free, run, settings, start.elapsed().as_secs_f64());
    write_document(&doc, &args.model, r.format)
}

fn run_ed(args: EdArgs) -> CliResult<()> {
    let file = FileConfig::load(args.model.config.as_deref())?;
    let r = resolve(&args.model, &file, analysis::ED_REL_TOL)?;
    let opts = ed_options(&args.ed, &file);
    let start = Instant::now();
    let sol = ed::ed_solution(&r.params, r.cut, &opts)?;
    let run = EngineRun {
        spectrum: sol.spectrum,
        seed: Some(opts.lanczos.seed),
        iterations: Some(sol.ground.iterations),
        residual: Some(sol.ground.residual),
        gap: Some(sol.ground.gap),
        energies: Some(sol.ground.energies),
    };
    let settings = Settings {
        rel_tol: r.rel_tol,
        max_levels: None,
        xi_window: None,
        ed: Some(opts),
        phase_labels: r.labels.clone(),
    };
    let doc = build_document(&r, Engine::Ed, run, settings, start.elapsed().as_secs_f64());
    write_document(&doc, &args.model, r.format)
}

fn axis(flag: &Option<String>, file: &Option<config::AxisValue>, name: &str) -> CliResult<Vec<f64>> {
    match (flag, file) {
        (Some(s), _) => Ok(parse_axis(s)?),
        (None, Some(a)) => Ok(a.values()?),
        (None, None) => Err(invalid(format!("--{name} is required"))),
    }
}

fn grid_from(args: &ScanArgs, file: &FileConfig) -> CliResult<GridSpec> {
    let sites = args.sites.or(file.sites).ok_or_else(|| invalid("--L is required"))?;
    let cut_len = args.cut_len.or(file.cut_len).unwrap_or(sites / 2);
    let mut grid = GridSpec::new(sites, cut_len, axis(&args.dt, &file.dt, "dt")?, axis(&args.u, &file.u, "U")?);
    grid.t = args.t.or(file.t).unwrap_or(1.0);
    grid.engine = args.engine.map(EngineChoice::from).or(file.engine).unwrap_or_default();
    grid.audit = args.audit || file.audit.unwrap_or(false);
    grid.free_rel_tol = args.free_rel_tol.or(file.free_rel_tol).unwrap_or(analysis::FREE_REL_TOL);
    grid.ed_rel_tol = args.ed_rel_tol.or(file.ed_rel_tol).unwrap_or(analysis::ED_REL_TOL);
    let (max_levels, xi_window) = free_options(&args.free, file)?;
    grid.max_levels = max_levels;
    grid.xi_window = xi_window;
    grid.ed = ed_options(&args.ed, file);
    grid.validate()?;
    Ok(grid)
}

fn run_scan(args: ScanArgs) -> CliResult<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let grid = grid_from(&args, &file)?;
    let workers = args.workers.or(file.workers).unwrap_or_else(scan::default_workers);
    if workers == 0 {
        return Err(invalid("--workers must be positive"));
    }
    let cells = scan::sweep_with_workers(&grid, workers)?;
    let table = scan::diagram_to_table(&cells);
    let Some(dir) = &args.out else {
        output::emit(None, &table)?;
        return Ok(());
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let timing = scan::timing_table(&cells);
    let matrix = scan::multiplicity_matrix(&grid, &cells);
    let mut json = serde_json::to_string_pretty(&PhaseDiagram::new(grid, cells))
        .map_err(|e| anyhow!("serializing the phase diagram: {e}"))?;
    json.push('\n');
    let put = |name: &str, body: &str| output::write_atomic(&dir.join(name), body.as_bytes());
    put("phase_diagram.csv", &table)?;
    put("phase_diagram.json", &json)?;
    put("timing.csv", &timing)?;
    if args.matrix {
        put("multiplicity.dat", &matrix)?;
    }
    Ok(())
}

fn run_validate() -> CliResult<()> {
    let report = validation::run_validation();
    let width = report.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &report {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        println!("{mark}  {:width$}  {}", r.name, r.detail);
    }
    let failed = report.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", report.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}
