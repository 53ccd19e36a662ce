//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::LN_2;
use std::time::Instant;

use espec_core::analysis::{group_levels, PhaseTag, ED_REL_TOL, FREE_REL_TOL};
use espec_core::ed::dense::{dense_eigen, dense_entanglement_spectrum, dense_hamiltonian};
use espec_core::ed::{self, build_sector_basis, EdOptions, EdSolution};
use espec_core::freefermion::{free_solution, DEFAULT_MAX_LEVELS, DEFAULT_XI_WINDOW};
use espec_core::scan::{diagram_to_table, sweep_with_workers, GridSpec, PhaseDiagram};
use espec_core::{BoundaryCondition, CutSpec, EntanglementSpectrum, EsLevel, ModelParams};
use nalgebra::DMatrix;

const FREE_BUDGET: f64 = 2.0;
const ENGINE_TOL: f64 = 1e-9;
const MATCH_FLOOR: f64 = 1e-12;
const DIMER_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const DENSE_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
const COMPLEMENT_TOL: f64 = 1e-10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Solutions shared between criteria, keyed by `(L, L_A, δt, U)`.
#[derive(Default)]
struct Cache {
    ed: HashMap<(usize, usize, u64, u64), (EdSolution, f64)>,
}

impl Cache {
    fn ed(&mut self, sites: usize, la: usize, dt: f64, u: f64) -> &(EdSolution, f64) {
        self.ed
            .entry((sites, la, dt.to_bits(), u.to_bits()))
            .or_insert_with(|| {
                let start = Instant::now();
                let s = ed::ed_solution(
                    &ModelParams::unit_hopping(sites, dt, u),
                    CutSpec::new(la),
                    &EdOptions::default(),
                )
                .unwrap_or_else(|e| panic!("ED at L={sites}, dt={dt}, U={u}: {e}"));
                (s, start.elapsed().as_secs_f64())
            })
    }
}

/// Weights per `(n_up, n_down)` label, descending.
fn by_label(spec: &EntanglementSpectrum) -> BTreeMap<(usize, usize), Vec<f64>> {
    let mut m: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for l in &spec.levels {
        m.entry(l.labels()).or_default().push(l.weight);
    }
    for v in m.values_mut() {
        v.sort_by(|a, b| b.total_cmp(a));
    }
    m
}

/// Largest weight difference over label-matched levels, counting a level that
/// is missing on one side as weight zero. Pairs where both weights lie below
/// `floor` are ignored.
fn matched_deviation(a: &EntanglementSpectrum, b: &EntanglementSpectrum, floor: f64) -> f64 {
    let (ma, mb) = (by_label(a), by_label(b));
    let mut worst = 0.0f64;
    let keys: BTreeSet<_> = ma.keys().chain(mb.keys()).copied().collect();
    for k in keys {
        let (va, vb) = (ma.get(&k).cloned().unwrap_or_default(), mb.get(&k).cloned().unwrap_or_default());
        for i in 0..va.len().max(vb.len()) {
            let (x, y) = (va.get(i).copied().unwrap_or(0.0), vb.get(i).copied().unwrap_or(0.0));
            if x > floor || y > floor {
                worst = worst.max((x - y).abs());
            }
        }
    }
    worst
}

fn relabel_down_holes(spec: &EntanglementSpectrum, la: usize) -> EntanglementSpectrum {
    let levels = spec
        .levels
        .iter()
        .map(|l| EsLevel::from_weight(l.weight, l.n_up, la - l.n_down))
        .collect();
    EntanglementSpectrum::new(levels, spec.complete)
}

fn free_multiplicity(sites: usize, la: usize, dt: f64) -> (usize, f64, f64) {
    let start = Instant::now();
    let params = ModelParams::unit_hopping(sites, dt, 0.0);
    let s = free_solution(&params, CutSpec::new(la), DEFAULT_MAX_LEVELS, DEFAULT_XI_WINDOW)
        .expect("free spectrum")
        .spectrum;
    let groups = group_levels(&s, FREE_REL_TOL);
    let secs = start.elapsed().as_secs_f64();
    (groups[0].multiplicity, groups[0].splitting() / groups[0].members[0].weight, secs)
}

fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (dt, expect) in [(0.2, 1), (0.4, 1), (-0.2, 16), (-0.4, 16)] {
        let (m, split, secs) = free_multiplicity(200, 100, dt);
        ok &= m == expect && secs < FREE_BUDGET;
        parts.push(format!("dt={dt}: {m} (want {expect}, rel split {split:.1e}, {secs:.3}s)"));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_2() -> Outcome {
    let (m, split, secs) = free_multiplicity(200, 50, -0.2);
    outcome(
        m == 16 && secs < FREE_BUDGET,
        format!("L_A=50, dt=-0.2: {m} (want 16, rel split of lowest group {split:.1e} at rel_tol {FREE_REL_TOL:.0e}, {secs:.3}s)"),
    )
}

fn criterion_3() -> Outcome {
    let cut = CutSpec::new(4);
    let full = |dt: f64| {
        free_solution(&ModelParams::unit_hopping(8, dt, 0.0), cut, usize::MAX, f64::INFINITY)
            .expect("free spectrum")
            .spectrum
    };
    let topo = full(-1.0);
    let target = 4.0 * LN_2;
    let topo_dev = topo.levels.iter().map(|l| (l.xi - target).abs()).fold(0.0, f64::max);
    let trivial = full(1.0);
    let ok = topo.levels.len() == 16
        && topo_dev <= DIMER_TOL
        && trivial.levels.len() == 1
        && trivial.levels[0].xi.abs() <= DIMER_TOL;
    outcome(
        ok,
        format!(
            "dt=-1: {} levels, max |xi - 4 ln 2| = {topo_dev:.1e}; dt=+1: {} level(s), xi = {:.1e}",
            topo.levels.len(),
            trivial.levels.len(),
            trivial.levels.first().map_or(f64::NAN, |l| l.xi)
        ),
    )
}

fn criterion_4(cache: &mut Cache) -> Outcome {
    let params = ModelParams::unit_hopping(8, -0.4, 0.0);
    let free = free_solution(&params, CutSpec::new(4), usize::MAX, f64::INFINITY)
        .expect("free spectrum")
        .spectrum;
    let (exact, secs) = cache.ed(8, 4, -0.4, 0.0);
    let dev = matched_deviation(&free, &exact.spectrum, MATCH_FLOOR);
    outcome(
        dev <= ENGINE_TOL && *secs < 30.0,
        format!("max label-matched deviation {dev:.1e} over lambda > {MATCH_FLOOR:.0e}; ED {secs:.2}s"),
    )
}

fn cut_for(sites: usize) -> usize {
    let half = sites / 2;
    if half % 2 == 0 {
        half
    } else {
        half - 1
    }
}

fn criterion_5(cache: &mut Cache) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (sites, budget) in [(8usize, 60.0), (10, 600.0), (12, 3600.0)] {
        let la = cut_for(sites);
        let mut tier_secs = 0.0;
        for (dt, u, expect) in [(-0.4, -3.0, 4usize), (-0.4, 3.0, 4), (0.4, -3.0, 1), (0.4, 3.0, 1)] {
            let (s, secs) = cache.ed(sites, la, dt, u);
            tier_secs += secs;
            let groups = group_levels(&s.spectrum, ED_REL_TOL);
            let m = groups[0].multiplicity;
            let w = &s.spectrum.levels;
            let quad = (w[0].weight - w[3].weight) / w[0].weight;
            ok &= m == expect;
            parts.push(format!(
                "L={sites} dt={dt} U={u}: {m} (want {expect}, (l0-l3)/l0 {quad:.2e}, (l0-l1)/l0 {:.2e})",
                (w[0].weight - w[1].weight) / w[0].weight
            ));
        }
        ok &= tier_secs < budget;
        parts.push(format!("L={sites} tier {tier_secs:.1}s"));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_6(cache: &mut Cache) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (u, allowed) in [(-3.0, [(0i64, 0i64), (1, 1), (-1, -1)]), (3.0, [(0, 0), (1, -1), (-1, 1)])] {
        let (s, _) = cache.ed(8, 4, -0.4, u);
        let quad: Vec<EsLevel> = s.spectrum.levels[..4].to_vec();
        let mut offsets = BTreeSet::new();
        for a in &quad {
            for b in &quad {
                offsets.insert((a.n_up as i64 - b.n_up as i64, a.n_down as i64 - b.n_down as i64));
            }
        }
        let good = offsets.iter().all(|o| allowed.contains(o));
        ok &= good;
        let labels: Vec<(usize, usize)> = quad.iter().map(|l| l.labels()).collect();
        let rel_split = (quad[0].weight - quad[3].weight) / quad[0].weight;
        let at_tol = group_levels(&s.spectrum, ED_REL_TOL)[0].multiplicity;
        parts.push(format!(
            "U={u}: labels {labels:?}, offsets {offsets:?}, rel split {rel_split:.2e}, multiplicity at {ED_REL_TOL:.0e} is {at_tol}"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_7(cache: &mut Cache) -> Outcome {
    let mut worst = 0.0f64;
    for dt in [-0.4, 0.4] {
        let a = cache.ed(8, 4, dt, 3.0).0.spectrum.clone();
        let b = cache.ed(8, 4, dt, -3.0).0.spectrum.clone();
        worst = worst.max(matched_deviation(&a, &relabel_down_holes(&b, 4), MATCH_FLOOR));
    }
    outcome(worst <= ENGINE_TOL, format!("max deviation after relabeling {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let grid = GridSpec::new(8, 4, vec![-0.4, 0.4], vec![-3.0, 0.0, 3.0]);
    let render = |workers: usize| {
        let cells = sweep_with_workers(&grid, workers).expect("sweep");
        let table = diagram_to_table(&cells);
        let json = serde_json::to_string(&PhaseDiagram::new(grid.clone(), cells.clone())).unwrap();
        (cells, table, json)
    };
    let (cells, t1, j1) = render(1);
    let (_, t1b, j1b) = render(1);
    let (_, t4, j4) = render(4);
    let identical = t1 == t1b && t1 == t4 && j1 == j1b && j1 == j4;
    let mut ok = identical;
    let mut parts = vec![format!("byte-identical across reruns and 1/4 workers: {identical}")];
    for c in &cells {
        let want = if c.delta_t > 0.0 {
            PhaseTag::NonDegenerate
        } else if c.u == 0.0 {
            PhaseTag::Sixteenfold
        } else if c.u < 0.0 {
            PhaseTag::FourfoldDiagonal
        } else {
            PhaseTag::FourfoldAntidiagonal
        };
        let got = c.tag();
        ok &= got == Some(want);
        parts.push(format!(
            "({}, {}): {} (want {want})",
            c.delta_t,
            c.u,
            got.map_or_else(|| format!("{:?}", c.error), |t| t.to_string())
        ));
    }
    outcome(ok, parts.join("; "))
}

/// Complement-side spectrum built straight from the amplitudes: for every
/// block, `ρ_B = Mᵀ M` with `M[a][b]` the amplitude of A configuration `a`
/// and B configuration `b`. Labels are returned on the A side.
fn complement_spectrum(sites: usize, la: usize, psi: &[f64]) -> EntanglementSpectrum {
    let basis = build_sector_basis(sites, sites / 2, sites / 2).unwrap();
    let mask = (1u64 << la) - 1;
    type Block = (HashMap<(u64, u64), usize>, HashMap<(u64, u64), usize>, Vec<(usize, usize, f64)>);
    let mut blocks: BTreeMap<(usize, usize), Block> = BTreeMap::new();
    for (k, (u, d)) in basis.states().enumerate() {
        let key = ((u & mask).count_ones() as usize, (d & mask).count_ones() as usize);
        let (rows, cols, entries) = blocks.entry(key).or_default();
        let n = rows.len();
        let r = *rows.entry((u & mask, d & mask)).or_insert(n);
        let n = cols.len();
        let c = *cols.entry((u >> la, d >> la)).or_insert(n);
        entries.push((r, c, psi[k]));
    }
    let mut levels = Vec::new();
    for (key, (rows, cols, entries)) in blocks {
        let mut m = DMatrix::<f64>::zeros(rows.len(), cols.len());
        for (r, c, a) in entries {
            m[(r, c)] = a;
        }
        let rho_b = m.transpose() * &m;
        for lambda in nalgebra::SymmetricEigen::new(rho_b).eigenvalues.iter() {
            if *lambda > MATCH_FLOOR {
                levels.push(EsLevel::from_weight(*lambda, key.0, key.1));
            }
        }
    }
    EntanglementSpectrum::new(levels, true)
}

fn criterion_9(cache: &mut Cache) -> Outcome {
    let mut parts = Vec::new();

    let mut trace_dev = 0.0f64;
    let mut residual = 0.0f64;
    let mut count = 0;
    for (s, _) in cache.ed.values() {
        trace_dev = trace_dev.max((s.spectrum.total_weight() - 1.0).abs());
        residual = residual.max(s.ground.residual);
        count += 1;
    }
    for dt in [-1.0, -0.4, 0.4, 1.0] {
        let s = free_solution(&ModelParams::unit_hopping(8, dt, 0.0), CutSpec::new(4), usize::MAX, f64::INFINITY)
            .expect("free spectrum")
            .spectrum;
        assert!(s.complete);
        trace_dev = trace_dev.max((s.total_weight() - 1.0).abs());
        count += 1;
    }
    let trace_ok = trace_dev <= TRACE_TOL;
    let residual_ok = residual < RESIDUAL_TOL;
    parts.push(format!("trace over {count} complete spectra {trace_dev:.1e}"));
    parts.push(format!("largest Lanczos residual {residual:.1e}"));

    let mut complement = 0.0f64;
    let keys: Vec<_> = cache.ed.keys().copied().filter(|k| k.0 <= 12).collect();
    for key in keys {
        let (s, _) = &cache.ed[&key];
        let b = complement_spectrum(key.0, key.1, &s.ground.vector.0);
        complement = complement.max(matched_deviation(&s.spectrum, &b, MATCH_FLOOR));
    }
    let complement_ok = complement <= COMPLEMENT_TOL;
    parts.push(format!("A/B complement deviation {complement:.1e}"));

    let mut dense = 0.0f64;
    for (dt, u) in [(-0.4, 3.0), (-0.4, -3.0), (0.4, 3.0), (0.3, -2.0)] {
        let params = ModelParams::unit_hopping(4, dt, u);
        let (states, h) = dense_hamiltonian(&params, BoundaryCondition::Pbc, 2, 2);
        assert_eq!(h.nrows(), 36);
        let (vals, vecs) = dense_eigen(&h);
        let s = ed::ed_solution(&params, CutSpec::new(2), &EdOptions::default()).expect("ED at L=4");
        dense = dense
            .max((s.ground.energies[0] - vals[0]).abs())
            .max((s.ground.energies[1] - vals[1]).abs());
        let psi: Vec<f64> = vecs.column(0).iter().copied().collect();
        let oracle = dense_entanglement_spectrum(&states, &psi, 4, 2, ed::rdm::DEFAULT_FLOOR);
        dense = dense.max(matched_deviation(&s.spectrum, &oracle, MATCH_FLOOR));
    }
    let dense_ok = dense <= DENSE_TOL;
    parts.push(format!("dense 36x36 deviation {dense:.1e}"));

    outcome(trace_ok && residual_ok && complement_ok && dense_ok, parts.join("; "))
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut cache = Cache::default();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "free engine at L=200", criterion_1()),
        (2, "cut-ratio robustness", criterion_2()),
        (3, "dimerized limits", criterion_3()),
        (4, "engines agree at U=0", criterion_4(&mut cache)),
        (5, "interacting ground multiplicities", criterion_5(&mut cache)),
        (6, "quadruplet label offsets", criterion_6(&mut cache)),
        (7, "particle-hole map", criterion_7(&mut cache)),
        (8, "phase-diagram sweep", criterion_8()),
        (9, "property suites", criterion_9(&mut cache)),
    ];
    let mut failed = 0;
    for (n, name, o) in &results {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {n} ({name}): {}", o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
