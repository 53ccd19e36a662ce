//! Built-in self checks against closed forms and the dense reference.

use std::f64::consts::LN_2;

use crate::ed::dense::{dense_eigen, dense_entanglement_spectrum, dense_hamiltonian};
use crate::ed::{self, fermionic_sign, EdOptions, SectorHamiltonian, SignRule};
use crate::error::Result;
use crate::freefermion;
use crate::lanczos::{lanczos_lowest, symmetry_deviation, LanczosOptions};
use crate::model::{BoundaryCondition, CutSpec, ModelParams};
use crate::spectrum::{label_matched_deviation, EntanglementSpectrum, EsLevel};

pub const DIMER_TOL: f64 = 1e-12;
pub const DENSE_TOL: f64 = 1e-12;
pub const ENGINE_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-10;
const FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from_deviation(name: &'static str, deviation: Result<f64>, tol: f64) -> Self {
        match deviation {
            Ok(d) => Self {
                name,
                passed: d <= tol,
                detail: format!("deviation {d:.3e} (tolerance {tol:.0e})"),
            },
            Err(e) => Self {
                name,
                passed: false,
                detail: e.to_string(),
            },
        }
    }
}

/// `n_down → L_A - n_down` on every level.
pub fn particle_hole_relabel(spec: &EntanglementSpectrum, la: usize) -> EntanglementSpectrum {
    let levels = spec
        .levels
        .iter()
        .map(|l| EsLevel {
            n_down: la - l.n_down,
            ..*l
        })
        .collect();
    EntanglementSpectrum::new(levels, spec.complete)
}

fn matched(a: &EntanglementSpectrum, b: &EntanglementSpectrum) -> f64 {
    label_matched_deviation(a, b, FLOOR).unwrap_or(f64::INFINITY)
}

fn dimerized(sign: f64) -> Result<f64> {
    let params = ModelParams::unit_hopping(8, sign, 0.0);
    let spec = freefermion::free_entanglement_spectrum(&params, CutSpec::new(4), 256)?;
    let (count, xi) = if sign < 0.0 { (16, 4.0 * LN_2) } else { (1, 0.0) };
    let ground: Vec<&EsLevel> = spec
        .levels
        .iter()
        .filter(|l| (l.xi - xi).abs() <= 1e-6)
        .collect();
    if ground.len() != count || spec.levels[0].xi < xi - 1e-6 {
        return Ok(f64::INFINITY);
    }
    Ok(ground.iter().map(|l| (l.xi - xi).abs()).fold(0.0, f64::max))
}

/// Lanczos energies and spectrum against the full 36-state sector at `L = 4`.
pub fn dense_oracle_deviation(sign: SignRule) -> Result<f64> {
    let mut worst = 0.0f64;
    for (dt, u) in [(-0.4, 3.0), (0.3, -2.0), (-0.7, 0.0)] {
        let params = ModelParams::unit_hopping(4, dt, u);
        let (states, h) = dense_hamiltonian(&params, BoundaryCondition::Pbc, 2, 2);
        let (vals, vecs) = dense_eigen(&h);
        let solution = ed::ed_solution_with_sign(&params, CutSpec::new(2), &EdOptions::default(), sign)?;
        worst = worst
            .max((solution.ground.energies[0] - vals[0]).abs())
            .max((solution.ground.energies[1] - vals[1]).abs());
        let psi: Vec<f64> = vecs.column(0).iter().copied().collect();
        let oracle = dense_entanglement_spectrum(&states, &psi, 4, 2, ed::rdm::DEFAULT_FLOOR);
        worst = worst.max(matched(&solution.spectrum, &oracle));
    }
    Ok(worst)
}

fn cross_engine() -> Result<f64> {
    let params = ModelParams::unit_hopping(8, -0.4, 0.0);
    let cut = CutSpec::new(4);
    let free = freefermion::free_solution(&params, cut, usize::MAX, f64::INFINITY)?.spectrum;
    let exact = ed::ed_entanglement_spectrum(&params, cut, &EdOptions::default())?;
    Ok(matched(&free, &exact))
}

fn particle_hole(sign: SignRule) -> Result<f64> {
    let cut = CutSpec::new(4);
    let opts = EdOptions::default();
    let mut worst = 0.0f64;
    for dt in [-0.4, 0.4] {
        let a = ed::ed_solution_with_sign(&ModelParams::unit_hopping(8, dt, 3.0), cut, &opts, sign)?;
        let b = ed::ed_solution_with_sign(&ModelParams::unit_hopping(8, dt, -3.0), cut, &opts, sign)?;
        worst = worst.max(matched(&a.spectrum, &particle_hole_relabel(&b.spectrum, cut.len)));
    }
    Ok(worst)
}

fn hubbard_dimer(sign: SignRule) -> Result<f64> {
    let (u, tau) = (3.0f64, 1.2f64);
    let params = ModelParams::new(2, 1.0, tau - 1.0, u);
    let basis = ed::build_sector_basis(2, 1, 1)?;
    let h = SectorHamiltonian::with_sign_rule(&basis, &params, BoundaryCondition::Obc, sign);
    let pairs = lanczos_lowest(&h, 1, &LanczosOptions::default())?;
    let exact = u / 2.0 - (u * u / 4.0 + 4.0 * tau * tau).sqrt();
    Ok((pairs.values[0] - exact).abs())
}

fn symmetry(sign: SignRule) -> Result<f64> {
    let params = ModelParams::unit_hopping(8, -0.4, 3.0);
    let basis = ed::build_sector_basis(8, 4, 4)?;
    let h = SectorHamiltonian::with_sign_rule(&basis, &params, BoundaryCondition::Pbc, sign);
    Ok(symmetry_deviation(&h, 20, 0x5eed))
}

fn trace(sign: SignRule) -> Result<f64> {
    let params = ModelParams::unit_hopping(8, -0.4, -3.0);
    let s = ed::ed_solution_with_sign(&params, CutSpec::new(4), &EdOptions::default(), sign)?;
    Ok((s.spectrum.total_weight() - 1.0).abs())
}

pub fn run_validation() -> Vec<CheckResult> {
    run_validation_with_sign(fermionic_sign)
}

/// All checks, with ED built on `sign`.
pub fn run_validation_with_sign(sign: SignRule) -> Vec<CheckResult> {
    vec![
        CheckResult::from_deviation("dimerized_topological", dimerized(-1.0), DIMER_TOL),
        CheckResult::from_deviation("dimerized_trivial", dimerized(1.0), DIMER_TOL),
        CheckResult::from_deviation("dense_oracle_l4", dense_oracle_deviation(sign), DENSE_TOL),
        CheckResult::from_deviation("hubbard_dimer", hubbard_dimer(sign), DENSE_TOL),
        CheckResult::from_deviation("cross_engine_l8", cross_engine(), ENGINE_TOL),
        CheckResult::from_deviation("particle_hole_l8", particle_hole(sign), ENGINE_TOL),
        CheckResult::from_deviation("symmetry_probe", symmetry(sign), 1e-10),
        CheckResult::from_deviation("trace_normalization", trace(sign), TRACE_TOL),
    ]
}
