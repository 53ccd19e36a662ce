//! Exact diagonalization of the SSH-Hubbard ring in the half-filled sector.

pub mod basis;
pub mod dense;
pub mod hamiltonian;
pub mod rdm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lanczos::{lanczos_lowest, LanczosOptions};
use crate::model::{BoundaryCondition, CutSpec, ModelParams};
use crate::spectrum::EntanglementSpectrum;

pub use basis::{build_sector_basis, SectorBasis, DEFAULT_SECTOR_CAP};
pub use hamiltonian::{fermionic_sign, hamiltonian_apply, SectorHamiltonian, SignRule, StateVector};
pub use rdm::{block_spectrum, reduced_density_blocks, BlockSpectrum, RdmBlock};

/// Ground states closer than this to the first excitation are rejected.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdOptions {
    pub lanczos: LanczosOptions,
    pub sector_cap: usize,
    /// Reduced-density eigenvalues below this are dropped.
    pub floor: f64,
    /// Also solve the `(L/2 ± 1, L/2 ∓ 1)` sectors and fail if either lies lower.
    pub audit_sectors: bool,
}

impl Default for EdOptions {
    fn default() -> Self {
        Self {
            lanczos: LanczosOptions::default(),
            sector_cap: DEFAULT_SECTOR_CAP,
            floor: rdm::DEFAULT_FLOOR,
            audit_sectors: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateResult {
    /// `[E₀, E₁]`, ascending.
    pub energies: [f64; 2],
    pub vector: StateVector,
    /// Largest explicit residual of the two eigenpairs.
    pub residual: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Two lowest eigenpairs of the ring in the `(n_up, n_down)` sector.
pub fn sector_ground_state(
    params: &ModelParams,
    n_up: usize,
    n_down: usize,
    opts: &EdOptions,
) -> Result<(SectorBasis, GroundStateResult)> {
    sector_ground_state_with_sign(params, n_up, n_down, opts, fermionic_sign)
}

/// [`sector_ground_state`] with a replacement hopping sign rule.
pub fn sector_ground_state_with_sign(
    params: &ModelParams,
    n_up: usize,
    n_down: usize,
    opts: &EdOptions,
    sign: SignRule,
) -> Result<(SectorBasis, GroundStateResult)> {
    let basis = SectorBasis::with_cap(params.sites, n_up, n_down, opts.sector_cap)?;
    let h = SectorHamiltonian::with_sign_rule(&basis, params, BoundaryCondition::Pbc, sign);
    let k = basis.len().min(2);
    let pairs = lanczos_lowest(&h, k, &opts.lanczos)?;
    let e0 = pairs.values[0];
    let e1 = pairs.values.get(1).copied().unwrap_or(f64::INFINITY);
    let residual = pairs.residuals.iter().fold(0.0f64, |a, &b| a.max(b));
    let vector = StateVector(pairs.vectors.into_iter().next().expect("k >= 1"));
    drop(h);
    Ok((
        basis,
        GroundStateResult {
            energies: [e0, e1],
            vector,
            residual,
            gap: e1 - e0,
            iterations: pairs.iterations,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdSolution {
    pub spectrum: EntanglementSpectrum,
    pub ground: GroundStateResult,
    /// Reduced-density eigenvalues dropped below the floor.
    pub floored: usize,
}

/// Half-filled ring ground state, cut to sites `1..=L_A`.
pub fn ed_solution(params: &ModelParams, cut: CutSpec, opts: &EdOptions) -> Result<EdSolution> {
    ed_solution_with_sign(params, cut, opts, fermionic_sign)
}

pub fn ed_solution_with_sign(
    params: &ModelParams,
    cut: CutSpec,
    opts: &EdOptions,
    sign: SignRule,
) -> Result<EdSolution> {
    let params = params.validate()?;
    let cut = cut.validate(params.sites)?;
    let half = params.sites / 2;
    let (basis, ground) = sector_ground_state_with_sign(&params, half, half, opts, sign)?;
    if ground.gap < DEGENERACY_GAP {
        return Err(Error::DegenerateGroundState { gap: ground.gap });
    }
    if opts.audit_sectors {
        for (nu, nd) in [(half + 1, half - 1), (half - 1, half + 1)] {
            let (_, other) = sector_ground_state_with_sign(&params, nu, nd, opts, sign)?;
            if other.energies[0] < ground.energies[0] - DEGENERACY_GAP {
                return Err(Error::GroundStateSector {
                    n_up: nu,
                    n_down: nd,
                    energy: other.energies[0],
                    reference: ground.energies[0],
                });
            }
        }
    }
    let blocks = reduced_density_blocks(&ground.vector.0, &basis, cut);
    let bs = block_spectrum(&blocks, opts.floor)?;
    Ok(EdSolution {
        spectrum: bs.spectrum,
        ground,
        floored: bs.floored,
    })
}

pub fn ed_entanglement_spectrum(
    params: &ModelParams,
    cut: CutSpec,
    opts: &EdOptions,
) -> Result<EntanglementSpectrum> {
    Ok(ed_solution(params, cut, opts)?.spectrum)
}
