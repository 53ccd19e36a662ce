//! Entanglement spectrum of the non-interacting ground state from its
//! single-particle correlation matrix `G_ij = <c†_i c_j>`.
//!
//! For a Slater determinant the reduced density matrix of a block is Gaussian
//! and fixed by the restriction `G_A`. Each eigenvalue `f_l` of `G_A` is an
//! independent fermionic mode, and a many-body eigenvalue of `ρ_A` is
//! `λ = Π_l f_l^{n_l} (1 - f_l)^{1 - n_l}` for an occupation pattern `n`.
//! Levels are reported as `ξ = -ln λ >= 0`.

use nalgebra::DMatrix;

use crate::bestfirst::{PairSums, SubsetSums};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, symmetric_eigenvalues};
use crate::model::{build_hopping_matrix, BoundaryCondition, CutSpec, HoppingMatrix, ModelParams};
use crate::spectrum::{EntanglementSpectrum, EsLevel};

/// Minimum single-particle gap at the Fermi level, in units of the hopping.
pub const GAP_THRESHOLD: f64 = 1e-9;
/// Correlation eigenvalues this far outside `[0, 1]` are clamped; beyond it they are rejected.
pub const RANGE_SLACK: f64 = 1e-12;
/// Modes with `f < FREEZE` or `f > 1 - FREEZE` never change occupation.
pub const FREEZE: f64 = 1e-12;

pub const DEFAULT_MAX_LEVELS: usize = 256;
pub const DEFAULT_XI_WINDOW: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(DMatrix<f64>);

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

impl From<DMatrix<f64>> for CorrelationMatrix {
    fn from(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "correlation matrix must be square");
        Self(m)
    }
}

/// Eigenvalues of a correlation matrix, ascending, in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum(Vec<f64>);

impl ModeSpectrum {
    /// Sorts and clamps; fails on values more than [`RANGE_SLACK`] outside `[0, 1]`.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if !(*v >= -RANGE_SLACK && *v <= 1.0 + RANGE_SLACK) {
                return Err(Error::SpectrumOutOfRange { value: *v });
            }
            *v = v.clamp(0.0, 1.0);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Occupation of each mode in one many-body eigenstate of `ρ_A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationPattern(pub Vec<bool>);

impl OccupationPattern {
    pub fn particles(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// `λ = Π f^n (1-f)^(1-n)`.
    pub fn weight(&self, modes: &ModeSpectrum) -> f64 {
        assert_eq!(self.0.len(), modes.len());
        self.0
            .iter()
            .zip(modes.values())
            .map(|(&n, &f)| if n { f } else { 1.0 - f })
            .product()
    }
}

/// Projector onto the `n_fill` lowest orbitals of `h`.
pub fn ground_correlation_matrix(h: &HoppingMatrix, n_fill: usize) -> Result<CorrelationMatrix> {
    let dim = h.dim();
    if n_fill > dim {
        return Err(Error::InvalidParams(format!(
            "n_fill = {n_fill} exceeds the {dim} available orbitals"
        )));
    }
    let (energies, orbitals) = symmetric_eigen(h.matrix());
    if n_fill > 0 && n_fill < dim {
        let gap = energies[n_fill] - energies[n_fill - 1];
        if gap < GAP_THRESHOLD {
            return Err(Error::Gapless { gap });
        }
    }
    let occ = orbitals.columns(0, n_fill);
    let g = &occ * occ.transpose();
    // exact symmetry
    let g = (&g + g.transpose()) * 0.5;
    Ok(CorrelationMatrix(g))
}

/// Leading `L_A × L_A` principal block.
pub fn restrict(g: &CorrelationMatrix, cut: CutSpec) -> CorrelationMatrix {
    assert!(cut.len <= g.dim(), "cut longer than the correlation matrix");
    CorrelationMatrix(g.0.view((0, 0), (cut.len, cut.len)).into_owned())
}

pub fn mode_spectrum(g_a: &CorrelationMatrix) -> Result<ModeSpectrum> {
    if g_a.dim() == 0 {
        return ModeSpectrum::new(Vec::new());
    }
    ModeSpectrum::new(symmetric_eigenvalues(&g_a.0))
}

/// Lowest levels of the spinless Gaussian state with mode occupations `modes`.
///
/// The largest-weight pattern fills mode `l` iff `f_l > 1/2`. Every other
/// pattern differs from it by a set of flips, each costing
/// `|ln(f_l / (1 - f_l))|`, so the spectrum is the base level plus the
/// smallest subset sums of those costs. Modes within [`FREEZE`] of 0 or 1 keep
/// their base occupation. At most `max_levels` levels with
/// `ξ <= ξ_min + xi_window` are returned.
pub fn enumerate_levels(
    modes: &ModeSpectrum,
    max_levels: usize,
    xi_window: f64,
) -> EntanglementSpectrum {
    let mut xi0 = 0.0;
    let mut base_particles = 0usize;
    // (cost, particle-number change on flipping)
    let mut active: Vec<(f64, i64)> = Vec::new();
    for &f in modes.values() {
        let occupied = f > 0.5;
        if occupied {
            base_particles += 1;
        }
        xi0 -= f.max(1.0 - f).ln();
        if f >= FREEZE && f <= 1.0 - FREEZE {
            let cost = (f / (1.0 - f)).ln().abs();
            active.push((cost, if occupied { -1 } else { 1 }));
        }
    }
    active.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let costs: Vec<f64> = active.iter().map(|a| a.0).collect();
    let tags: Vec<i64> = active.iter().map(|a| a.1).collect();

    let total = 1u128.checked_shl(costs.len() as u32).unwrap_or(u128::MAX);
    let mut levels = Vec::new();
    let mut exhausted = true;
    let mut sums = SubsetSums::new(&costs, &tags);
    loop {
        if levels.len() >= max_levels {
            exhausted = (levels.len() as u128) >= total;
            break;
        }
        match sums.next() {
            None => break,
            Some((extra, dn)) => {
                if extra > xi_window {
                    exhausted = false;
                    break;
                }
                let n = base_particles as i64 + dn;
                levels.push(EsLevel::from_xi(xi0 + extra, n as usize, 0));
            }
        }
    }
    let complete = exhausted && (levels.len() as u128) == total;
    EntanglementSpectrum::new(levels, complete)
}

/// Spectrum of the product `ρ↑ ⊗ ρ↓` from the two spinless factors.
///
/// The spin-down factor's particle count (stored in its `n_up`) becomes the
/// `n_down` label. When a factor is truncated, output stops at the largest sum
/// that is guaranteed to be exact: `ξ_last` of that factor plus the minimum of
/// the other.
pub fn combine_spins(
    up: &EntanglementSpectrum,
    down: &EntanglementSpectrum,
    max_levels: usize,
) -> EntanglementSpectrum {
    let exact = |s: &EntanglementSpectrum| exact_through(s, s.len(), f64::INFINITY);
    merge_spins(up, exact(up), down, exact(down), max_levels, f64::INFINITY)
}

/// `ξ` below which a spinless list produced by [`enumerate_levels`] with these
/// limits is exact: every omitted level lies at or above it.
fn exact_through(s: &EntanglementSpectrum, max_levels: usize, xi_window: f64) -> f64 {
    match (s.levels.first(), s.levels.last()) {
        _ if s.complete => f64::INFINITY,
        (Some(first), Some(last)) => {
            if s.len() < max_levels {
                // stopped by the window
                first.xi + xi_window
            } else {
                last.xi
            }
        }
        _ => f64::NEG_INFINITY,
    }
}

/// Pair sums of the two factors up to the smaller of `window` above the
/// lowest sum and the largest sum both factors determine exactly.
fn merge_spins(
    up: &EntanglementSpectrum,
    up_exact: f64,
    down: &EntanglementSpectrum,
    down_exact: f64,
    max_levels: usize,
    window: f64,
) -> EntanglementSpectrum {
    let a: Vec<f64> = up.levels.iter().map(|l| l.xi).collect();
    let b: Vec<f64> = down.levels.iter().map(|l| l.xi).collect();
    let mut bound = f64::INFINITY;
    if let (Some(&a_min), Some(&b_min)) = (a.first(), b.first()) {
        bound = (up_exact + b_min).min(down_exact + a_min).min(a_min + b_min + window);
    }
    let total = a.len() * b.len();
    let mut levels = Vec::new();
    for (xi, i, j) in PairSums::new(&a, &b) {
        if levels.len() >= max_levels || xi > bound {
            break;
        }
        let (u, d) = (&up.levels[i], &down.levels[j]);
        levels.push(EsLevel::from_xi(xi, u.particles(), d.particles()));
    }
    let complete = up.complete && down.complete && levels.len() == total;
    EntanglementSpectrum::new(levels, complete)
}

/// Per-spin pieces of a free-fermion calculation, kept for inspection.
#[derive(Debug, Clone)]
pub struct FreeSolution {
    pub modes: ModeSpectrum,
    pub per_spin: EntanglementSpectrum,
    pub spectrum: EntanglementSpectrum,
}

/// Half-filled ring ground state, cut to sites `1..=L_A`, both spins.
pub fn free_entanglement_spectrum(
    params: &ModelParams,
    cut: CutSpec,
    max_levels: usize,
) -> Result<EntanglementSpectrum> {
    Ok(free_solution(params, cut, max_levels, DEFAULT_XI_WINDOW)?.spectrum)
}

pub fn free_solution(
    params: &ModelParams,
    cut: CutSpec,
    max_levels: usize,
    xi_window: f64,
) -> Result<FreeSolution> {
    let params = params.validate()?;
    let cut = cut.validate(params.sites)?;
    if params.u != 0.0 {
        return Err(Error::EngineMismatch { u: params.u });
    }
    let h = build_hopping_matrix(&params, BoundaryCondition::Pbc);
    let g = ground_correlation_matrix(&h, params.sites / 2)?;
    let modes = mode_spectrum(&restrict(&g, cut))?;
    let per_spin = enumerate_levels(&modes, max_levels, xi_window);
    let exact = exact_through(&per_spin, max_levels, xi_window);
    let spectrum = merge_spins(&per_spin, exact, &per_spin, exact, max_levels, xi_window);
    Ok(FreeSolution {
        modes,
        per_spin,
        spectrum,
    })
}
