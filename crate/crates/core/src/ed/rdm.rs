//! Particle-number blocks of the reduced density matrix of sites `1..=L_A`.
//!
//! Amplitudes are reshaped block by block into `M[a][b]`, with `a` running over
//! subsystem configurations `(up_A, down_A)` and `b` over complement
//! configurations. Splitting the operator string into A and B parts costs a
//! sign `(-1)^{N↑_B · N↓_A}`, which is constant inside a block and cancels in
//! `M Mᵀ`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::basis::{ConfigSet, SectorBasis};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::model::CutSpec;
use crate::spectrum::{EntanglementSpectrum, EsLevel};

pub const DEFAULT_FLOOR: f64 = 1e-14;
pub const NEGATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RdmBlock {
    /// Particles in the subsystem, `(n↑_A, n↓_A)`.
    pub key: (usize, usize),
    /// `M Mᵀ`, or `Mᵀ M` when the complement side is smaller. Both share the
    /// same nonzero spectrum.
    pub matrix: DMatrix<f64>,
}

impl RdmBlock {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

/// Per-block reshaped amplitudes.
struct Reshape {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

pub fn reduced_density_blocks(psi: &[f64], basis: &SectorBasis, cut: CutSpec) -> Vec<RdmBlock> {
    assert_eq!(psi.len(), basis.len(), "amplitudes not aligned with the basis");
    let la = cut.len;
    let lb = basis.sites() - la;
    assert!(la >= 1 && la < basis.sites(), "cut must leave both sides nonempty");
    let mask_a = (1u64 << la) - 1;

    let a_sets: Vec<ConfigSet> = (0..=la).map(|n| ConfigSet::new(la, n)).collect();
    let b_sets: Vec<ConfigSet> = (0..=lb).map(|n| ConfigSet::new(lb, n)).collect();
    let (nu, nd) = (basis.n_up(), basis.n_down());

    let mut blocks: BTreeMap<(usize, usize), Reshape> = BTreeMap::new();
    for (k, (u, d)) in basis.states().enumerate() {
        let amp = psi[k];
        if amp == 0.0 {
            continue;
        }
        let (ua, ub) = (u & mask_a, u >> la);
        let (da, db) = (d & mask_a, d >> la);
        let key = (ua.count_ones() as usize, da.count_ones() as usize);
        let (sa_u, sa_d) = (&a_sets[key.0], &a_sets[key.1]);
        let (sb_u, sb_d) = (&b_sets[nu - key.0], &b_sets[nd - key.1]);
        let entry = blocks.entry(key).or_insert_with(|| {
            let rows = sa_u.len() * sa_d.len();
            let cols = sb_u.len() * sb_d.len();
            Reshape {
                rows,
                cols,
                data: vec![0.0; rows * cols],
            }
        });
        let row = sa_u.rank(ua).unwrap() * sa_d.len() + sa_d.rank(da).unwrap();
        let col = sb_u.rank(ub).unwrap() * sb_d.len() + sb_d.rank(db).unwrap();
        entry.data[row * entry.cols + col] = amp;
    }

    blocks
        .into_iter()
        .map(|(key, r)| {
            let m = DMatrix::from_row_slice(r.rows, r.cols, &r.data);
            let gram = if r.rows <= r.cols {
                &m * m.transpose()
            } else {
                m.transpose() * &m
            };
            let matrix = (&gram + gram.transpose()) * 0.5;
            RdmBlock { key, matrix }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpectrum {
    pub spectrum: EntanglementSpectrum,
    /// Eigenvalues dropped for lying below the floor.
    pub floored: usize,
}

/// Eigenvalues of every block; those `>= floor` become levels.
pub fn block_spectrum(blocks: &[RdmBlock], floor: f64) -> Result<BlockSpectrum> {
    let mut levels = Vec::new();
    let mut floored = 0;
    for b in blocks {
        for lambda in symmetric_eigenvalues(&b.matrix) {
            if lambda < -NEGATIVE_TOL {
                return Err(Error::NegativeEigenvalue { value: lambda });
            }
            if lambda >= floor {
                levels.push(EsLevel::from_weight(lambda, b.key.0, b.key.1));
            } else {
                floored += 1;
            }
        }
    }
    Ok(BlockSpectrum {
        spectrum: EntanglementSpectrum::new(levels, true),
        floored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::basis::build_sector_basis;

    #[test]
    fn product_state_gives_one_unit_block() {
        let basis = build_sector_basis(4, 2, 2).unwrap();
        let mut psi = vec![0.0; basis.len()];
        psi[basis.index(0b0101, 0b0011).unwrap()] = 1.0;
        let blocks = reduced_density_blocks(&psi, &basis, CutSpec::new(2));
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].key, (1, 2));
        // the block spans every (1, 2) configuration of A, with a single nonzero entry
        let nonzero: Vec<f64> = blocks[0].matrix.iter().copied().filter(|&x| x != 0.0).collect();
        assert_eq!(nonzero, vec![1.0]);
        let s = block_spectrum(&blocks, DEFAULT_FLOOR).unwrap().spectrum;
        assert_eq!(s.len(), 1);
        assert_eq!(s.levels[0].xi, 0.0);
    }

    #[test]
    fn traces_sum_to_one() {
        let basis = build_sector_basis(6, 3, 2).unwrap();
        let mut psi: Vec<f64> = (0..basis.len()).map(|k| ((k * 31 % 17) as f64 - 8.0) / 7.0).collect();
        let n = crate::vecops::norm(&psi);
        psi.iter_mut().for_each(|x| *x /= n);
        for la in [2, 4] {
            let blocks = reduced_density_blocks(&psi, &basis, CutSpec::new(la));
            let tr: f64 = blocks.iter().map(RdmBlock::trace).sum();
            assert!((tr - 1.0).abs() < 1e-12);
            let s = block_spectrum(&blocks, 0.0).unwrap();
            assert!((s.spectrum.total_weight() - 1.0).abs() < 1e-10);
            for b in &blocks {
                assert!(symmetric_eigenvalues(&b.matrix).iter().all(|&l| l > -1e-12));
            }
        }
    }

    #[test]
    fn severed_singlet_analogue() {
        let blocks = vec![
            RdmBlock {
                key: (1, 0),
                matrix: DMatrix::from_element(1, 1, 0.5),
            },
            RdmBlock {
                key: (0, 1),
                matrix: DMatrix::from_element(1, 1, 0.5),
            },
        ];
        let s = block_spectrum(&blocks, DEFAULT_FLOOR).unwrap();
        assert_eq!(s.spectrum.len(), 2);
        for l in &s.spectrum.levels {
            assert!((l.xi - 2f64.ln()).abs() < 1e-15);
        }
        let labels: Vec<_> = s.spectrum.levels.iter().map(|l| l.labels()).collect();
        assert_eq!(labels, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn floors_and_negatives() {
        let tiny = vec![RdmBlock {
            key: (0, 0),
            matrix: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-16]),
        }];
        let s = block_spectrum(&tiny, DEFAULT_FLOOR).unwrap();
        assert_eq!(s.spectrum.len(), 1);
        assert_eq!(s.floored, 1);
        let neg = vec![RdmBlock {
            key: (0, 0),
            matrix: DMatrix::from_element(1, 1, -1e-6),
        }];
        assert!(matches!(
            block_spectrum(&neg, DEFAULT_FLOOR),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }
}
