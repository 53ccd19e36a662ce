//! Matrix-free SSH-Hubbard Hamiltonian on a fixed sector.
//!
//! Fermionic operators are ordered with every spin-up creation operator
//! (sites ascending) before every spin-down one. Under that ordering a hop
//! `c†_i c_j` within one species picks up `(-1)^p`, with `p` the number of
//! same-species particles on sites strictly between `i` and `j`. Hops of one
//! species never see the other species' string.

use rayon::prelude::*;

use super::basis::{ConfigSet, SectorBasis};
use crate::lanczos::LinearOperator;
use crate::model::{bonds, BoundaryCondition, ModelParams};

/// Sign of `c†_i c_j` acting on configuration `word`.
pub type SignRule = fn(word: u64, i: usize, j: usize) -> f64;

pub fn fermionic_sign(word: u64, i: usize, j: usize) -> f64 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let between = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    if (word & between).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Compressed rows of the one-species hopping operator on a configuration set.
#[derive(Debug, Clone)]
struct HopTable {
    offsets: Vec<usize>,
    entries: Vec<(u32, f64)>,
}

impl HopTable {
    fn new(configs: &ConfigSet, params: &ModelParams, bc: BoundaryCondition, sign: SignRule) -> Self {
        let bonds = bonds(params, bc);
        let mut offsets = Vec::with_capacity(configs.len() + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for &w in configs.words() {
            for b in &bonds {
                for (to, from) in [(b.i, b.j), (b.j, b.i)] {
                    if w >> from & 1 == 1 && w >> to & 1 == 0 {
                        let target = (w ^ (1 << from)) | (1 << to);
                        let rank = configs.rank(target).expect("hop stays in the sector");
                        entries.push((rank as u32, b.amplitude * sign(w, to, from)));
                    }
                }
            }
            offsets.push(entries.len());
        }
        Self { offsets, entries }
    }

    fn row(&self, r: usize) -> &[(u32, f64)] {
        &self.entries[self.offsets[r]..self.offsets[r + 1]]
    }
}

#[derive(Debug, Clone)]
pub struct SectorHamiltonian<'a> {
    basis: &'a SectorBasis,
    u: f64,
    up: HopTable,
    down: HopTable,
}

impl<'a> SectorHamiltonian<'a> {
    pub fn new(basis: &'a SectorBasis, params: &ModelParams, bc: BoundaryCondition) -> Self {
        Self::with_sign_rule(basis, params, bc, fermionic_sign)
    }

    /// Same operator with a replacement sign rule; used to check that the
    /// validation suite notices a wrong kernel.
    pub fn with_sign_rule(
        basis: &'a SectorBasis,
        params: &ModelParams,
        bc: BoundaryCondition,
        sign: SignRule,
    ) -> Self {
        assert_eq!(basis.sites(), params.sites, "basis and model disagree on L");
        Self {
            basis,
            u: params.u,
            up: HopTable::new(basis.up(), params, bc, sign),
            down: HopTable::new(basis.down(), params, bc, sign),
        }
    }

    pub fn basis(&self) -> &SectorBasis {
        self.basis
    }
}

impl LinearOperator for SectorHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nd = self.basis.down().len();
        let up_words = self.basis.up().words();
        let down_words = self.basis.down().words();
        y.par_chunks_mut(nd).enumerate().for_each(|(iu, row)| {
            let uw = up_words[iu];
            let up_hops = self.up.row(iu);
            for (id, out) in row.iter_mut().enumerate() {
                let k = iu * nd + id;
                let doubles = (uw & down_words[id]).count_ones() as f64;
                let mut acc = self.u * doubles * x[k];
                for &(ju, a) in up_hops {
                    acc += a * x[ju as usize * nd + id];
                }
                for &(jd, a) in self.down.row(id) {
                    acc += a * x[iu * nd + jd as usize];
                }
                *out = acc;
            }
        });
    }
}

/// Real amplitudes over a [`SectorBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub Vec<f64>);

impl StateVector {
    pub fn norm(&self) -> f64 {
        crate::vecops::norm(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `H v` for the SSH-Hubbard Hamiltonian.
pub fn hamiltonian_apply(
    basis: &SectorBasis,
    params: &ModelParams,
    bc: BoundaryCondition,
    v: &StateVector,
) -> StateVector {
    assert_eq!(v.len(), basis.len(), "vector not aligned with the basis");
    let h = SectorHamiltonian::new(basis, params, bc);
    let mut w = vec![0.0; basis.len()];
    h.apply(&v.0, &mut w);
    StateVector(w)
}
