//! Occupation-number basis of a fixed `(N↑, N↓)` sector.
//!
//! Bit `s` of a configuration word is the occupation of (0-indexed) site `s`.
//! The sector is the product of the spin-up and spin-down configuration sets,
//! each sorted ascending, so state `(u, d)` sits at `rank(u) * n_down_configs + rank(d)`.

use crate::error::{Error, Result};

pub const DEFAULT_SECTOR_CAP: usize = 4_000_000;

/// Ascending list of all `sites`-bit words with `count` bits set.
pub fn fixed_popcount_words(sites: usize, count: usize) -> Vec<u64> {
    assert!(sites <= 63, "at most 63 sites are supported");
    if count > sites {
        return Vec::new();
    }
    if count == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(sites, count) as usize);
    let limit = 1u64 << sites;
    let mut w = (1u64 << count) - 1;
    while w < limit {
        out.push(w);
        // Gosper's hack: next larger word with the same popcount
        let c = w & w.wrapping_neg();
        let r = w + c;
        w = (((r ^ w) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Sorted configuration list with rank lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSet {
    words: Vec<u64>,
}

impl ConfigSet {
    pub fn new(sites: usize, count: usize) -> Self {
        Self {
            words: fixed_popcount_words(sites, count),
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, rank: usize) -> u64 {
        self.words[rank]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn rank(&self, word: u64) -> Option<usize> {
        self.words.binary_search(&word).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    n_up: usize,
    n_down: usize,
    up: ConfigSet,
    down: ConfigSet,
}

impl SectorBasis {
    pub fn new(sites: usize, n_up: usize, n_down: usize) -> Result<Self> {
        Self::with_cap(sites, n_up, n_down, DEFAULT_SECTOR_CAP)
    }

    pub fn with_cap(sites: usize, n_up: usize, n_down: usize, cap: usize) -> Result<Self> {
        if sites == 0 || sites > 63 {
            return Err(Error::InvalidParams(format!(
                "sector basis supports 1..=63 sites, got {sites}"
            )));
        }
        if n_up > sites || n_down > sites {
            return Err(Error::InvalidParams(format!(
                "particle numbers ({n_up}, {n_down}) exceed {sites} sites"
            )));
        }
        let states = binomial(sites, n_up) * binomial(sites, n_down);
        if states > cap as u128 {
            return Err(Error::SectorTooLarge { states, cap });
        }
        Ok(Self {
            sites,
            n_up,
            n_down,
            up: ConfigSet::new(sites, n_up),
            down: ConfigSet::new(sites, n_down),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn up(&self) -> &ConfigSet {
        &self.up
    }

    pub fn down(&self) -> &ConfigSet {
        &self.down
    }

    pub fn len(&self) -> usize {
        self.up.len() * self.down.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(up_bits, down_bits)` of state `index`.
    pub fn state(&self, index: usize) -> (u64, u64) {
        let nd = self.down.len();
        (self.up.word(index / nd), self.down.word(index % nd))
    }

    pub fn index(&self, up_bits: u64, down_bits: u64) -> Option<usize> {
        let ru = self.up.rank(up_bits)?;
        let rd = self.down.rank(down_bits)?;
        Some(ru * self.down.len() + rd)
    }

    pub fn states(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.up
            .words()
            .iter()
            .flat_map(move |&u| self.down.words().iter().map(move |&d| (u, d)))
    }
}

pub fn build_sector_basis(sites: usize, n_up: usize, n_down: usize) -> Result<SectorBasis> {
    SectorBasis::new(sites, n_up, n_down)
}
