//! Entanglement spectra shared by both engines.

use serde::{Deserialize, Serialize};

/// One eigenvalue `λ = e^{-ξ}` of a reduced density matrix, labelled by the
/// particle numbers it carries in the subsystem.
///
/// Spinless spectra store their particle count in `n_up` and keep `n_down = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsLevel {
    pub xi: f64,
    pub n_up: usize,
    pub n_down: usize,
    pub weight: f64,
}

impl EsLevel {
    pub fn from_xi(xi: f64, n_up: usize, n_down: usize) -> Self {
        Self {
            xi,
            n_up,
            n_down,
            weight: (-xi).exp(),
        }
    }

    pub fn from_weight(weight: f64, n_up: usize, n_down: usize) -> Self {
        Self {
            xi: -weight.ln(),
            n_up,
            n_down,
            weight,
        }
    }

    pub fn particles(&self) -> usize {
        self.n_up + self.n_down
    }

    pub fn labels(&self) -> (usize, usize) {
        (self.n_up, self.n_down)
    }
}

/// Levels sorted by `ξ` ascending.
///
/// `complete` is false when the list was truncated, in which case only a
/// lowest-`ξ` prefix of the full spectrum is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSpectrum {
    pub levels: Vec<EsLevel>,
    pub complete: bool,
}

impl EntanglementSpectrum {
    pub fn new(mut levels: Vec<EsLevel>, complete: bool) -> Self {
        sort_levels(&mut levels);
        Self { levels, complete }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.levels.iter().map(|l| l.weight).sum()
    }

    pub fn min_xi(&self) -> Option<f64> {
        self.levels.first().map(|l| l.xi)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.weight).collect()
    }
}

/// Sort by `ξ`, then by labels, so that output order is reproducible.
pub fn sort_levels(levels: &mut [EsLevel]) {
    levels.sort_by(|a, b| {
        a.xi.total_cmp(&b.xi)
            .then(a.n_up.cmp(&b.n_up))
            .then(a.n_down.cmp(&b.n_down))
    });
}

/// Largest `|λ_a - λ_b|` over levels paired by their `(n_up, n_down)` labels.
///
/// Levels with `λ <= floor` in either spectrum are ignored. Returns `None` when
/// the label multisets above the floor differ in size for some label.
pub fn label_matched_deviation(
    a: &EntanglementSpectrum,
    b: &EntanglementSpectrum,
    floor: f64,
) -> Option<f64> {
    use std::collections::BTreeMap;
    let bucket = |s: &EntanglementSpectrum| {
        let mut m: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for l in s.levels.iter().filter(|l| l.weight > floor) {
            m.entry(l.labels()).or_default().push(l.weight);
        }
        for v in m.values_mut() {
            v.sort_by(|x, y| y.total_cmp(x));
        }
        m
    };
    let (ma, mb) = (bucket(a), bucket(b));
    let mut worst = 0.0f64;
    let keys: std::collections::BTreeSet<_> = ma.keys().chain(mb.keys()).collect();
    for k in keys {
        let va = ma.get(k).map(Vec::as_slice).unwrap_or(&[]);
        let vb = mb.get(k).map(Vec::as_slice).unwrap_or(&[]);
        if va.len() != vb.len() {
            // A level sitting right at the floor may appear on one side only.
            let extra = |long: &[f64], short: &[f64]| {
                long[short.len()..].iter().all(|&w| w <= floor * 10.0)
            };
            let ok = if va.len() > vb.len() {
                extra(va, vb)
            } else {
                extra(vb, va)
            };
            if !ok {
                return None;
            }
        }
        for (x, y) in va.iter().zip(vb) {
            worst = worst.max((x - y).abs());
        }
    }
    Some(worst)
}
