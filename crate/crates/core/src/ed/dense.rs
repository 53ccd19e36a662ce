//! Dense reference implementation for small chains.
//!
//! Everything here works directly with ordered lists of occupied fermion
//! modes and explicit anticommutation, without the bit-mask sign shortcut or
//! the block-wise reduced density matrix used by the fast path. It exists to
//! cross-check those.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::model::{bonds, BoundaryCondition, ModelParams};
use crate::spectrum::{EntanglementSpectrum, EsLevel};

/// Fock state as the ascending list of occupied modes. Mode `σ L + s` is spin
/// `σ` (0 = up) on site `s`; the state is `Π c†_m |0>` in ascending order.
type Occupation = Vec<usize>;

/// `c_m` on an ordered occupation list: `None` if empty, else sign and result.
fn annihilate(state: &Occupation, m: usize) -> Option<(f64, Occupation)> {
    let pos = state.iter().position(|&x| x == m)?;
    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = state.clone();
    out.remove(pos);
    Some((sign, out))
}

fn create(state: &Occupation, m: usize) -> Option<(f64, Occupation)> {
    if state.contains(&m) {
        return None;
    }
    let pos = state.iter().filter(|&&x| x < m).count();
    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = state.clone();
    out.insert(pos, m);
    Some((sign, out))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            cur.push(s);
            rec(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Fock states of the `(n_up, n_down)` sector, in the same order as
/// [`super::basis::SectorBasis`] (up configuration major, each side ascending
/// as a bit word).
pub fn sector_states(sites: usize, n_up: usize, n_down: usize) -> Vec<Occupation> {
    let word = |c: &Vec<usize>| c.iter().map(|&s| 1u64 << s).sum::<u64>();
    let mut ups = combinations(sites, n_up);
    let mut downs = combinations(sites, n_down);
    ups.sort_by_key(word);
    downs.sort_by_key(word);
    let mut out = Vec::new();
    for u in &ups {
        for d in &downs {
            let mut occ: Occupation = u.clone();
            occ.extend(d.iter().map(|s| s + sites));
            out.push(occ);
        }
    }
    out
}

/// The full sector Hamiltonian as a dense matrix.
pub fn dense_hamiltonian(
    params: &ModelParams,
    bc: BoundaryCondition,
    n_up: usize,
    n_down: usize,
) -> (Vec<Occupation>, DMatrix<f64>) {
    let l = params.sites;
    let states = sector_states(l, n_up, n_down);
    let index: BTreeMap<Occupation, usize> =
        states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut h = DMatrix::zeros(states.len(), states.len());
    let bond_list = bonds(params, bc);
    for (col, s) in states.iter().enumerate() {
        // U n↑ n↓
        for site in 0..l {
            if s.contains(&site) && s.contains(&(site + l)) {
                h[(col, col)] += params.u;
            }
        }
        for b in &bond_list {
            for spin in 0..2 {
                for (to, from) in [(b.i, b.j), (b.j, b.i)] {
                    let (to, from) = (to + spin * l, from + spin * l);
                    let Some((s1, mid)) = annihilate(s, from) else { continue };
                    let Some((s2, out)) = create(&mid, to) else { continue };
                    let row = index[&out];
                    h[(row, col)] += b.amplitude * s1 * s2;
                }
            }
        }
    }
    (states, h)
}

/// All eigenvalues ascending with the matching eigenvectors as columns.
pub fn dense_eigen(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    crate::linalg::symmetric_eigen(h)
}

/// Entanglement spectrum of sites `0..la` by a full Schmidt decomposition.
///
/// Each Fock state is reordered into (A up, A down, B up, B down) mode order,
/// tracking the permutation sign explicitly, and the full `ρ_A` is built
/// without assuming any block structure.
pub fn dense_entanglement_spectrum(
    states: &[Occupation],
    psi: &[f64],
    sites: usize,
    la: usize,
    floor: f64,
) -> EntanglementSpectrum {
    let in_a = |m: usize| m % sites < la;
    let mut a_index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut b_index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for (s, &amp) in states.iter().zip(psi) {
        let a: Vec<usize> = s.iter().copied().filter(|&m| in_a(m)).collect();
        let b: Vec<usize> = s.iter().copied().filter(|&m| !in_a(m)).collect();
        // sign of moving every A mode in front of every B mode
        let mut swaps = 0usize;
        for (p, &m) in s.iter().enumerate() {
            if in_a(m) {
                swaps += s[..p].iter().filter(|&&x| !in_a(x)).count();
            }
        }
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        let na = a_index.len();
        let ia = *a_index.entry(a).or_insert(na);
        let nb = b_index.len();
        let ib = *b_index.entry(b).or_insert(nb);
        entries.push((ia, ib, sign * amp));
    }
    let mut m = DMatrix::<f64>::zeros(a_index.len(), b_index.len());
    for (ia, ib, v) in entries {
        m[(ia, ib)] += v;
    }
    let rho = &m * m.transpose();

    // ρ_A must be block diagonal in the subsystem particle numbers; verify it,
    // then diagonalize each block on its own so labels are unambiguous.
    let labels: Vec<(usize, usize)> = {
        let mut v = vec![(0, 0); rho.nrows()];
        for (cfg, &row) in &a_index {
            let nu = cfg.iter().filter(|&&m| m < sites).count();
            v[row] = (nu, cfg.len() - nu);
        }
        v
    };
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            if labels[i] != labels[j] {
                assert!(rho[(i, j)].abs() < 1e-13, "reduced density matrix mixes sectors");
            }
        }
    }
    let mut sectors: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (row, &key) in labels.iter().enumerate() {
        sectors.entry(key).or_default().push(row);
    }
    let mut levels = Vec::new();
    for (key, rows) in sectors {
        let block = DMatrix::from_fn(rows.len(), rows.len(), |i, j| rho[(rows[i], rows[j])]);
        let (vals, _) = dense_eigen(&block);
        for lambda in vals {
            if lambda >= floor {
                levels.push(EsLevel::from_weight(lambda, key.0, key.1));
            }
        }
    }
    EntanglementSpectrum::new(levels, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hubbard_dimer_ground_energy() {
        // two sites with a single bond of strength τ = t + δt
        let params = ModelParams::new(2, 1.0, 0.2, 3.0);
        let (_, h) = dense_hamiltonian(&params, BoundaryCondition::Obc, 1, 1);
        let (vals, _) = dense_eigen(&h);
        let (u, tau) = (3.0f64, 1.2f64);
        let exact = u / 2.0 - ((u / 2.0).powi(2) + 4.0 * tau * tau).sqrt();
        assert!((vals[0] - exact).abs() < 1e-12);
        assert!((vals[0] + 1.330_194_34).abs() < 1e-8);
    }

    #[test]
    fn noninteracting_energy_is_sum_of_orbitals() {
        let params = ModelParams::new(6, 1.0, -0.3, 0.0);
        let (_, h) = dense_hamiltonian(&params, BoundaryCondition::Pbc, 3, 3);
        let (vals, _) = dense_eigen(&h);
        let hop = crate::model::build_hopping_matrix(&params, BoundaryCondition::Pbc);
        let e = crate::linalg::symmetric_eigenvalues(hop.matrix());
        let expect = 2.0 * e[..3].iter().sum::<f64>();
        assert!((vals[0] - expect).abs() < 1e-12);
    }
}
