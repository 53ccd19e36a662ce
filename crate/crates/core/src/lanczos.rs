//! Thick-restart Lanczos with full reorthogonalization for the lowest
//! eigenpairs of a real symmetric operator.
//!
//! Pairs are found one at a time. Each search runs in the orthogonal
//! complement of the pairs already locked, so every copy of a degenerate
//! eigenvalue is found, which a single Krylov sequence cannot do. Within a
//! search the Krylov basis is orthogonalized against every stored vector twice
//! per step and the projected matrix `T = Vᵀ A V` is kept dense: tridiagonal in
//! the first cycle, with an arrow of couplings after a restart. When the basis
//! reaches `max_basis` vectors it is compressed to the lowest Ritz vectors plus
//! the current residual direction.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::vecops::{axpy, dot, norm, scale};

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Dense symmetric matrix as an operator; handy for tests and small oracles.
impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    /// Maximum number of operator applications.
    pub max_iter: usize,
    /// Required residual `‖A x - θ x‖` for each returned pair.
    pub tol: f64,
    pub seed: u64,
    /// Largest Krylov basis held in memory before a restart.
    pub max_basis: usize,
    /// Random `(u, v)` pairs used to check `<u, Av> = <Au, v>`.
    pub symmetry_probes: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-10,
            seed: 0x5eed,
            max_basis: 80,
            symmetry_probes: 10,
        }
    }
}

pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Explicit `‖A x - θ x‖` per pair.
    pub residuals: Vec<f64>,
    /// Operator applications spent in the iteration.
    pub iterations: usize,
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    let n = norm(&v);
    scale(1.0 / n, &mut v);
    v
}

/// Largest `|<u, Av> - <Au, v>|` over `probes` random unit pairs.
pub fn symmetry_deviation(op: &dyn LinearOperator, probes: usize, seed: u64) -> f64 {
    let dim = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut au = vec![0.0; dim];
    let mut av = vec![0.0; dim];
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let u = random_unit(dim, &mut rng);
        let v = random_unit(dim, &mut rng);
        op.apply(&u, &mut au);
        op.apply(&v, &mut av);
        worst = worst.max((dot(&u, &av) - dot(&au, &v)).abs());
    }
    worst
}

/// Orthogonalize `w` against `basis` (two passes); returns first-pass projections
/// plus second-pass corrections.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let h = dot(v, w);
            axpy(-h, v, w);
            *c += h;
        }
    }
    coeffs
}

/// `Σ_i y[i] basis[i]`
fn combine(basis: &[Vec<f64>], y: impl Iterator<Item = f64>, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (v, c) in basis.iter().zip(y) {
        axpy(c, v, &mut out);
    }
    out
}

/// The `k` lowest eigenpairs of `op`, degenerate copies included.
pub fn lanczos_lowest(op: &dyn LinearOperator, k: usize, opts: &LanczosOptions) -> Result<Eigenpairs> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidParams(format!(
            "requested {k} eigenpairs of a {dim}-dimensional operator"
        )));
    }
    if opts.symmetry_probes > 0 {
        let dev = symmetry_deviation(op, opts.symmetry_probes, opts.seed);
        if dev > SYMMETRY_TOL {
            return Err(Error::NonSymmetricOperator { deviation: dev });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut found: Vec<Ritz> = Vec::with_capacity(k);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut iterations = 0usize;
    for _ in 0..k {
        let ritz = lowest_in_complement(op, &locked, opts, &mut rng, &mut iterations)?;
        locked.push(ritz.vector.clone());
        found.push(ritz);
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(Eigenpairs {
        values: found.iter().map(|r| r.value).collect(),
        residuals: found.iter().map(|r| r.residual).collect(),
        vectors: found.into_iter().map(|r| r.vector).collect(),
        iterations,
    })
}

struct Ritz {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
}

/// Unit vector orthogonal to `basis` and `locked`, or `None` if the random
/// draw lies (numerically) inside their span.
fn fresh_direction(dim: usize, basis: &[Vec<f64>], locked: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let mut v = random_unit(dim, rng);
    orthogonalize(locked, &mut v);
    orthogonalize(basis, &mut v);
    let n = norm(&v);
    if n < 1e-8 {
        return None;
    }
    scale(1.0 / n, &mut v);
    Some(v)
}

/// Lowest eigenpair of `op` restricted to the complement of `locked`.
///
/// `iterations` counts operator applications across calls; the search fails
/// once it reaches `opts.max_iter`.
fn lowest_in_complement(
    op: &dyn LinearOperator,
    locked: &[Vec<f64>],
    opts: &LanczosOptions,
    rng: &mut ChaCha8Rng,
    iterations: &mut usize,
) -> Result<Ritz> {
    let dim = op.dim();
    let room = dim - locked.len();
    let max_basis = opts.max_basis.max(3).min(room);
    let keep = 9.min(max_basis / 2).max(1);

    let not_converged = |iterations: usize, residual: f64| Error::NotConverged { iterations, residual };
    let mut basis: Vec<Vec<f64>> =
        vec![fresh_direction(dim, &[], locked, rng).ok_or_else(|| not_converged(*iterations, f64::INFINITY))?];
    // projected matrix, grown as the basis grows
    let mut t = DMatrix::<f64>::zeros(0, 0);
    let mut w = vec![0.0; dim];
    let mut ax = vec![0.0; dim];
    let mut last_residual;

    loop {
        // extend the basis by one vector: column j of T
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        *iterations += 1;
        orthogonalize(locked, &mut w);
        let coeffs = orthogonalize(&basis, &mut w);
        let m = basis.len();
        t = t.resize(m, m, 0.0);
        for (i, &c) in coeffs.iter().enumerate() {
            t[(i, j)] = c;
            t[(j, i)] = c;
        }
        let beta = norm(&w);

        let (theta, y) = symmetric_eigen(&t);
        let estimate = (beta * y[(m - 1, 0)]).abs();
        let exhausted = m == room;
        let breakdown = beta <= 1e-14 * theta.iter().fold(1.0f64, |a, b| a.max(b.abs()));

        if exhausted || breakdown || estimate < opts.tol * 0.1 {
            let mut x = combine(&basis, y.column(0).iter().copied(), dim);
            let nx = norm(&x);
            scale(1.0 / nx, &mut x);
            op.apply(&x, &mut ax);
            axpy(-theta[0], &x, &mut ax);
            let residual = norm(&ax);
            last_residual = residual;
            if residual < opts.tol {
                return Ok(Ritz {
                    value: theta[0],
                    vector: x,
                    residual,
                });
            }
            if exhausted {
                return Err(not_converged(*iterations, residual));
            }
        } else {
            last_residual = estimate;
        }

        if *iterations >= opts.max_iter {
            return Err(not_converged(*iterations, last_residual));
        }

        if breakdown {
            // invariant subspace: continue with a fresh random direction
            let fresh = fresh_direction(dim, &basis, locked, rng)
                .ok_or_else(|| not_converged(*iterations, last_residual))?;
            basis.push(fresh);
            continue;
        }

        scale(1.0 / beta, &mut w);
        if m < max_basis {
            basis.push(std::mem::replace(&mut w, vec![0.0; dim]));
            continue;
        }

        // thick restart: keep the lowest Ritz vectors, then the residual direction
        let mut next: Vec<Vec<f64>> = (0..keep)
            .map(|c| combine(&basis, y.column(c).iter().copied(), dim))
            .collect();
        let mut tn = DMatrix::<f64>::zeros(keep + 1, keep + 1);
        for c in 0..keep {
            tn[(c, c)] = theta[c];
            let s = beta * y[(m - 1, c)];
            tn[(c, keep)] = s;
            tn[(keep, c)] = s;
        }
        // re-orthonormalize the kept vectors against rounding drift
        for c in 0..next.len() {
            let (done, rest) = next.split_at_mut(c);
            orthogonalize(locked, &mut rest[0]);
            orthogonalize(done, &mut rest[0]);
            let n = norm(&rest[0]);
            scale(1.0 / n, &mut rest[0]);
        }
        orthogonalize(locked, &mut w);
        orthogonalize(&next, &mut w);
        let nw = norm(&w);
        scale(1.0 / nw, &mut w);
        next.push(std::mem::replace(&mut w, vec![0.0; dim]));
        basis = next;
        // the last column is recomputed on the next step
        t = tn.resize(keep, keep, 0.0);
    }
}
