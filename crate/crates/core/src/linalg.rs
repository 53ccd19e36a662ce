//! Dense symmetric eigensolver.
//!
//! Storage stays in `nalgebra`; the decomposition itself goes through `faer`,
//! run single-threaded so the result does not depend on the thread pool.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::diag::Diag;
use faer::{Mat, Par};
use nalgebra::DMatrix;

fn decompose(m: &DMatrix<f64>, vectors: bool) -> (Vec<f64>, Option<Mat<f64>>) {
    assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), vectors.then(|| Mat::zeros(0, 0)));
    }
    let a = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let mut s = Diag::<f64>::zeros(n);
    let mut u = vectors.then(|| Mat::<f64>::zeros(n, n));
    let compute = if vectors {
        ComputeEigenvectors::Yes
    } else {
        ComputeEigenvectors::No
    };
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n,
        compute,
        Par::Seq,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        a.as_ref(),
        s.as_mut(),
        u.as_mut().map(|u| u.as_mut()),
        Par::Seq,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .expect("symmetric eigendecomposition failed");
    let values = s.column_vector().iter().copied().collect();
    (values, u)
}

fn ascending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Eigenvalues ascending, with the matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (values, u) = decompose(m, true);
    let u = u.expect("eigenvectors requested");
    let order = ascending(&values);
    let sorted = order.iter().map(|&k| values[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |i, c| u[(i, order[c])]);
    (sorted, vectors)
}

/// Eigenvalues ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let (values, _) = decompose(m, false);
    ascending(&values).iter().map(|&k| values[k]).collect()
}
