//! Dense linear-algebra helpers and the brute-force reference paths.
//!
//! [`DenseExp`] and [`EigenEvolver`] are general-purpose evaluators that know
//! nothing about the model's block structure. They serve as the independent
//! side of every closed-form comparison in this crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |M - M†|`
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `[a, b] = ab - ba`
pub fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

/// `<psi|op|psi>`, real part. The imaginary part vanishes for Hermitian `op`.
pub fn expectation(op: &DMatrix<C64>, psi: &DVector<C64>) -> f64 {
    psi.dotc(&(op * psi)).re
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Connected components of the coupling graph `i ~ j  <=>  m[i,j] != 0`.
///
/// Each component spans a subspace invariant under `m`. Components are
/// returned with sorted indices, ordered by their smallest index.
pub fn invariant_blocks(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = id;
        let mut cursor = 0;
        while cursor < members.len() {
            let i = members[cursor];
            cursor += 1;
            for j in 0..n {
                if label[j] == usize::MAX && (m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0)) {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// The principal submatrix on `idx`.
pub fn submatrix(m: &DMatrix<C64>, idx: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Eigenvalues of a Hermitian matrix, solved block by block over its
/// [`invariant_blocks`]. Ascending.
pub fn blockwise_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows());
    for block in invariant_blocks(m) {
        out.extend(hermitian_eigenvalues(&submatrix(m, &block)));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenpairs of a Hermitian matrix solved block by block; the eigenvectors are
/// embedded back into the full space. Ascending in eigenvalue.
pub fn blockwise_eigen(m: &DMatrix<C64>) -> Vec<(f64, DVector<C64>)> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n);
    for block in invariant_blocks(m) {
        let (vals, vecs) = hermitian_eigen(&submatrix(m, &block));
        for (k, v) in vals.into_iter().enumerate() {
            let mut full = DVector::zeros(n);
            for (r, &i) in block.iter().enumerate() {
                full[i] = vecs[(r, k)];
            }
            out.push((v, full));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `exp(-i H tau)` by nalgebra's scaling-and-squaring Padé exponential.
pub struct DenseExp;

impl DenseExp {
    pub fn propagator(h: &DMatrix<C64>, tau: f64) -> DMatrix<C64> {
        (h * (-I * tau)).exp()
    }
}

/// Time evolution through a full eigendecomposition of `H`.
pub struct EigenEvolver {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl EigenEvolver {
    pub fn new(h: &DMatrix<C64>) -> Self {
        let (values, vectors) = hermitian_eigen(h);
        Self { values, vectors }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evolve(&self, psi: &DVector<C64>, tau: f64) -> DVector<C64> {
        let mut coeffs = self.vectors.adjoint() * psi;
        for (c, &e) in coeffs.iter_mut().zip(&self.values) {
            *c *= (-I * e * tau).exp();
        }
        &self.vectors * coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_y() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -I, I, C64::new(0.0, 0.0)])
    }

    #[test]
    fn dense_exp_of_pauli() {
        // exp(-i sigma_y t) = cos t - i sin t sigma_y
        let t = 0.7;
        let u = DenseExp::propagator(&pauli_y(), t);
        let expected = DMatrix::<C64>::identity(2, 2) * C64::new(t.cos(), 0.0) - pauli_y() * (I * t.sin());
        assert!(max_abs(&(u - expected)) < 1e-14);
    }

    #[test]
    fn eigen_evolver_matches_dense_exp() {
        let h = DMatrix::from_fn(5, 5, |i, j| {
            let x = (i * 7 + j * 3) as f64 * 0.1;
            if i == j {
                C64::new(x, 0.0)
            } else if i < j {
                C64::new(x.sin(), x.cos())
            } else {
                let y = (j * 7 + i * 3) as f64 * 0.1;
                C64::new(y.sin(), -y.cos())
            }
        });
        assert!(hermiticity_defect(&h) < 1e-15);
        let psi = DVector::from_fn(5, |i, _| C64::new(1.0 / (i as f64 + 1.0), 0.2));
        let psi = &psi / C64::new(psi.norm(), 0.0);
        let a = EigenEvolver::new(&h).evolve(&psi, 2.3);
        let b = DenseExp::propagator(&h, 2.3) * &psi;
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn blocks_of_direct_sum() {
        let mut m = DMatrix::<C64>::zeros(5, 5);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 3)] = C64::new(0.0, 2.0);
        m[(3, 1)] = C64::new(0.0, -2.0);
        m[(2, 4)] = C64::new(1.0, 0.0);
        m[(4, 2)] = C64::new(1.0, 0.0);
        let blocks = invariant_blocks(&m);
        assert_eq!(blocks, vec![vec![0], vec![1, 3], vec![2, 4]]);
        let dense = hermitian_eigenvalues(&m);
        let block = blockwise_eigenvalues(&m);
        for (a, b) in dense.iter().zip(&block) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
