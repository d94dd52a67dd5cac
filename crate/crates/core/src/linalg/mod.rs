//! Sparse and dense kernels: CSR storage, fill-reducing ordering, Cholesky
//! factorizations and the vector operations used by the Krylov solvers.

mod cholesky;
mod csr;
mod dense;
mod mtx;
pub mod ordering;

use thiserror::Error;

pub use cholesky::SparseCholesky;
pub use csr::CsrMatrix;
pub use dense::DenseCholesky;
pub use mtx::{read_matrix_market, read_vector_market, write_matrix_market, write_vector_market};

/// Blocks with fewer rows are factorized densely.
pub const DENSE_THRESHOLD: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("{op}: shape mismatch {left:?} vs {right:?}")]
    ShapeMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not positive definite: pivot {value:e} at row {pivot}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("invalid matrix structure: {0}")]
    InvalidStructure(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FactorOptions {
    /// Iterative refinement steps applied after every solve (0 disables).
    pub refinement_steps: usize,
}

#[derive(Debug, Clone)]
enum Factor {
    Dense(DenseCholesky),
    Sparse(SparseCholesky),
}

/// Cholesky factorization of an SPD matrix; read-only after construction, so
/// one factorization serves concurrent solves.
#[derive(Debug, Clone)]
pub struct Factorization {
    factor: Factor,
    refine: Option<(CsrMatrix, usize)>,
}

impl Factorization {
    pub fn new(a: &CsrMatrix) -> Result<Self, LinalgError> {
        Self::with_options(a, FactorOptions::default())
    }

    pub fn with_options(a: &CsrMatrix, options: FactorOptions) -> Result<Self, LinalgError> {
        let factor = if a.nrows() < DENSE_THRESHOLD {
            Factor::Dense(DenseCholesky::factorize(a)?)
        } else {
            Factor::Sparse(SparseCholesky::factorize(a)?)
        };
        let refine = (options.refinement_steps > 0).then(|| (a.clone(), options.refinement_steps));
        Ok(Factorization { factor, refine })
    }

    pub fn dim(&self) -> usize {
        match &self.factor {
            Factor::Dense(f) => f.dim(),
            Factor::Sparse(f) => f.dim(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.factor, Factor::Dense(_))
    }

    fn solve_once(&self, b: &[f64]) -> Vec<f64> {
        match &self.factor {
            Factor::Dense(f) => f.solve(b),
            Factor::Sparse(f) => f.solve(b),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.solve_once(b);
        if let Some((a, steps)) = &self.refine {
            for _ in 0..*steps {
                let ax = a.spmv(&x);
                let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
                let dx = self.solve_once(&r);
                axpy(1.0, &dx, &mut x);
            }
        }
        x
    }
}

/// Sequential dot product (fixed summation order).
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson_2d(m: usize) -> CsrMatrix {
        let n = m * m;
        let mut t = Vec::new();
        for j in 0..m {
            for i in 0..m {
                let k = i + m * j;
                t.push((k, k, 4.0));
                if i + 1 < m {
                    t.push((k, k + 1, -1.0));
                    t.push((k + 1, k, -1.0));
                }
                if j + 1 < m {
                    t.push((k, k + m, -1.0));
                    t.push((k + m, k, -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn dense_and_sparse_paths_agree() {
        let a = poisson_2d(20);
        let b: Vec<f64> = (0..400).map(|i| ((i * 7) % 13) as f64 - 6.0).collect();
        let sparse = Factorization::new(&a).unwrap();
        assert!(!sparse.is_dense());
        let dense = DenseCholesky::factorize(&a).unwrap();
        let xs = sparse.solve(&b);
        let xd = dense.solve(&b);
        assert!(xs.iter().zip(&xd).all(|(u, v)| (u - v).abs() < 1e-12));
        let r = a.spmv(&xs);
        let res: f64 = norm2(&r.iter().zip(&b).map(|(u, v)| u - v).collect::<Vec<_>>()) / norm2(&b);
        assert!(res < 1e-12);
    }

    #[test]
    fn refinement_keeps_solution() {
        let a = poisson_2d(8);
        let b = vec![1.0; 64];
        let plain = Factorization::new(&a).unwrap().solve(&b);
        let refined = Factorization::with_options(&a, FactorOptions { refinement_steps: 2 }).unwrap().solve(&b);
        assert!(plain.iter().zip(&refined).all(|(u, v)| (u - v).abs() < 1e-12));
    }
}
