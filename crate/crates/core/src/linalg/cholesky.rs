//! Up-looking sparse Cholesky `P A Pᵀ = L Lᵀ`.
//!
//! Row `k` of `L` is found by a sparse triangular solve whose pattern is the
//! reach of row `k` of `A` in the elimination tree.

use super::ordering::{approximate_minimum_degree, invert};
use super::{CsrMatrix, LinalgError};

const NONE: usize = usize::MAX;

/// Numeric factor stored column-wise, diagonal entry first in every column.
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

fn etree(c: &CsrMatrix) -> Vec<usize> {
    let n = c.nrows();
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for &j in c.row(k).0 {
            if j >= k {
                break;
            }
            let mut i = j;
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

/// Pattern of row `k` of `L` (excluding the diagonal) in topological order,
/// written to `stack[top..]`; returns `top`.
fn ereach(c: &CsrMatrix, k: usize, parent: &[usize], stamp: &mut [usize], stack: &mut [usize]) -> usize {
    let n = c.nrows();
    let mut top = n;
    stamp[k] = k;
    for &j in c.row(k).0 {
        if j >= k {
            break;
        }
        let mut len = 0;
        let mut i = j;
        while stamp[i] != k {
            stack[len] = i;
            len += 1;
            stamp[i] = k;
            i = parent[i];
        }
        while len > 0 {
            top -= 1;
            len -= 1;
            stack[top] = stack[len];
        }
    }
    top
}

impl SparseCholesky {
    /// Factorizes with an approximate-minimum-degree ordering.
    pub fn factorize(a: &CsrMatrix) -> Result<Self, LinalgError> {
        let perm = approximate_minimum_degree(a);
        Self::factorize_with(a, perm)
    }

    pub fn factorize_with(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self, LinalgError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(LinalgError::ShapeMismatch { op: "cholesky", left: (n, a.ncols()), right: (n, n) });
        }
        let c = a.permute_symmetric(&perm);
        let parent = etree(&c);
        let mut stamp = vec![NONE; n];
        let mut stack = vec![0; n];

        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = ereach(&c, k, &parent, &mut stamp, &mut stack);
            for &i in &stack[top..n] {
                counts[i] += 1;
            }
        }
        let mut col_ptr = vec![0; n + 1];
        for k in 0..n {
            col_ptr[k + 1] = col_ptr[k] + counts[k];
        }
        let nnz = col_ptr[n];
        let mut row_idx = vec![0; nnz];
        let mut values = vec![0.0; nnz];
        let mut next = col_ptr[..n].to_vec();
        let mut x = vec![0.0; n];
        stamp.fill(NONE);

        for k in 0..n {
            let top = ereach(&c, k, &parent, &mut stamp, &mut stack);
            let (cols, vals) = c.row(k);
            x[k] = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                if j > k {
                    break;
                }
                x[j] = v;
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..n] {
                let lki = x[i] / values[col_ptr[i]];
                x[i] = 0.0;
                for p in col_ptr[i] + 1..next[i] {
                    x[row_idx[p]] -= values[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                next[i] += 1;
                row_idx[p] = k;
                values[p] = lki;
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { pivot: perm[k], value: d });
            }
            let p = next[k];
            next[k] += 1;
            row_idx[p] = k;
            values[p] = d.sqrt();
        }
        Ok(SparseCholesky { n, perm, col_ptr, row_idx, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros of `L` including the diagonal.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        self.solve_permuted_in_place(&mut x);
        let mut out = vec![0.0; self.n];
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = x[k];
        }
        out
    }

    fn solve_permuted_in_place(&self, x: &mut [f64]) {
        for j in 0..self.n {
            let p0 = self.col_ptr[j];
            x[j] /= self.values[p0];
            let xj = x[j];
            if xj != 0.0 {
                for p in p0 + 1..self.col_ptr[j + 1] {
                    x[self.row_idx[p]] -= self.values[p] * xj;
                }
            }
        }
        for j in (0..self.n).rev() {
            let p0 = self.col_ptr[j];
            let mut s = x[j];
            for p in p0 + 1..self.col_ptr[j + 1] {
                s -= self.values[p] * x[self.row_idx[p]];
            }
            x[j] = s / self.values[p0];
        }
    }

    /// Inverse permutation (original index → elimination step).
    pub fn inverse_perm(&self) -> Vec<usize> {
        invert(&self.perm)
    }
}
