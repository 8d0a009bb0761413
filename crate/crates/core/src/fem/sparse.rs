//! Compressed sparse row matrices.

use alloc::vec;
use alloc::vec::Vec;

/// Square sparse matrix in CSR format with sorted column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

impl Csr {
    /// Zero matrix with the sparsity pattern given by `(row, col)` pairs
    /// (duplicates allowed).
    pub fn from_pattern(n: usize, mut entries: Vec<u64>) -> Self {
        entries.sort_unstable();
        entries.dedup();
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(entries.len());
        for &e in &entries {
            let r = (e >> 32) as usize;
            indptr[r + 1] += 1;
            indices.push(e as u32);
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        let data = vec![0.0; indices.len()];
        Csr { n, indptr, indices, data }
    }

    /// Pattern key of entry `(i, j)` for [`Csr::from_pattern`].
    pub fn key(i: u32, j: u32) -> u64 {
        ((i as u64) << 32) | j as u64
    }

    /// Build from a dense row-major matrix, dropping exact zeros.
    pub fn from_dense(n: usize, a: &[f64]) -> Self {
        let mut keys = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if a[i * n + j] != 0.0 {
                    keys.push(Self::key(i as u32, j as u32));
                }
            }
        }
        let mut m = Self::from_pattern(n, keys);
        for i in 0..n {
            for p in m.indptr[i]..m.indptr[i + 1] {
                m.data[p] = a[i * n + m.indices[p] as usize];
            }
        }
        m
    }

    /// Position of entry `(i, j)` in `data`, if stored.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        row.binary_search(&(j as u32)).ok().map(|k| self.indptr[i] + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.data[p])
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self.position(i, j).expect("entry outside the sparsity pattern");
        self.data[p] += v;
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for p in self.indptr[i]..self.indptr[i + 1] {
                s += self.data[p] * x[self.indices[p] as usize];
            }
            y[i] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|a_ij - a_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for p in self.indptr[i]..self.indptr[i + 1] {
                let j = self.indices[p] as usize;
                m = m.max((self.data[p] - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Principal submatrix on the rows/columns with `map[i] != u32::MAX`,
    /// renumbered to `map[i]`.
    pub fn submatrix(&self, map: &[u32], m: usize) -> Csr {
        let mut indptr = Vec::with_capacity(m + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut rows: Vec<usize> = vec![usize::MAX; m];
        for (i, &mi) in map.iter().enumerate() {
            if mi != u32::MAX {
                rows[mi as usize] = i;
            }
        }
        for &i in &rows {
            let mut row: Vec<(u32, f64)> = (self.indptr[i]..self.indptr[i + 1])
                .filter_map(|p| {
                    let j = map[self.indices[p] as usize];
                    (j != u32::MAX).then_some((j, self.data[p]))
                })
                .collect();
            row.sort_unstable_by_key(|e| e.0);
            for (j, v) in row {
                indices.push(j);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Csr { n: m, indptr, indices, data }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    num_traits::Float::sqrt(dot(a, a))
}
