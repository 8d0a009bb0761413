//! Sparse Cholesky factorisation with a coordinate nested-dissection ordering.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use super::sparse::{norm2, Csr};
use crate::error::{Error, Result};
use crate::Point;

const NONE: usize = usize::MAX;
const LEAF: usize = 48;

/// `P A Pᵀ = L Lᵀ`, `L` stored by columns with the diagonal first.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    /// New index → original index.
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<u32>,
    lx: Vec<f64>,
}

/// Fill-reducing ordering: recursive median bisection along the longest
/// coordinate axis; vertices of the upper half adjacent to the lower half form
/// the separator, numbered last.
pub fn nested_dissection(a: &Csr, coords: &[Point]) -> Vec<usize> {
    let n = a.n;
    let mut order = Vec::with_capacity(n);
    let mut mark = vec![0u32; n];
    let mut stamp = 0u32;
    let all: Vec<u32> = (0..n as u32).collect();
    dissect(a, coords, all, &mut mark, &mut stamp, &mut order);
    order
}

fn dissect(a: &Csr, coords: &[Point], mut set: Vec<u32>, mark: &mut [u32], stamp: &mut u32, order: &mut Vec<usize>) {
    if set.len() <= LEAF {
        order.extend(set.iter().map(|&v| v as usize));
        return;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &v in &set {
        for d in 0..3 {
            lo[d] = lo[d].min(coords[v as usize][d]);
            hi[d] = hi[d].max(coords[v as usize][d]);
        }
    }
    let axis = (0..3).max_by(|&x, &y| (hi[x] - lo[x]).partial_cmp(&(hi[y] - lo[y])).unwrap()).unwrap();
    let mid = set.len() / 2;
    set.select_nth_unstable_by(mid, |&p, &q| {
        let (cp, cq) = (coords[p as usize][axis], coords[q as usize][axis]);
        cp.partial_cmp(&cq).unwrap().then(p.cmp(&q))
    });
    let upper = set.split_off(mid);
    let lower = set;
    *stamp += 1;
    let s = *stamp;
    for &v in &lower {
        mark[v as usize] = s;
    }
    let mut rest = Vec::with_capacity(upper.len());
    let mut sep = Vec::new();
    for &v in &upper {
        let v_us = v as usize;
        let touches = (a.indptr[v_us]..a.indptr[v_us + 1]).any(|p| mark[a.indices[p] as usize] == s);
        if touches {
            sep.push(v);
        } else {
            rest.push(v);
        }
    }
    if rest.is_empty() || lower.is_empty() {
        // No useful split (tiny or degenerate set).
        order.extend(lower.iter().chain(&sep).map(|&v| v as usize));
        return;
    }
    sep.sort_unstable();
    dissect(a, coords, lower, mark, stamp, order);
    dissect(a, coords, rest, mark, stamp, order);
    order.extend(sep.iter().map(|&v| v as usize));
}

impl Cholesky {
    /// Factor a symmetric positive definite matrix. `coords` drive the ordering;
    /// without them the natural order is used.
    pub fn factor(a: &Csr, coords: Option<&[Point]>) -> Result<Cholesky> {
        let n = a.n;
        let perm = match coords {
            Some(c) => nested_dissection(a, c),
            None => (0..n).collect(),
        };
        let mut pinv = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            pinv[p] = k;
        }
        // Upper triangle of C = P A Pᵀ by columns: rows i ≤ j of column j.
        let mut cp = vec![0usize; n + 1];
        for old in 0..n {
            let j = pinv[old];
            for p in a.indptr[old]..a.indptr[old + 1] {
                if pinv[a.indices[p] as usize] <= j {
                    cp[j + 1] += 1;
                }
            }
        }
        for j in 0..n {
            cp[j + 1] += cp[j];
        }
        let mut ci = vec![0usize; cp[n]];
        let mut cx = vec![0.0; cp[n]];
        let mut next = cp.clone();
        for old in 0..n {
            let j = pinv[old];
            for p in a.indptr[old]..a.indptr[old + 1] {
                let i = pinv[a.indices[p] as usize];
                if i <= j {
                    ci[next[j]] = i;
                    cx[next[j]] = a.data[p];
                    next[j] += 1;
                }
            }
        }
        // Elimination tree.
        let mut parent = vec![NONE; n];
        let mut ancestor = vec![NONE; n];
        for k in 0..n {
            for &i0 in &ci[cp[k]..cp[k + 1]] {
                let mut i = i0;
                while i != NONE && i < k {
                    let inext = ancestor[i];
                    ancestor[i] = k;
                    if inext == NONE {
                        parent[i] = k;
                    }
                    i = inext;
                }
            }
        }
        // Column counts from the row patterns.
        let mut w = vec![NONE; n];
        let mut stack = vec![0usize; n];
        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = ereach(&cp, &ci, k, &parent, &mut w, &mut stack);
            for &j in &stack[top..n] {
                counts[j] += 1;
            }
        }
        let mut lp = vec![0usize; n + 1];
        for j in 0..n {
            lp[j + 1] = lp[j] + counts[j];
        }
        let nnz = lp[n];
        let mut li = vec![0u32; nnz];
        let mut lx = vec![0.0; nnz];
        let mut c = lp.clone();
        let mut x = vec![0.0; n];
        w.iter_mut().for_each(|v| *v = NONE);
        for k in 0..n {
            let top = ereach(&cp, &ci, k, &parent, &mut w, &mut stack);
            for p in cp[k]..cp[k + 1] {
                x[ci[p]] = cx[p];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &j in &stack[top..n] {
                let lkj = x[j] / lx[lp[j]];
                x[j] = 0.0;
                for p in lp[j] + 1..c[j] {
                    x[li[p] as usize] -= lx[p] * lkj;
                }
                d -= lkj * lkj;
                li[c[j]] = k as u32;
                lx[c[j]] = lkj;
                c[j] += 1;
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::SolverFailure { reason: alloc::format!("matrix not positive definite at pivot {k}"), residual: d });
            }
            li[c[k]] = k as u32;
            lx[c[k]] = d.sqrt();
            c[k] += 1;
        }
        Ok(Cholesky { n, perm, lp, li, lx })
    }

    pub fn nnz(&self) -> usize {
        self.lx.len()
    }

    /// Solve `A x = b` with the factorisation.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            y[j] /= self.lx[self.lp[j]];
            let yj = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                y[self.li[p] as usize] -= self.lx[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let mut s = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                s -= self.lx[p] * y[self.li[p] as usize];
            }
            y[j] = s / self.lx[self.lp[j]];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Solve with one step of iterative refinement against `a`; returns the
    /// solution and its relative residual.
    pub fn solve_refined(&self, a: &Csr, b: &[f64]) -> (Vec<f64>, f64) {
        let mut x = self.solve(b);
        let mut ax = vec![0.0; self.n];
        a.matvec(&x, &mut ax);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        let dx = self.solve(&r);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        a.matvec(&x, &mut ax);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        let bn = norm2(b);
        (x, if bn > 0.0 { norm2(&r) / bn } else { norm2(&r) })
    }
}

/// Nonzero pattern of row `k` of `L` (columns `< k`), returned in
/// `stack[top..n]` in topological order.
fn ereach(cp: &[usize], ci: &[usize], k: usize, parent: &[usize], w: &mut [usize], stack: &mut [usize]) -> usize {
    let n = parent.len();
    let mut top = n;
    w[k] = k;
    for &i0 in &ci[cp[k]..cp[k + 1]] {
        let mut i = i0;
        if i > k {
            continue;
        }
        let mut len = 0;
        while w[i] != k {
            stack[len] = i;
            len += 1;
            w[i] = k;
            i = parent[i];
        }
        while len > 0 {
            len -= 1;
            top -= 1;
            stack[top] = stack[len];
        }
    }
    top
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_2d(m: usize) -> (Csr, Vec<Point>) {
        let n = m * m;
        let mut dense = vec![0.0; n * n];
        let mut coords = Vec::new();
        for j in 0..m {
            for i in 0..m {
                let k = i + m * j;
                coords.push([i as f64, j as f64, 0.0]);
                dense[k * n + k] = 4.0;
                if i > 0 {
                    dense[k * n + k - 1] = -1.0;
                }
                if i + 1 < m {
                    dense[k * n + k + 1] = -1.0;
                }
                if j > 0 {
                    dense[k * n + k - m] = -1.0;
                }
                if j + 1 < m {
                    dense[k * n + k + m] = -1.0;
                }
            }
        }
        (Csr::from_dense(n, &dense), coords)
    }

    #[test]
    fn factor_solves_grid_laplacian() {
        let (a, coords) = laplace_2d(20);
        let b: Vec<f64> = (0..a.n).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        for c in [None, Some(coords.as_slice())] {
            let f = Cholesky::factor(&a, c).unwrap();
            let (x, res) = f.solve_refined(&a, &b);
            assert!(res < 1e-13, "residual {res}");
            assert_eq!(x.len(), a.n);
        }
    }

    #[test]
    fn ordering_is_a_permutation_and_reduces_fill() {
        let (a, coords) = laplace_2d(40);
        let mut p = nested_dissection(&a, &coords);
        let natural = Cholesky::factor(&a, None).unwrap().nnz();
        let nd = Cholesky::factor(&a, Some(&coords)).unwrap().nnz();
        assert!(nd < natural, "nd {nd} natural {natural}");
        p.sort_unstable();
        assert!(p.iter().enumerate().all(|(i, &v)| i == v));
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = Csr::from_dense(2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(Cholesky::factor(&a, None).is_err());
    }
}
