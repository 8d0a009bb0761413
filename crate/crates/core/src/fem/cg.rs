//! Jacobi-preconditioned conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;

use super::sparse::{dot, norm2, Csr};
use crate::error::{Error, Result};

/// Solve `A x = b` for symmetric positive definite `A` until the relative
/// residual `‖b − A x‖ / ‖b‖` is at most `tol`.
pub fn solve_spd(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.n;
    let mut x = vec![0.0; n];
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(x);
    }
    let dinv: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for _ in 0..max_iter {
        a.matvec(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(Error::SolverFailure { reason: "matrix is not positive definite".into(), residual: res });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res = norm2(&r) / bnorm;
        if res <= tol {
            // Confirm with the true residual to guard against drift.
            a.matvec(&x, &mut q);
            let true_res = norm2(&b.iter().zip(&q).map(|(b, q)| b - q).collect::<Vec<_>>()) / bnorm;
            if true_res <= tol {
                return Ok(x);
            }
            res = true_res;
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverFailure { reason: alloc::format!("no convergence within {max_iter} iterations"), residual: res })
}
