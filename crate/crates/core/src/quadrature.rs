//! Gauss–Legendre rules on `[-1, 1]` and their tensor products.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Computed by Newton iteration on the Legendre recurrence; exact for
/// polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a Gauss rule needs at least one point");
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    // Newton started from cos(...) yields descending nodes.
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let pm = if n == 0 { 0.0 } else { p0 };
    let nf = n as f64;
    (pn, nf * (x * pn - pm) / (x * x - 1.0))
}

/// Tensor-product rule in `dim` reference coordinates: `(xi, weight)` pairs.
pub fn tensor_rule(dim: usize, n: usize) -> Vec<([f64; 3], f64)> {
    let (x, w) = gauss_legendre(n);
    let mut out = Vec::with_capacity(n.pow(dim as u32));
    match dim {
        1 => {
            for i in 0..n {
                out.push(([x[i], 0.0, 0.0], w[i]));
            }
        }
        2 => {
            for j in 0..n {
                for i in 0..n {
                    out.push(([x[i], x[j], 0.0], w[i] * w[j]));
                }
            }
        }
        3 => {
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        out.push(([x[i], x[j], x[k]], w[i] * w[j] * w[k]));
                    }
                }
            }
        }
        _ => panic!("tensor rules exist for dimensions 1 to 3"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in 1..=8 {
            let (_, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n = {n}: {s}");
        }
    }

    #[test]
    fn integrates_monomials_exactly() {
        for n in 1..=6 {
            let (x, w) = gauss_legendre(n);
            for p in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n = {n}, p = {p}");
            }
        }
    }

    #[test]
    fn known_two_point_rule() {
        let (x, w) = gauss_legendre(2);
        let s = 1.0 / 3.0f64.sqrt();
        assert!((x[0] + s).abs() < 1e-15 && (x[1] - s).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
    }
}
