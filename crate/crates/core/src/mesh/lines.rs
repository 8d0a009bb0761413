//! One-dimensional node distributions: graded grid lines driven by a size field.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

/// Target element size near an interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizeSource {
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
}

/// Size field `h(x) = min(h_max, min_s(h_s + (growth - 1)·dist(x, s)))`.
///
/// Linear growth of the target size with distance is geometric grading:
/// consecutive cells differ by roughly the factor `growth`.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeField {
    pub sources: Vec<SizeSource>,
    pub growth: f64,
    pub h_max: f64,
}

impl SizeField {
    pub fn uniform(h: f64) -> Self {
        SizeField { sources: Vec::new(), growth: 2.0, h_max: h }
    }

    pub fn at(&self, x: f64) -> f64 {
        let mut h = self.h_max;
        for s in &self.sources {
            let d = if x < s.lo {
                s.lo - x
            } else if x > s.hi {
                x - s.hi
            } else {
                0.0
            };
            h = h.min(s.h + (self.growth - 1.0) * d);
        }
        h
    }
}

/// Grid lines on `[lo, hi]` containing every `required` coordinate inside the
/// interval; gaps between required coordinates are filled following `field`.
pub fn graded_lines(lo: f64, hi: f64, required: &[f64], field: &SizeField) -> Vec<f64> {
    assert!(hi > lo, "empty interval");
    let mut req: Vec<f64> = required.iter().copied().filter(|&x| x > lo && x < hi).collect();
    req.push(lo);
    req.push(hi);
    req.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = 1e-12 * (hi - lo);
    req.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let mut out = vec![req[0]];
    for w in req.windows(2) {
        fill_gap(w[0], w[1], field, &mut out);
        out.push(w[1]);
    }
    out
}

/// Push the interior nodes of `(p, q)`: equal increments of `∫ dx / h(x)`.
fn fill_gap(p: f64, q: f64, field: &SizeField, out: &mut Vec<f64>) {
    let mut xs = vec![p];
    let mut x = p;
    while x < q {
        let step = (field.at(x) / 8.0).max((q - p) * 1e-7);
        x = (x + step).min(q);
        xs.push(x);
    }
    let mut cum = vec![0.0];
    for w in xs.windows(2) {
        let inc = 0.5 * (w[1] - w[0]) * (1.0 / field.at(w[0]) + 1.0 / field.at(w[1]));
        cum.push(cum.last().unwrap() + inc);
    }
    let total = *cum.last().unwrap();
    let n = (total.round() as usize).max(1);
    let mut j = 0;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let t = (target - cum[j]) / (cum[j + 1] - cum[j]);
        out.push(xs[j] + t * (xs[j + 1] - xs[j]));
    }
}

/// `n` equal cells on `[a, b]` (n + 1 nodes).
pub fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// Normalised layer parameters `t ∈ [0, 1]` for a ray of representative length
/// `len`, with target size `h_fine` at `t = 0` (`fine_at_end = false`) or at
/// `t = 1`, growing by `growth` and capped at `h_max`.
pub fn layers(len: f64, h_fine: f64, growth: f64, h_max: f64, fine_at_end: bool) -> Vec<f64> {
    let at = if fine_at_end { len } else { 0.0 };
    let field = SizeField { sources: vec![SizeSource { lo: at, hi: at, h: h_fine }], growth, h_max };
    let lines = graded_lines(0.0, len, &[], &field);
    let mut t: Vec<f64> = lines.iter().map(|x| x / len).collect();
    t[0] = 0.0;
    *t.last_mut().unwrap() = 1.0;
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_field_gives_uniform_lines() {
        let l = graded_lines(0.0, 1.0, &[], &SizeField::uniform(0.1));
        assert_eq!(l.len(), 11);
        for (i, x) in l.iter().enumerate() {
            assert!((x - i as f64 / 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn required_lines_are_kept_exactly() {
        let f = SizeField::uniform(0.3);
        let l = graded_lines(0.0, 1.0, &[0.123456789, 0.5], &f);
        assert!(l.contains(&0.123456789) && l.contains(&0.5));
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn grading_ratio_is_respected() {
        let f = SizeField {
            sources: vec![SizeSource { lo: 0.0, hi: 0.0, h: 1e-3 }],
            growth: 1.25,
            h_max: 0.1,
        };
        let l = graded_lines(0.0, 1.0, &[], &f);
        let w: Vec<f64> = l.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(w[0] < 1.3e-3 && w[0] > 0.7e-3, "first cell {}", w[0]);
        for p in w.windows(2) {
            let r = p[1] / p[0];
            assert!(r < 1.35 && r > 0.8, "ratio {r}");
        }
        assert!(w.last().unwrap() <= &0.11);
    }

    #[test]
    fn layers_are_normalised() {
        let t = layers(0.5, 0.01, 1.2, 0.1, true);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 1.0);
        let last = t[t.len() - 1] - t[t.len() - 2];
        let first = t[1] - t[0];
        assert!(last < first);
    }
}
