//! L² projection of a defect onto continuous piecewise polynomials of degree
//! m on the flat elements of σ, vanishing on ∂σ.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use super::SigmaTrace;
use crate::error::{Error, Result};
use crate::fem::{Cholesky, Csr};
use crate::Point;

const WELD: f64 = 1e-11;

struct Welder {
    map: BTreeMap<[i64; 3], u32>,
    points: Vec<Point>,
}

impl Welder {
    fn id(&mut self, p: Point) -> u32 {
        let k = [(p[0] / WELD).round() as i64, (p[1] / WELD).round() as i64, (p[2] / WELD).round() as i64];
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(&id) = self.map.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        return id;
                    }
                }
            }
        }
        let id = self.points.len() as u32;
        self.map.insert(k, id);
        self.points.push(p);
        id
    }
}

fn lagrange(m: usize, i: usize, s: f64) -> f64 {
    let node = |j: usize| -1.0 + 2.0 * j as f64 / m as f64;
    (0..=m).filter(|&j| j != i).map(|j| (s - node(j)) / (node(i) - node(j))).product()
}

fn face_point(v: &[Point; 4], dim: usize, s: [f64; 2]) -> Point {
    let mut p = [0.0; 3];
    if dim == 2 {
        let t = 0.5 * (1.0 + s[0]);
        for d in 0..3 {
            p[d] = v[0][d] + t * (v[1][d] - v[0][d]);
        }
    } else {
        let w = [
            0.25 * (1.0 - s[0]) * (1.0 - s[1]),
            0.25 * (1.0 + s[0]) * (1.0 - s[1]),
            0.25 * (1.0 - s[0]) * (1.0 + s[1]),
            0.25 * (1.0 + s[0]) * (1.0 + s[1]),
        ];
        for k in 0..4 {
            for d in 0..3 {
                p[d] += w[k] * v[k][d];
            }
        }
    }
    p
}

/// Degrees of freedom of the continuous degree-`m` space on the partition:
/// per element the global ids of its local nodes, and the constrained flags.
struct Space {
    dofs: Vec<Vec<u32>>,
    constrained: Vec<bool>,
    points: Vec<Point>,
    /// Connected component of each element.
    component: Vec<usize>,
    /// Whether each component touches ∂σ.
    component_open: Vec<bool>,
}

fn build_space(trace: &SigmaTrace, m: usize) -> Space {
    let dim = trace.dim;
    let per = m + 1;
    let mut w = Welder { map: BTreeMap::new(), points: Vec::new() };
    let local: Vec<[f64; 2]> = if dim == 2 {
        (0..per).map(|i| [-1.0 + 2.0 * i as f64 / m as f64, 0.0]).collect()
    } else {
        (0..per * per).map(|k| [-1.0 + 2.0 * (k % per) as f64 / m as f64, -1.0 + 2.0 * (k / per) as f64 / m as f64]).collect()
    };
    let dofs: Vec<Vec<u32>> = trace.partition.iter().map(|fe| local.iter().map(|&s| w.id(face_point(&fe.vertices, dim, s))).collect()).collect();
    // Sub-entities of each element (end points in 2D, edges in 3D) as lists of
    // local node indices; an entity shared by one element only lies on ∂σ.
    let entities: Vec<Vec<usize>> = if dim == 2 {
        vec![vec![0], vec![m]]
    } else {
        vec![
            (0..per).collect(),
            (0..per).map(|i| i + per * m).collect(),
            (0..per).map(|j| per * j).collect(),
            (0..per).map(|j| m + per * j).collect(),
        ]
    };
    let key = |e: usize, ent: &Vec<usize>| -> (u32, u32) {
        let a = dofs[e][ent[0]];
        let b = dofs[e][*ent.last().unwrap()];
        (a.min(b), a.max(b))
    };
    let mut count: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for e in 0..dofs.len() {
        for ent in &entities {
            *count.entry(key(e, ent)).or_default() += 1;
        }
    }
    let mut constrained = vec![false; w.points.len()];
    // Union-find over elements sharing an entity.
    let mut parent: Vec<usize> = (0..dofs.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut owner: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut boundary_elements = Vec::new();
    for e in 0..dofs.len() {
        for ent in &entities {
            let k = key(e, ent);
            if count[&k] == 1 {
                for &l in ent {
                    constrained[dofs[e][l] as usize] = true;
                }
                boundary_elements.push(e);
            }
            match owner.get(&k) {
                Some(&o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, e));
                    parent[a] = b;
                }
                None => {
                    owner.insert(k, e);
                }
            }
        }
    }
    let roots: Vec<usize> = (0..dofs.len()).map(|e| find(&mut parent, e)).collect();
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let component: Vec<usize> = roots
        .iter()
        .map(|r| {
            let n = ids.len();
            *ids.entry(*r).or_insert(n)
        })
        .collect();
    let mut component_open = vec![false; ids.len()];
    for e in boundary_elements {
        component_open[component[e]] = true;
    }
    Space { dofs, constrained, points: w.points, component, component_open }
}

/// Values at the trace samples of the L² projection of the defect onto the
/// continuous piecewise degree-`m` polynomials on the partition that vanish on
/// ∂σ. For `m = 0` the space holds the constants on closed components only.
pub fn clement_project(trace: &SigmaTrace, m: usize) -> Result<Vec<f64>> {
    if trace.partition.is_empty() || trace.samples.is_empty() {
        return Err(Error::Configuration("projection needs a non-empty partition of σ".into()));
    }
    if m > 3 {
        // The trace samples integrate products of degree up to 7 exactly.
        return Err(Error::Configuration(alloc::format!("projection degree {m} above the supported maximum 3")));
    }
    if m == 0 {
        let space = build_space(trace, 1);
        let nc = space.component_open.len();
        let mut num = vec![0.0; nc];
        let mut den = vec![0.0; nc];
        for s in &trace.samples {
            let c = space.component[s.part as usize];
            num[c] += s.weight * s.defect;
            den[c] += s.weight;
        }
        return Ok(trace
            .samples
            .iter()
            .map(|s| {
                let c = space.component[s.part as usize];
                if space.component_open[c] || den[c] == 0.0 {
                    0.0
                } else {
                    num[c] / den[c]
                }
            })
            .collect());
    }
    let space = build_space(trace, m);
    let per = m + 1;
    let mut free = vec![u32::MAX; space.points.len()];
    let mut coords = Vec::new();
    for (i, c) in space.constrained.iter().enumerate() {
        if !c {
            free[i] = coords.len() as u32;
            coords.push(space.points[i]);
        }
    }
    let nf = coords.len();
    if nf == 0 {
        return Ok(vec![0.0; trace.samples.len()]);
    }
    let basis = |s: [f64; 2]| -> Vec<f64> {
        if trace.dim == 2 {
            (0..per).map(|i| lagrange(m, i, s[0])).collect()
        } else {
            (0..per * per).map(|k| lagrange(m, k % per, s[0]) * lagrange(m, k / per, s[1])).collect()
        }
    };
    let mut keys = Vec::new();
    for d in &space.dofs {
        for &a in d {
            for &b in d {
                if free[a as usize] != u32::MAX && free[b as usize] != u32::MAX {
                    keys.push(Csr::key(free[a as usize], free[b as usize]));
                }
            }
        }
    }
    let mut mass = Csr::from_pattern(nf, keys);
    let mut rhs = vec![0.0; nf];
    let mut values = Vec::with_capacity(trace.samples.len());
    for s in &trace.samples {
        let phi = basis(s.s);
        let d = &space.dofs[s.part as usize];
        for (a, pa) in phi.iter().enumerate() {
            let fa = free[d[a] as usize];
            if fa == u32::MAX {
                continue;
            }
            rhs[fa as usize] += s.weight * s.defect * pa;
            for (b, pb) in phi.iter().enumerate() {
                let fb = free[d[b] as usize];
                if fb != u32::MAX {
                    mass.add(fa as usize, fb as usize, s.weight * pa * pb);
                }
            }
        }
        values.push(phi);
    }
    let chol = Cholesky::factor(&mass, Some(&coords))?;
    let (c, _) = chol.solve_refined(&mass, &rhs);
    Ok(trace
        .samples
        .iter()
        .zip(&values)
        .map(|(s, phi)| {
            let d = &space.dofs[s.part as usize];
            phi.iter().enumerate().map(|(a, p)| {
                let fa = free[d[a] as usize];
                if fa == u32::MAX {
                    0.0
                } else {
                    c[fa as usize] * p
                }
            }).sum()
        })
        .collect())
}
