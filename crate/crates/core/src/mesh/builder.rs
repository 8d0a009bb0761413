//! Assembly of structured blocks into one conforming master mesh.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use super::{face_nodes, jacobian_det, nodes_per_element, MasterMesh, Region, COLLAPSED, NONE};
use crate::Point;

/// Absolute distance below which two block nodes are the same vertex.
const WELD_TOL: f64 = 1e-10;
const CELL: f64 = 1e-8;

pub(crate) struct Builder {
    dim: usize,
    vertices: Vec<Point>,
    first_in_cell: BTreeMap<[i64; 3], u32>,
    next_in_cell: Vec<u32>,
    elements: Vec<[u32; 8]>,
    region: Vec<Region>,
    patch: Vec<u32>,
    n_patches: u32,
}

fn key(p: &Point) -> [i64; 3] {
    [(p[0] / CELL).floor() as i64, (p[1] / CELL).floor() as i64, (p[2] / CELL).floor() as i64]
}

impl Builder {
    pub(crate) fn new(dim: usize) -> Self {
        Builder {
            dim,
            vertices: Vec::new(),
            first_in_cell: BTreeMap::new(),
            next_in_cell: Vec::new(),
            elements: Vec::new(),
            region: Vec::new(),
            patch: Vec::new(),
            n_patches: 0,
        }
    }

    /// Id of the vertex at `p`, merging with any existing vertex within the weld tolerance.
    fn vertex(&mut self, p: Point) -> u32 {
        let k = key(&p);
        let dz = if self.dim == 3 { 1 } else { 0 };
        for i in -1..=1 {
            for j in -1..=1 {
                for l in -dz..=dz {
                    let kk = [k[0] + i, k[1] + j, k[2] + l];
                    let mut v = self.first_in_cell.get(&kk).copied().unwrap_or(NONE);
                    while v != NONE {
                        let q = &self.vertices[v as usize];
                        let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) + (q[2] - p[2]).powi(2);
                        if d2 <= WELD_TOL * WELD_TOL {
                            return v;
                        }
                        v = self.next_in_cell[v as usize];
                    }
                }
            }
        }
        let id = self.vertices.len() as u32;
        self.vertices.push(p);
        let head = self.first_in_cell.insert(k, id).unwrap_or(NONE);
        self.next_in_cell.push(head);
        id
    }

    /// Structured 2D block: `ni × nj` nodes given by `point(i, j)`; each cell
    /// is kept when `classify(centroid)` returns a region.
    pub(crate) fn block2(
        &mut self,
        ni: usize,
        nj: usize,
        point: impl Fn(usize, usize) -> Point,
        mut classify: impl FnMut(&Point) -> Option<Region>,
    ) {
        let patch = self.n_patches;
        self.n_patches += 1;
        let pts: Vec<Point> = (0..nj).flat_map(|j| (0..ni).map(move |i| (i, j))).map(|(i, j)| point(i, j)).collect();
        for j in 0..nj - 1 {
            for i in 0..ni - 1 {
                let corners = [pts[i + ni * j], pts[i + 1 + ni * j], pts[i + ni * (j + 1)], pts[i + 1 + ni * (j + 1)]];
                let c = centroid(&corners);
                let Some(r) = classify(&c) else { continue };
                let mut el = [0u32; 8];
                for (k, p) in corners.iter().enumerate() {
                    el[k] = self.vertex(*p);
                }
                let mut ids = [el[0], el[1], el[2], el[3]];
                ids.sort_unstable();
                let distinct = 1 + ids.windows(2).filter(|w| w[0] != w[1]).count();
                if distinct < 3 || el[0] == el[3] || el[1] == el[2] {
                    continue;
                }
                self.push(el, r, patch);
            }
        }
    }

    /// Tensor-product 3D block on the given coordinate lines.
    pub(crate) fn block3(&mut self, xs: &[f64], ys: &[f64], zs: &[f64], mut classify: impl FnMut(&Point) -> Option<Region>) {
        let patch = self.n_patches;
        self.n_patches += 1;
        for k in 0..zs.len() - 1 {
            for j in 0..ys.len() - 1 {
                for i in 0..xs.len() - 1 {
                    let c = [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]), 0.5 * (zs[k] + zs[k + 1])];
                    let Some(r) = classify(&c) else { continue };
                    let mut el = [0u32; 8];
                    for (n, slot) in el.iter_mut().enumerate() {
                        let p = [xs[i + (n & 1)], ys[j + ((n >> 1) & 1)], zs[k + ((n >> 2) & 1)]];
                        *slot = self.vertex(p);
                    }
                    self.push(el, r, patch);
                }
            }
        }
    }

    fn push(&mut self, el: [u32; 8], r: Region, patch: u32) {
        self.elements.push(el);
        self.region.push(r);
        self.patch.push(patch);
    }

    /// Fix element orientation and build face adjacency.
    pub(crate) fn finish(self) -> MasterMesh {
        let dim = self.dim;
        let npe = nodes_per_element(dim);
        let mut elements = self.elements;
        for el in elements.iter_mut() {
            let mut c = [[0.0; 3]; 8];
            for k in 0..npe {
                c[k] = self.vertices[el[k] as usize];
            }
            if jacobian_det(dim, &c, &[0.0; 3]) < 0.0 {
                for k in (0..npe).step_by(2) {
                    el.swap(k, k + 1);
                }
            }
        }
        let nf = 2 * dim;
        let mut neighbors = vec![[NONE; 6]; elements.len()];
        let mut keys: Vec<([u32; 4], u32, u8)> = Vec::with_capacity(elements.len() * nf);
        for (e, el) in elements.iter().enumerate() {
            for f in 0..nf {
                let (ln, n) = face_nodes(dim, f);
                let mut k = [u32::MAX; 4];
                for i in 0..n {
                    k[i] = el[ln[i]];
                }
                k[..n].sort_unstable();
                if k[..n].windows(2).any(|w| w[0] == w[1]) {
                    neighbors[e][f] = COLLAPSED;
                    continue;
                }
                keys.push((k, e as u32, f as u8));
            }
        }
        keys.sort_unstable();
        let mut i = 0;
        while i < keys.len() {
            let mut j = i + 1;
            while j < keys.len() && keys[j].0 == keys[i].0 {
                j += 1;
            }
            debug_assert!(j - i <= 2, "face shared by more than two elements");
            if j - i == 2 {
                let (a, fa) = (keys[i].1, keys[i].2);
                let (b, fb) = (keys[i + 1].1, keys[i + 1].2);
                neighbors[a as usize][fa as usize] = b;
                neighbors[b as usize][fb as usize] = a;
            }
            i = j;
        }
        MasterMesh { dim, vertices: self.vertices, elements, region: self.region, patch: self.patch, neighbors }
    }
}

fn centroid(c: &[Point]) -> Point {
    let n = c.len() as f64;
    let mut m = [0.0; 3];
    for p in c {
        for d in 0..3 {
            m[d] += p[d] / n;
        }
    }
    m
}
