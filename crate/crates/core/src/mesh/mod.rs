//! Conforming quadrilateral/hexahedral meshes of Ω, Ω0 and F̃_p.
//!
//! Every case is meshed once as a *master* mesh covering Ω ∪ Ω0 ∪ F̃_p, each
//! element labelled with a [`Region`]. The three working meshes are selections
//! of master elements, so their restrictions to Ω⋆ are identical element for
//! element and vertex for vertex; `global_*`/`local_*` maps give the
//! correspondence. Boundary tags follow from the region labels of the two
//! elements sharing a face, and from the exact geometry on the outer boundary.
//!
//! Reference element nodes are numbered lexicographically, node `i` sitting at
//! `ξ_a = -1 + 2·bit_a(i)`:
//!
//! ```text
//!   2 ---- 3        face 2a+s holds the nodes with bit_a = s
//!   |      |        2D: face 0 = {0,2}, 1 = {1,3}, 2 = {0,1}, 3 = {2,3}
//!   0 ---- 1
//! ```

mod builder;
mod layouts;
pub mod lines;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{cross, dot, norm, sub, DomainDescription, Tag};
use crate::quadrature::gauss_legendre;
use crate::Point;

/// Sentinel for "no entry" in index maps.
pub const NONE: u32 = u32::MAX;
/// Neighbour sentinel for collapsed (zero-measure) faces.
pub const COLLAPSED: u32 = u32::MAX - 1;

/// Which part of the geometry an element of the master mesh belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    /// Ω⋆ = Ω \ F_p, shared by Ω and Ω0.
    Star,
    /// Negative component F_n of feature k (in Ω0 only).
    Neg(u16),
    /// Positive component F_p of feature k (in Ω and F̃_p).
    Pos(u16),
    /// Extension-only part F̃_p \ F_p of feature k.
    Ext(u16),
}

impl Region {
    pub fn feature(self) -> Option<usize> {
        match self {
            Region::Star => None,
            Region::Neg(k) | Region::Pos(k) | Region::Ext(k) => Some(k as usize),
        }
    }
}

/// The three working meshes of a case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshKind {
    /// Ω = Ω⋆ ∪ F_p.
    Exact,
    /// Ω0 = Ω⋆ ∪ F_n.
    Defeatured,
    /// F̃_p.
    Extension,
}

impl MeshKind {
    pub fn contains(self, r: Region) -> bool {
        match self {
            MeshKind::Exact => matches!(r, Region::Star | Region::Pos(_)),
            MeshKind::Defeatured => matches!(r, Region::Star | Region::Neg(_)),
            MeshKind::Extension => matches!(r, Region::Pos(_) | Region::Ext(_)),
        }
    }
}

/// Mesh-size controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshOptions {
    /// Elements across the feature size next to the feature.
    pub resolution: usize,
    /// Ratio in (0, 1] of successive element sizes moving toward the feature.
    pub grading: f64,
    /// Elements per unit length far from the feature.
    pub coarse: usize,
    /// Uniform refinement factor applied on top of the other settings.
    pub refine: usize,
}

impl MeshOptions {
    pub fn for_dim(dim: usize) -> Self {
        if dim == 3 {
            MeshOptions { resolution: 6, grading: 0.7, coarse: 8, refine: 1 }
        } else {
            MeshOptions { resolution: 8, grading: 0.8, coarse: 16, refine: 1 }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::ResolutionTooCoarse {
                detail: String::from("at least 2 subdivisions per patch are required"),
                min_resolution: 2,
            });
        }
        if !(self.grading > 0.0 && self.grading <= 1.0) {
            return Err(Error::Configuration(format!("grading ratio {} outside (0, 1]", self.grading)));
        }
        if self.coarse == 0 || self.refine == 0 {
            return Err(Error::Configuration(String::from("coarse and refine must be positive")));
        }
        Ok(())
    }

    /// Target element size next to a feature of characteristic length `size`,
    /// never above the far-field size.
    pub fn h_feature(&self, size: f64) -> f64 {
        (size / (self.resolution * self.refine) as f64).min(self.h_max())
    }

    /// Growth factor of element sizes away from the feature.
    pub fn growth(&self) -> f64 {
        (1.0 / self.grading).powf(1.0 / self.refine as f64)
    }

    /// Element size far from the feature.
    pub fn h_max(&self) -> f64 {
        1.0 / (self.coarse * self.refine) as f64
    }
}

/// The mesh holding every element of the case.
#[derive(Clone, Debug)]
pub struct MasterMesh {
    pub dim: usize,
    pub vertices: Vec<Point>,
    /// Element connectivity (first `2^dim` entries used).
    pub elements: Vec<[u32; 8]>,
    pub region: Vec<Region>,
    pub patch: Vec<u32>,
    /// Neighbour across each face: element id, [`NONE`] or [`COLLAPSED`].
    pub neighbors: Vec<[u32; 6]>,
}

/// A tagged face of a working mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFace {
    /// Local element id.
    pub element: u32,
    /// Local face number `2a + s`.
    pub face: u8,
    pub tag: Tag,
    pub feature: Option<usize>,
}

/// One working mesh (Ω, Ω0 or F̃_p), a selection of master elements.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub dim: usize,
    pub kind: MeshKind,
    pub vertices: Vec<Point>,
    pub elements: Vec<[u32; 8]>,
    pub region: Vec<Region>,
    pub patch_of_element: Vec<u32>,
    /// Master id of each local vertex / element.
    pub global_vertex: Vec<u32>,
    pub global_element: Vec<u32>,
    /// Local id of each master vertex / element, or [`NONE`].
    pub local_vertex: Vec<u32>,
    pub local_element: Vec<u32>,
    pub boundary: Vec<BoundaryFace>,
    pub options: MeshOptions,
}

/// Exact, defeatured and (when F_p ≠ ∅) extension meshes of one case.
#[derive(Clone, Debug)]
pub struct MeshPair {
    pub master: MasterMesh,
    pub exact: Mesh,
    pub defeatured: Mesh,
    pub extension: Option<Mesh>,
}

/// Quadrature sample on a tagged boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub point: Point,
    pub weight: f64,
    /// Unit normal pointing out of the element (out of the mesh).
    pub normal: Point,
    /// Local element id and reference coordinates of the sample.
    pub element: u32,
    pub xi: [f64; 3],
    /// Index of the face in the mesh's boundary list.
    pub face: u32,
    /// Face-local coordinates in `[-1, 1]^{n-1}`.
    pub s: [f64; 2],
}

pub fn nodes_per_element(dim: usize) -> usize {
    1 << dim
}

/// Element-local node numbers of face `face`, ordered lexicographically in the
/// remaining reference axes.
pub fn face_nodes(dim: usize, face: usize) -> ([usize; 4], usize) {
    let a = face / 2;
    let s = face % 2;
    let mut out = [0usize; 4];
    let mut n = 0;
    for i in 0..nodes_per_element(dim) {
        if (i >> a) & 1 == s {
            out[n] = i;
            n += 1;
        }
    }
    (out, n)
}

/// Element reference coordinates of face-local coordinates `s`.
pub fn face_to_element(dim: usize, face: usize, s: [f64; 2]) -> [f64; 3] {
    let a = face / 2;
    let side = if face % 2 == 0 { -1.0 } else { 1.0 };
    let mut xi = [0.0; 3];
    let mut k = 0;
    for (axis, x) in xi.iter_mut().enumerate().take(dim) {
        if axis == a {
            *x = side;
        } else {
            *x = s[k];
            k += 1;
        }
    }
    xi
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn nodes(&self, e: usize) -> &[u32] {
        &self.elements[e][..nodes_per_element(self.dim)]
    }

    pub fn element_coords(&self, e: usize) -> [Point; 8] {
        let mut c = [[0.0; 3]; 8];
        for (k, &v) in self.nodes(e).iter().enumerate() {
            c[k] = self.vertices[v as usize];
        }
        c
    }

    /// Boundary faces carrying `tag`, restricted to `feature` when given.
    pub fn faces<'a>(&'a self, tag: Tag, feature: Option<usize>) -> impl Iterator<Item = (usize, &'a BoundaryFace)> + 'a {
        self.boundary
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.tag == tag && (feature.is_none() || f.feature == feature))
    }

    pub fn has_tag(&self, tag: Tag, feature: Option<usize>) -> bool {
        self.faces(tag, feature).next().is_some()
    }

    /// Longest edge of element `e`.
    pub fn max_edge(&self, e: usize) -> f64 {
        let c = self.element_coords(e);
        let mut h = 0.0f64;
        for i in 0..nodes_per_element(self.dim) {
            for a in 0..self.dim {
                if (i >> a) & 1 == 0 {
                    h = h.max(norm(&sub(&c[i | (1 << a)], &c[i])));
                }
            }
        }
        h
    }

    /// Vertex coordinates of a boundary face, face-local lexicographic order.
    pub fn face_coords(&self, bf: &BoundaryFace) -> ([Point; 4], usize) {
        let (ln, n) = face_nodes(self.dim, bf.face as usize);
        let nodes = self.nodes(bf.element as usize);
        let mut out = [[0.0; 3]; 4];
        for k in 0..n {
            out[k] = self.vertices[nodes[ln[k]] as usize];
        }
        (out, n)
    }

    /// Vertex ids of a boundary face, face-local lexicographic order.
    pub fn face_vertex_ids(&self, bf: &BoundaryFace) -> ([u32; 4], usize) {
        let (ln, n) = face_nodes(self.dim, bf.face as usize);
        let nodes = self.nodes(bf.element as usize);
        let mut out = [0u32; 4];
        for k in 0..n {
            out[k] = nodes[ln[k]];
        }
        (out, n)
    }

    fn element_centroid(&self, e: usize) -> Point {
        let c = self.element_coords(e);
        let n = nodes_per_element(self.dim) as f64;
        let mut m = [0.0; 3];
        for p in c.iter().take(nodes_per_element(self.dim)) {
            for d in 0..3 {
                m[d] += p[d] / n;
            }
        }
        m
    }

    /// Measure of a boundary face and its midpoint.
    pub fn face_measure(&self, bf: &BoundaryFace) -> (f64, Point) {
        let q = face_samples(self, bf, 2);
        let m: f64 = q.iter().map(|p| p.1).sum();
        let (c, n) = self.face_coords(bf);
        let mut mid = [0.0; 3];
        for p in c.iter().take(n) {
            for d in 0..3 {
                mid[d] += p[d] / n as f64;
            }
        }
        (m, mid)
    }
}

/// `(point, weight, normal, s)` samples on one face with `order` Gauss points per direction.
fn face_samples(mesh: &Mesh, bf: &BoundaryFace, order: usize) -> Vec<(Point, f64, Point, [f64; 2])> {
    let (x, w) = gauss_legendre(order);
    let (c, _) = mesh.face_coords(bf);
    let centroid = mesh.element_centroid(bf.element as usize);
    let mut out = Vec::with_capacity(order * order);
    if mesh.dim == 2 {
        let d = sub(&c[1], &c[0]);
        let len = norm(&d);
        let mut nrm = [d[1] / len, -d[0] / len, 0.0];
        let mid = [0.5 * (c[0][0] + c[1][0]), 0.5 * (c[0][1] + c[1][1]), 0.0];
        if dot(&nrm, &sub(&mid, &centroid)) < 0.0 {
            nrm = [-nrm[0], -nrm[1], 0.0];
        }
        for (s, ws) in x.iter().zip(&w) {
            let t = 0.5 * (1.0 + s);
            let p = [c[0][0] + t * d[0], c[0][1] + t * d[1], 0.0];
            out.push((p, ws * 0.5 * len, nrm, [*s, 0.0]));
        }
    } else {
        let mut mid = [0.0; 3];
        for p in c.iter() {
            for k in 0..3 {
                mid[k] += 0.25 * p[k];
            }
        }
        let outward = sub(&mid, &centroid);
        for (j, t) in x.iter().enumerate() {
            for (i, s) in x.iter().enumerate() {
                let n0 = [0.25 * (1.0 - s) * (1.0 - t), 0.25 * (1.0 + s) * (1.0 - t), 0.25 * (1.0 - s) * (1.0 + t), 0.25 * (1.0 + s) * (1.0 + t)];
                let ds = [-0.25 * (1.0 - t), 0.25 * (1.0 - t), -0.25 * (1.0 + t), 0.25 * (1.0 + t)];
                let dt = [-0.25 * (1.0 - s), -0.25 * (1.0 + s), 0.25 * (1.0 - s), 0.25 * (1.0 + s)];
                let mut p = [0.0; 3];
                let mut a = [0.0; 3];
                let mut b = [0.0; 3];
                for k in 0..4 {
                    for d in 0..3 {
                        p[d] += n0[k] * c[k][d];
                        a[d] += ds[k] * c[k][d];
                        b[d] += dt[k] * c[k][d];
                    }
                }
                let cr = cross(&a, &b);
                let jac = norm(&cr);
                let mut nrm = [cr[0] / jac, cr[1] / jac, cr[2] / jac];
                if dot(&nrm, &outward) < 0.0 {
                    nrm = [-nrm[0], -nrm[1], -nrm[2]];
                }
                out.push((p, w[i] * w[j] * jac, nrm, [*s, *t]));
            }
        }
    }
    out
}

/// Gauss samples `(point, weight, outward normal)` on all faces carrying `tag`
/// (and `feature`, when given), `order ∈ 2..=6` points per face direction.
pub fn boundary_quadrature(mesh: &Mesh, tag: Tag, feature: Option<usize>, order: usize) -> Result<Vec<BoundaryPoint>> {
    if !(2..=6).contains(&order) {
        return Err(Error::Configuration(format!("boundary quadrature order {order} outside 2..=6")));
    }
    if !mesh.has_tag(tag, feature) {
        return Err(Error::UnknownTag(format!("{} (feature {:?}) not present on the mesh", tag.name(), feature)));
    }
    let mut out = Vec::new();
    for (i, bf) in mesh.faces(tag, feature) {
        for (point, weight, normal, s) in face_samples(mesh, bf, order) {
            out.push(BoundaryPoint {
                point,
                weight,
                normal,
                element: bf.element,
                xi: face_to_element(mesh.dim, bf.face as usize, s),
                face: i as u32,
                s,
            });
        }
    }
    Ok(out)
}

/// Generate the master mesh of a domain and extract its working meshes.
///
/// Fails when an element touching a feature boundary is larger than a quarter
/// of the feature size.
pub fn generate_pair(domain: &DomainDescription, options: &MeshOptions) -> Result<MeshPair> {
    options.validate()?;
    let master = layouts::build_master(domain, options)?;
    let exact = extract(&master, MeshKind::Exact, domain, options)?;
    let defeatured = extract(&master, MeshKind::Defeatured, domain, options)?;
    let has_ext = master.region.iter().any(|r| MeshKind::Extension.contains(*r));
    let extension = if has_ext { Some(extract(&master, MeshKind::Extension, domain, options)?) } else { None };
    let pair = MeshPair { master, exact, defeatured, extension };
    check_feature_resolution(&pair, domain, options)?;
    Ok(pair)
}

fn check_feature_resolution(pair: &MeshPair, domain: &DomainDescription, options: &MeshOptions) -> Result<()> {
    let meshes = [Some(&pair.exact), Some(&pair.defeatured), pair.extension.as_ref()];
    for mesh in meshes.into_iter().flatten() {
        for bf in &mesh.boundary {
            let Some(k) = bf.feature else { continue };
            if !matches!(bf.tag, Tag::GammaN | Tag::GammaR | Tag::Gamma0P | Tag::Gamma0N | Tag::GammaS) {
                continue;
            }
            let bound = 0.25 * domain.features[k].size;
            let h = mesh.max_edge(bf.element as usize);
            if h > bound * (1.0 + 1e-9) {
                let need = ((options.resolution as f64) * h / bound).ceil() as usize;
                return Err(Error::ResolutionTooCoarse {
                    detail: format!(
                        "element of size {h:.3e} on {} of feature {k} exceeds a quarter of the feature size {:.3e}",
                        bf.tag.name(),
                        domain.features[k].size
                    ),
                    min_resolution: need.max(options.resolution + 1),
                });
            }
        }
    }
    Ok(())
}

/// Select the elements of one working mesh and tag its boundary faces.
fn extract(master: &MasterMesh, kind: MeshKind, domain: &DomainDescription, options: &MeshOptions) -> Result<Mesh> {
    let dim = master.dim;
    let npe = nodes_per_element(dim);
    let mut local_element = vec![NONE; master.elements.len()];
    let mut global_element = Vec::new();
    for (e, r) in master.region.iter().enumerate() {
        if kind.contains(*r) {
            local_element[e] = global_element.len() as u32;
            global_element.push(e as u32);
        }
    }
    let mut local_vertex = vec![NONE; master.vertices.len()];
    for &e in &global_element {
        for &v in &master.elements[e as usize][..npe] {
            local_vertex[v as usize] = 0;
        }
    }
    let mut global_vertex = Vec::new();
    for (v, slot) in local_vertex.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = global_vertex.len() as u32;
            global_vertex.push(v as u32);
        }
    }
    let vertices: Vec<Point> = global_vertex.iter().map(|&v| master.vertices[v as usize]).collect();
    let elements: Vec<[u32; 8]> = global_element
        .iter()
        .map(|&e| {
            let mut c = [0u32; 8];
            for k in 0..npe {
                c[k] = local_vertex[master.elements[e as usize][k] as usize];
            }
            c
        })
        .collect();
    let region: Vec<Region> = global_element.iter().map(|&e| master.region[e as usize]).collect();
    let patch_of_element: Vec<u32> = global_element.iter().map(|&e| master.patch[e as usize]).collect();
    let mut mesh = Mesh {
        dim,
        kind,
        vertices,
        elements,
        region,
        patch_of_element,
        global_vertex,
        global_element,
        local_vertex,
        local_element,
        boundary: Vec::new(),
        options: *options,
    };
    let mut boundary = Vec::new();
    for (le, &ge) in mesh.global_element.iter().enumerate() {
        let me = master.region[ge as usize];
        for f in 0..2 * dim {
            let nb = master.neighbors[ge as usize][f];
            if nb == COLLAPSED {
                continue;
            }
            let other = if nb == NONE { None } else { Some(master.region[nb as usize]) };
            if other.is_some_and(|r| kind.contains(r)) {
                continue;
            }
            let mut bf = BoundaryFace { element: le as u32, face: f as u8, tag: Tag::NeumannRest, feature: None };
            match classify_face(kind, me, other) {
                Some((tag, k)) => {
                    bf.tag = tag;
                    bf.feature = Some(k);
                }
                None => {
                    let (len, mid) = mesh.face_measure(&bf);
                    let scale = if dim == 3 { len.sqrt() } else { len };
                    bf.tag = if domain.is_dirichlet(&mid, scale) { Tag::Dirichlet } else { Tag::NeumannRest };
                }
            }
            boundary.push(bf);
        }
    }
    mesh.boundary = boundary;
    Ok(mesh)
}

/// Tag of a face between an element of region `me` (inside the mesh) and a
/// neighbour of region `other` (outside the mesh, or none). `None` means the
/// face lies on the outer boundary and is classified geometrically.
fn classify_face(kind: MeshKind, me: Region, other: Option<Region>) -> Option<(Tag, usize)> {
    use Region::*;
    match (kind, me, other) {
        (MeshKind::Exact, Star, Some(Neg(k))) => Some((Tag::GammaN, k as usize)),
        (MeshKind::Exact, Star, _) => None,
        (MeshKind::Exact, Pos(k), Some(Ext(_))) => Some((Tag::GammaR, k as usize)),
        (MeshKind::Exact, Pos(k), _) => Some((Tag::GammaS, k as usize)),
        (MeshKind::Defeatured, Star, Some(Pos(k))) => Some((Tag::Gamma0P, k as usize)),
        (MeshKind::Defeatured, Star, _) => None,
        (MeshKind::Defeatured, Neg(k), _) => Some((Tag::Gamma0N, k as usize)),
        (MeshKind::Extension, Pos(k), Some(Star)) => Some((Tag::Gamma0P, k as usize)),
        (MeshKind::Extension, Pos(k), _) => Some((Tag::GammaS, k as usize)),
        (MeshKind::Extension, Ext(k), _) => Some((Tag::GammaTilde, k as usize)),
        _ => None,
    }
}

/// Jacobian determinant of an element at reference point `xi`.
pub fn jacobian_det(dim: usize, coords: &[Point; 8], xi: &[f64; 3]) -> f64 {
    let (_, dn) = crate::fem::shape(dim, xi);
    let mut j = [[0.0; 3]; 3];
    for k in 0..nodes_per_element(dim) {
        for a in 0..dim {
            for b in 0..dim {
                j[a][b] += coords[k][a] * dn[k][b];
            }
        }
    }
    if dim == 2 {
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    } else {
        j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
            + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0])
    }
}
