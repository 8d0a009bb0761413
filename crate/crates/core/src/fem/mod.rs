//! Bilinear/trilinear Galerkin solver for the Poisson problems and the field
//! post-processing (flux traces, H¹-seminorm differences).

mod cg;
mod cholesky;
mod data;
mod sparse;

pub use cg::solve_spd;
pub use cholesky::{nested_dissection, Cholesky};
pub use data::{scalar, zero, ProblemData, ScalarFn};
pub use sparse::Csr;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::Tag;
use crate::mesh::{boundary_quadrature, nodes_per_element, BoundaryPoint, Mesh, Region, NONE};
use crate::quadrature::tensor_rule;
use crate::Point;

/// Gauss points per direction for volume integrals.
pub const VOLUME_ORDER: usize = 3;
/// Gauss points per direction for boundary integrals.
pub const BOUNDARY_ORDER: usize = 4;

/// Values and reference gradients of the `2^dim` nodal basis functions at `xi`.
pub fn shape(dim: usize, xi: &[f64; 3]) -> ([f64; 8], [[f64; 3]; 8]) {
    let mut n = [0.0; 8];
    let mut dn = [[0.0; 3]; 8];
    for i in 0..nodes_per_element(dim) {
        let mut f = [0.0; 3];
        let mut df = [0.0; 3];
        for a in 0..dim {
            let s = if (i >> a) & 1 == 1 { 1.0 } else { -1.0 };
            f[a] = 0.5 * (1.0 + s * xi[a]);
            df[a] = 0.5 * s;
        }
        n[i] = (0..dim).map(|a| f[a]).product();
        for a in 0..dim {
            dn[i][a] = (0..dim).map(|b| if a == b { df[b] } else { f[b] }).product();
        }
    }
    (n, dn)
}

/// Geometry of an element at one reference point.
#[derive(Clone, Copy, Debug)]
pub struct MappedPoint {
    pub x: Point,
    pub det: f64,
    /// Basis values.
    pub phi: [f64; 8],
    /// Physical basis gradients.
    pub grad: [[f64; 3]; 8],
}

/// Map reference point `xi` of an element with node coordinates `coords`.
pub fn map_point(dim: usize, coords: &[Point; 8], xi: &[f64; 3]) -> MappedPoint {
    let (phi, dn) = shape(dim, xi);
    let npe = nodes_per_element(dim);
    let mut x = [0.0; 3];
    let mut j = [[0.0; 3]; 3];
    for k in 0..npe {
        for a in 0..dim {
            x[a] += phi[k] * coords[k][a];
            for b in 0..dim {
                j[a][b] += coords[k][a] * dn[k][b];
            }
        }
    }
    // inv[b][a] = ∂ξ_b/∂x_a
    let mut inv = [[0.0; 3]; 3];
    let det;
    if dim == 2 {
        det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        inv[0][0] = j[1][1] / det;
        inv[0][1] = -j[0][1] / det;
        inv[1][0] = -j[1][0] / det;
        inv[1][1] = j[0][0] / det;
    } else {
        let c00 = j[1][1] * j[2][2] - j[1][2] * j[2][1];
        let c01 = j[1][2] * j[2][0] - j[1][0] * j[2][2];
        let c02 = j[1][0] * j[2][1] - j[1][1] * j[2][0];
        det = j[0][0] * c00 + j[0][1] * c01 + j[0][2] * c02;
        inv[0][0] = c00 / det;
        inv[1][0] = c01 / det;
        inv[2][0] = c02 / det;
        inv[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det;
        inv[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det;
        inv[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det;
        inv[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det;
        inv[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det;
        inv[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det;
    }
    let mut grad = [[0.0; 3]; 8];
    for k in 0..npe {
        for a in 0..dim {
            grad[k][a] = (0..dim).map(|b| dn[k][b] * inv[b][a]).sum();
        }
    }
    MappedPoint { x, det, phi, grad }
}

/// Nodal coefficient vector of a bilinear/trilinear field on a mesh.
#[derive(Clone, Debug)]
pub struct ScalarField<'m> {
    pub mesh: &'m Mesh,
    pub values: Vec<f64>,
    /// Tags whose vertices were constrained to Dirichlet values.
    pub dirichlet_tags: Vec<Tag>,
}

impl<'m> ScalarField<'m> {
    pub fn new(mesh: &'m Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_vertices() {
            return Err(Error::MeshIncompatibility(format!(
                "{} coefficients for {} vertices",
                values.len(),
                mesh.n_vertices()
            )));
        }
        Ok(ScalarField { mesh, values, dirichlet_tags: Vec::new() })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: &'m Mesh, f: impl Fn(&Point) -> f64) -> Self {
        ScalarField { mesh, values: mesh.vertices.iter().map(f).collect(), dirichlet_tags: Vec::new() }
    }

    pub fn value_at(&self, e: usize, xi: &[f64; 3]) -> f64 {
        let (phi, _) = shape(self.mesh.dim, xi);
        self.mesh.nodes(e).iter().zip(phi.iter()).map(|(&v, p)| self.values[v as usize] * p).sum()
    }

    pub fn gradient_at(&self, e: usize, xi: &[f64; 3]) -> Point {
        let mp = map_point(self.mesh.dim, &self.mesh.element_coords(e), xi);
        self.gradient_mapped(e, &mp)
    }

    fn gradient_mapped(&self, e: usize, mp: &MappedPoint) -> Point {
        let mut g = [0.0; 3];
        for (k, &v) in self.mesh.nodes(e).iter().enumerate() {
            for a in 0..self.mesh.dim {
                g[a] += self.values[v as usize] * mp.grad[k][a];
            }
        }
        g
    }
}

/// Data of one Poisson solve `−Δu = f`.
pub struct PoissonProblem<'a> {
    /// Source term, given the region of the element being integrated.
    pub source: &'a dyn Fn(Region, &Point) -> f64,
    /// Dirichlet-constrained tags and their values.
    pub dirichlet: Vec<(Tag, DirichletValue<'a>)>,
    /// Neumann tags and their flux data `∂u/∂n`.
    pub neumann: Vec<(Tag, &'a dyn Fn(&Point) -> f64)>,
    /// Impose the zero-mean gauge instead of requiring Dirichlet vertices.
    pub pure_neumann: bool,
}

/// How Dirichlet values are prescribed.
pub enum DirichletValue<'a> {
    /// Interpolate a function at the constrained vertices.
    Function(&'a dyn Fn(&Point) -> f64),
    /// Take the value at each constrained vertex from its master-mesh id.
    Nodal(&'a dyn Fn(u32) -> f64),
}

/// Linear solver selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Sparse Cholesky (true) or Jacobi-PCG (false).
    pub direct: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iter: 20_000, direct: true }
    }
}

/// Stiffness matrix `∫ ∇φ_i·∇φ_j` over all elements.
pub fn assemble_stiffness(mesh: &Mesh) -> Csr {
    let npe = nodes_per_element(mesh.dim);
    let mut keys = Vec::with_capacity(mesh.n_elements() * npe * npe);
    for e in 0..mesh.n_elements() {
        for &i in mesh.nodes(e) {
            for &j in mesh.nodes(e) {
                keys.push(Csr::key(i, j));
            }
        }
    }
    let mut k = Csr::from_pattern(mesh.n_vertices(), keys);
    let rule = tensor_rule(mesh.dim, VOLUME_ORDER);
    for e in 0..mesh.n_elements() {
        let ke = element_stiffness(mesh, e, &rule);
        let nodes = mesh.nodes(e);
        for a in 0..npe {
            for b in 0..npe {
                k.add(nodes[a] as usize, nodes[b] as usize, ke[a][b]);
            }
        }
    }
    k
}

fn element_stiffness(mesh: &Mesh, e: usize, rule: &[([f64; 3], f64)]) -> [[f64; 8]; 8] {
    let npe = nodes_per_element(mesh.dim);
    let coords = mesh.element_coords(e);
    let mut ke = [[0.0; 8]; 8];
    for (xi, w) in rule {
        let mp = map_point(mesh.dim, &coords, xi);
        let wd = w * mp.det;
        for a in 0..npe {
            for b in a..npe {
                let v: f64 = (0..mesh.dim).map(|d| mp.grad[a][d] * mp.grad[b][d]).sum();
                ke[a][b] += wd * v;
            }
        }
    }
    for a in 0..npe {
        for b in 0..a {
            ke[a][b] = ke[b][a];
        }
    }
    ke
}

/// Load vector `∫ f φ_i` over elements.
pub fn assemble_load(mesh: &Mesh, source: &dyn Fn(Region, &Point) -> f64) -> Vec<f64> {
    let rule = tensor_rule(mesh.dim, VOLUME_ORDER);
    let mut f = vec![0.0; mesh.n_vertices()];
    for e in 0..mesh.n_elements() {
        let coords = mesh.element_coords(e);
        let r = mesh.region[e];
        for (xi, w) in &rule {
            let mp = map_point(mesh.dim, &coords, xi);
            let s = source(r, &mp.x) * w * mp.det;
            for (k, &v) in mesh.nodes(e).iter().enumerate() {
                f[v as usize] += s * mp.phi[k];
            }
        }
    }
    f
}

/// Add `∫_tag g φ_i` to `f`.
pub fn add_neumann_load(mesh: &Mesh, tag: Tag, g: &dyn Fn(&Point) -> f64, f: &mut [f64]) -> Result<()> {
    if !mesh.has_tag(tag, None) {
        return Ok(());
    }
    for bp in boundary_quadrature(mesh, tag, None, BOUNDARY_ORDER)? {
        let (phi, _) = shape(mesh.dim, &bp.xi);
        let s = g(&bp.point) * bp.weight;
        for (k, &v) in mesh.nodes(bp.element as usize).iter().enumerate() {
            f[v as usize] += s * phi[k];
        }
    }
    Ok(())
}

/// Galerkin solution of `−Δu = f` with the given boundary conditions.
pub fn solve_poisson<'m>(mesh: &'m Mesh, problem: &PoissonProblem<'_>, solver: &SolverOptions) -> Result<ScalarField<'m>> {
    let n = mesh.n_vertices();
    for bf in &mesh.boundary {
        let has = problem.dirichlet.iter().any(|(t, _)| *t == bf.tag) || problem.neumann.iter().any(|(t, _)| *t == bf.tag);
        if !has {
            return Err(Error::Configuration(format!("no boundary data assigned to tag {}", bf.tag.name())));
        }
    }
    let k = assemble_stiffness(mesh);
    let mut f = assemble_load(mesh, problem.source);
    for (tag, g) in &problem.neumann {
        add_neumann_load(mesh, *tag, *g, &mut f)?;
    }
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for (tag, value) in &problem.dirichlet {
        for (_, bf) in mesh.faces(*tag, None) {
            let (ids, m) = mesh.face_vertex_ids(bf);
            for &v in &ids[..m] {
                if fixed[v as usize].is_none() {
                    fixed[v as usize] = Some(match value {
                        DirichletValue::Function(h) => h(&mesh.vertices[v as usize]),
                        DirichletValue::Nodal(h) => h(mesh.global_vertex[v as usize]),
                    });
                }
            }
        }
    }
    let gauge = !fixed.iter().any(Option::is_some);
    if gauge {
        if !problem.pure_neumann {
            return Err(Error::GaugeRequired);
        }
        fixed[0] = Some(0.0);
    }
    let mut map = vec![u32::MAX; n];
    let mut m = 0usize;
    for v in 0..n {
        if fixed[v].is_none() {
            map[v] = m as u32;
            m += 1;
        }
    }
    let mut rhs = vec![0.0; m];
    for i in 0..n {
        if map[i] == u32::MAX {
            continue;
        }
        let mut s = f[i];
        for p in k.indptr[i]..k.indptr[i + 1] {
            if let Some(val) = fixed[k.indices[p] as usize] {
                s -= k.data[p] * val;
            }
        }
        rhs[map[i] as usize] = s;
    }
    let kr = k.submatrix(&map, m);
    let x = solve_reduced(&kr, &rhs, mesh, &map, solver)?;
    let mut values: Vec<f64> = fixed.iter().map(|v| v.unwrap_or(0.0)).collect();
    for v in 0..n {
        if map[v] != u32::MAX {
            values[v] = x[map[v] as usize];
        }
    }
    let mut field = ScalarField::new(mesh, values)?;
    if gauge {
        let mean = integral(&field) / mesh_volume(mesh);
        field.values.iter_mut().for_each(|v| *v -= mean);
    } else {
        field.dirichlet_tags = problem.dirichlet.iter().map(|(t, _)| *t).collect();
    }
    Ok(field)
}

fn solve_reduced(a: &Csr, b: &[f64], mesh: &Mesh, map: &[u32], solver: &SolverOptions) -> Result<Vec<f64>> {
    if a.n == 0 {
        return Ok(Vec::new());
    }
    if solver.direct {
        let mut coords = vec![[0.0; 3]; a.n];
        for (v, &i) in map.iter().enumerate() {
            if i != u32::MAX {
                coords[i as usize] = mesh.vertices[v];
            }
        }
        let chol = Cholesky::factor(a, Some(&coords))?;
        let (x, res) = chol.solve_refined(a, b);
        if res > solver.tol {
            return Err(Error::SolverFailure { reason: String::from("direct solve residual above tolerance"), residual: res });
        }
        Ok(x)
    } else {
        solve_spd(a, b, solver.tol, solver.max_iter)
    }
}

/// `∫ u` over the mesh.
pub fn integral(field: &ScalarField<'_>) -> f64 {
    let mesh = field.mesh;
    let rule = tensor_rule(mesh.dim, VOLUME_ORDER);
    let mut s = 0.0;
    for e in 0..mesh.n_elements() {
        let coords = mesh.element_coords(e);
        for (xi, w) in &rule {
            let mp = map_point(mesh.dim, &coords, xi);
            let u: f64 = mesh.nodes(e).iter().enumerate().map(|(k, &v)| field.values[v as usize] * mp.phi[k]).sum();
            s += u * w * mp.det;
        }
    }
    s
}

/// Measure of the meshed domain.
pub fn mesh_volume(mesh: &Mesh) -> f64 {
    let rule = tensor_rule(mesh.dim, 2);
    let mut s = 0.0;
    for e in 0..mesh.n_elements() {
        let coords = mesh.element_coords(e);
        for (xi, w) in &rule {
            s += w * map_point(mesh.dim, &coords, xi).det;
        }
    }
    s
}

/// Normal derivative of `field` at each boundary sample, using the gradient of
/// the element owning the sample.
pub fn flux_trace(field: &ScalarField<'_>, points: &[BoundaryPoint]) -> Result<Vec<f64>> {
    let mesh = field.mesh;
    points
        .iter()
        .map(|bp| {
            let e = bp.element as usize;
            if e >= mesh.n_elements() {
                return Err(Error::GeometryMismatch(format!("element {e} not in the field's mesh")));
            }
            let mp = map_point(mesh.dim, &mesh.element_coords(e), &bp.xi);
            let dist = (0..3).map(|d| (mp.x[d] - bp.point[d]).powi(2)).sum::<f64>().sqrt();
            if dist > 1e-9 * (1.0 + mesh.max_edge(e)) {
                return Err(Error::GeometryMismatch(format!("sample {:?} does not lie on element {e}", bp.point)));
            }
            let g = field.gradient_mapped(e, &mp);
            Ok((0..3).map(|d| g[d] * bp.normal[d]).sum())
        })
        .collect()
}

/// `|a − b|_{1,R}` over the master elements whose region satisfies `select`,
/// which both fields' meshes must contain.
pub fn h1_seminorm_diff(a: &ScalarField<'_>, b: &ScalarField<'_>, select: impl Fn(Region) -> bool) -> Result<f64> {
    let (ma, mb) = (a.mesh, b.mesh);
    if ma.local_element.len() != mb.local_element.len() {
        return Err(Error::MeshIncompatibility(String::from("fields live on meshes of different master meshes")));
    }
    let rule = tensor_rule(ma.dim, VOLUME_ORDER);
    let mut s = 0.0;
    for g in 0..ma.local_element.len() {
        let (ea, eb) = (ma.local_element[g], mb.local_element[g]);
        let region = if ea != NONE {
            ma.region[ea as usize]
        } else if eb != NONE {
            mb.region[eb as usize]
        } else {
            continue;
        };
        if !select(region) {
            continue;
        }
        if ea == NONE || eb == NONE {
            return Err(Error::MeshIncompatibility(format!("master element {g} missing from one of the meshes")));
        }
        let (ea, eb) = (ea as usize, eb as usize);
        let coords = ma.element_coords(ea);
        for (xi, w) in &rule {
            let mp = map_point(ma.dim, &coords, xi);
            let ga = a.gradient_mapped(ea, &mp);
            let gb = b.gradient_mapped(eb, &mp);
            let d2: f64 = (0..ma.dim).map(|d| (ga[d] - gb[d]).powi(2)).sum();
            s += d2 * w * mp.det;
        }
    }
    Ok(s.sqrt())
}
