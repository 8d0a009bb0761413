//! Plain-text mesh and field dump.
//!
//! Files are named `<case>.<ε index>.<exact|defeatured|extension>.txt`.
//!
//! ```text
//! mesh <kind> dim <n> vertices <nv> elements <ne> faces <nf>
//! v <index> <x> <y> <z>                        (nv lines)
//! e <index> <region> <patch> <node>...          (ne lines, 4 or 8 nodes)
//! f <element> <local face> <tag> <feature|->    (nf lines)
//! field <name> <nv>                             (optional, per field)
//! u <vertex> <value>                            (nv lines)
//! ```
//!
//! Regions are `star`, `neg:<k>`, `pos:<k>` and `ext:<k>`; tags use the names
//! of [`defeature_core::Tag::name`]. Numbers use 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use defeature_core::defeaturing::{analyze, AnalysisOptions};
use defeature_core::mesh::{nodes_per_element, Mesh, MeshKind, Region};
use defeature_core::{build_domain, generate_pair, ScalarField};

use crate::case::CaseSpec;
use crate::error::{HarnessError, Result, Stage};

fn region_name(r: Region) -> String {
    match r {
        Region::Star => String::from("star"),
        Region::Neg(k) => format!("neg:{k}"),
        Region::Pos(k) => format!("pos:{k}"),
        Region::Ext(k) => format!("ext:{k}"),
    }
}

fn kind_name(k: MeshKind) -> &'static str {
    match k {
        MeshKind::Exact => "exact",
        MeshKind::Defeatured => "defeatured",
        MeshKind::Extension => "extension",
    }
}

pub fn dump_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "mesh {} dim {} vertices {} elements {} faces {}",
        kind_name(mesh.kind),
        mesh.dim,
        mesh.n_vertices(),
        mesh.n_elements(),
        mesh.boundary.len()
    );
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(out, "v {i} {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
    }
    let npe = nodes_per_element(mesh.dim);
    for e in 0..mesh.n_elements() {
        let _ = write!(out, "e {e} {} {}", region_name(mesh.region[e]), mesh.patch_of_element[e]);
        for n in &mesh.elements[e][..npe] {
            let _ = write!(out, " {n}");
        }
        out.push('\n');
    }
    for bf in &mesh.boundary {
        let feature = bf.feature.map_or(String::from("-"), |k| k.to_string());
        let _ = writeln!(out, "f {} {} {} {feature}", bf.element, bf.face, bf.tag.name());
    }
    out
}

pub fn dump_field(name: &str, field: &ScalarField<'_>) -> String {
    let mut out = format!("field {name} {}\n", field.values.len());
    for (i, v) in field.values.iter().enumerate() {
        let _ = writeln!(out, "u {i} {v:.16e}");
    }
    out
}

/// Write `<case>.<index>.<mesh>.txt` for each mesh of the case at `eps`, with
/// `u` and `u_d` on the exact mesh, `u0` on the defeatured mesh and `u0_tilde`
/// on the extension mesh. Returns the written paths.
pub fn write_dumps(spec: &CaseSpec, index: usize, eps: f64, dir: &Path) -> Result<Vec<PathBuf>> {
    let domain = build_domain(spec.family, spec.params(eps)).map_err(HarnessError::core(Stage::Geometry))?;
    let pair = generate_pair(&domain, &spec.mesh).map_err(HarnessError::core(Stage::Mesh))?;
    let data = spec.compiled.bind(eps);
    let options = AnalysisOptions { solver: spec.solver, m: spec.m, reference: true };
    let a = analyze(&domain, &pair, &data, &options).map_err(HarnessError::core(Stage::Estimator))?;
    std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    let mut exact = dump_mesh(&pair.exact);
    if let Some(u) = &a.u {
        exact.push_str(&dump_field("u", u));
    }
    exact.push_str(&dump_field("u_d", &a.u_d));
    let mut files = vec![("exact", exact), ("defeatured", dump_mesh(&pair.defeatured) + &dump_field("u0", &a.u0))];
    if let (Some(ext), Some(ut)) = (&pair.extension, &a.u0_tilde) {
        files.push(("extension", dump_mesh(ext) + &dump_field("u0_tilde", ut)));
    }
    let mut paths = Vec::new();
    for (kind, text) in files {
        let path = dir.join(format!("{}.{index}.{kind}.txt", spec.id));
        std::fs::write(&path, text).map_err(HarnessError::io(&path))?;
        paths.push(path);
    }
    Ok(paths)
}
