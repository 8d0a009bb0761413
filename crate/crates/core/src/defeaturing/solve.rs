//! The exact, defeatured and extension solves, the extended defeatured
//! solution u_d and the full analysis of one case.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{build_report, flux_residual, sigma_defects, EstimatorReport, FluxResidual, SigmaTrace};
use crate::error::{Error, Result};
use crate::fem::{h1_seminorm_diff, solve_poisson, DirichletValue, PoissonProblem, ProblemData, ScalarField, SolverOptions};
use crate::geometry::{DomainDescription, Tag};
use crate::mesh::{Mesh, MeshKind, MeshPair, Region, NONE};
use crate::Point;

fn check_kind(mesh: &Mesh, kind: MeshKind) -> Result<()> {
    if mesh.kind != kind {
        return Err(Error::MeshIncompatibility(format!("expected the {kind:?} mesh, got the {:?} mesh", mesh.kind)));
    }
    Ok(())
}

/// Solution `u` of the exact problem in Ω.
pub fn solve_exact<'m>(mesh: &'m Mesh, data: &ProblemData, solver: &SolverOptions) -> Result<ScalarField<'m>> {
    check_kind(mesh, MeshKind::Exact)?;
    let f = |_: Region, p: &Point| (data.f)(p);
    let h = |p: &Point| (data.h)(p);
    let g = |p: &Point| (data.g)(p);
    let gf = |p: &Point| (data.g_feature)(p);
    let problem = PoissonProblem {
        source: &f,
        dirichlet: vec![(Tag::Dirichlet, DirichletValue::Function(&h))],
        neumann: vec![(Tag::NeumannRest, &g), (Tag::GammaN, &gf), (Tag::GammaS, &gf), (Tag::GammaR, &gf)],
        pure_neumann: false,
    };
    solve_poisson(mesh, &problem, solver)
}

/// Solution `u0` of the defeatured problem in Ω0, with `f` extended by `f_neg`
/// into the negative components.
pub fn solve_defeatured<'m>(mesh: &'m Mesh, data: &ProblemData, solver: &SolverOptions) -> Result<ScalarField<'m>> {
    check_kind(mesh, MeshKind::Defeatured)?;
    let f = |r: Region, p: &Point| match r {
        Region::Neg(_) => (data.f_neg)(p),
        _ => (data.f)(p),
    };
    let h = |p: &Point| (data.h)(p);
    let g = |p: &Point| (data.g)(p);
    let g0 = |p: &Point| (data.g0)(p);
    let problem = PoissonProblem {
        source: &f,
        dirichlet: vec![(Tag::Dirichlet, DirichletValue::Function(&h))],
        neumann: vec![(Tag::NeumannRest, &g), (Tag::Gamma0N, &g0), (Tag::Gamma0P, &g0)],
        pure_neumann: false,
    };
    solve_poisson(mesh, &problem, solver)
}

/// Solution `ũ0` of the extension problem in F̃_p: the trace of `u0` on γ_{0,p},
/// `g` on γ_s and `g̃` on γ̃.
pub fn solve_extension<'m>(
    mesh: &'m Mesh,
    u0: &ScalarField<'_>,
    data: &ProblemData,
    solver: &SolverOptions,
) -> Result<ScalarField<'m>> {
    check_kind(mesh, MeshKind::Extension)?;
    check_kind(u0.mesh, MeshKind::Defeatured)?;
    let local = &u0.mesh.local_vertex;
    for (_, bf) in mesh.faces(Tag::Gamma0P, None) {
        let (ids, n) = mesh.face_vertex_ids(bf);
        for &v in &ids[..n] {
            let g = mesh.global_vertex[v as usize] as usize;
            if g >= local.len() || local[g] == NONE {
                return Err(Error::MeshIncompatibility(format!("γ_0p vertex {g} is not a vertex of the defeatured mesh")));
            }
        }
    }
    let f = |r: Region, p: &Point| match r {
        Region::Ext(_) => (data.f_ext)(p),
        _ => (data.f)(p),
    };
    let trace = |g: u32| u0.values[local[g as usize] as usize];
    let h = |p: &Point| (data.h)(p);
    let g = |p: &Point| (data.g)(p);
    let gf = |p: &Point| (data.g_feature)(p);
    let gt = |p: &Point| (data.g_tilde)(p);
    let problem = PoissonProblem {
        source: &f,
        dirichlet: vec![(Tag::Gamma0P, DirichletValue::Nodal(&trace)), (Tag::Dirichlet, DirichletValue::Function(&h))],
        neumann: vec![(Tag::GammaS, &gf), (Tag::GammaTilde, &gt), (Tag::NeumannRest, &g)],
        pure_neumann: false,
    };
    solve_poisson(mesh, &problem, solver)
}

/// The extended defeatured solution on the exact mesh: `ũ0` on the vertices of
/// positive components, `u0` elsewhere.
pub fn assemble_ud<'m>(
    exact: &'m Mesh,
    u0: &ScalarField<'_>,
    u0_tilde: Option<&ScalarField<'_>>,
) -> Result<ScalarField<'m>> {
    check_kind(exact, MeshKind::Exact)?;
    check_kind(u0.mesh, MeshKind::Defeatured)?;
    let mut in_pos = vec![false; exact.n_vertices()];
    for e in 0..exact.n_elements() {
        if matches!(exact.region[e], Region::Pos(_)) {
            for &v in exact.nodes(e) {
                in_pos[v as usize] = true;
            }
        }
    }
    let mut values = Vec::with_capacity(exact.n_vertices());
    for (v, &pos) in in_pos.iter().enumerate() {
        let g = exact.global_vertex[v] as usize;
        let (field, what) = if pos {
            match u0_tilde {
                Some(ut) => (ut, "extension"),
                None => return Err(Error::MeshIncompatibility(String::from("positive component without an extension solution"))),
            }
        } else {
            (u0, "defeatured")
        };
        let l = field.mesh.local_vertex.get(g).copied().unwrap_or(NONE);
        if l == NONE {
            return Err(Error::MeshIncompatibility(format!("vertex {g} of Ω is missing from the {what} mesh")));
        }
        values.push(field.values[l as usize]);
    }
    ScalarField::new(exact, values)
}

/// Options of a full analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub solver: SolverOptions,
    /// Degree of the oscillation projection.
    pub m: usize,
    /// Solve the exact problem and report `|u − u_d|_{1,Ω}`.
    pub reference: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { solver: SolverOptions::default(), m: 1, reference: true }
    }
}

/// Every field and quantity of one analysed case.
#[derive(Clone, Debug)]
pub struct Analysis<'m> {
    pub u0: ScalarField<'m>,
    pub u0_tilde: Option<ScalarField<'m>>,
    pub u_d: ScalarField<'m>,
    pub u: Option<ScalarField<'m>>,
    pub traces: Vec<SigmaTrace>,
    pub flux: Vec<FluxResidual>,
    pub report: EstimatorReport,
}

/// Defeatured and extension solves, defects, estimator, oscillation, flux
/// means and (optionally) the reference error of one case.
pub fn analyze<'m>(
    domain: &DomainDescription,
    pair: &'m MeshPair,
    data: &ProblemData,
    options: &AnalysisOptions,
) -> Result<Analysis<'m>> {
    let u0 = solve_defeatured(&pair.defeatured, data, &options.solver)?;
    let u0_tilde = match &pair.extension {
        Some(ext) => Some(solve_extension(ext, &u0, data, &options.solver)?),
        None => None,
    };
    let u_d = assemble_ud(&pair.exact, &u0, u0_tilde.as_ref())?;
    let traces = sigma_defects(&u_d, u0_tilde.as_ref(), domain, data)?;
    let flux = flux_residual(pair, domain, data)?;
    let u = if options.reference { Some(solve_exact(&pair.exact, data, &options.solver)?) } else { None };
    let error = match &u {
        Some(u) => Some(h1_seminorm_diff(u, &u_d, |_| true)?),
        None => None,
    };
    let report = build_report(&traces, domain, flux.clone(), options.m, error)?;
    Ok(Analysis { u0, u0_tilde, u_d, u, traces, flux, report })
}
