use std::f64::consts::PI;

use approx::assert_relative_eq;
use defeature_core::fem::{assemble_stiffness, integral, solve_poisson, solve_spd, Csr, DirichletValue, PoissonProblem};
use defeature_core::geometry::Sign;
use defeature_core::mesh::Region;
use defeature_core::{build_domain, generate_pair, h1_seminorm_diff, Family, MeshOptions, Params, Point, ScalarField, SolverOptions, Tag};

fn unit_square(refine: usize) -> defeature_core::MeshPair {
    let d = build_domain(Family::SquareCorner(Sign::Negative), Params::new(0.1)).unwrap();
    generate_pair(&d, &MeshOptions { refine, ..MeshOptions::for_dim(2) }).unwrap()
}

fn all_dirichlet<'a>(mesh: &defeature_core::mesh::Mesh, h: &'a dyn Fn(&Point) -> f64) -> Vec<(Tag, DirichletValue<'a>)> {
    Tag::ALL.iter().filter(|t| mesh.has_tag(**t, None)).map(|t| (*t, DirichletValue::Function(h))).collect()
}

#[test]
fn stiffness_is_symmetric_with_constant_kernel() {
    let p = unit_square(1);
    let a = assemble_stiffness(&p.exact);
    assert!(a.asymmetry() < 1e-14);
    let ones = vec![1.0; a.n];
    let mut y = vec![0.0; a.n];
    a.matvec(&ones, &mut y);
    assert!(y.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn linear_fields_are_reproduced() {
    let p = unit_square(1);
    let lin = |x: &Point| 1.0 - 2.0 * x[0] + 3.0 * x[1];
    let zero = |_: Region, _: &Point| 0.0;
    for direct in [true, false] {
        let problem = PoissonProblem { source: &zero, dirichlet: all_dirichlet(&p.exact, &lin), neumann: Vec::new(), pure_neumann: false };
        let solver = SolverOptions { direct, tol: 1e-13, ..Default::default() };
        let u = solve_poisson(&p.exact, &problem, &solver).unwrap();
        for (v, x) in p.exact.vertices.iter().enumerate() {
            assert!((u.values[v] - lin(x)).abs() < 1e-10);
        }
    }
}

#[test]
fn manufactured_solution_converges_in_energy() {
    let exact = |x: &Point| (PI * x[0]).sin() * (PI * x[1]).sin();
    let source = |_: Region, x: &Point| 2.0 * PI * PI * exact(x);
    let mut errs = Vec::new();
    for refine in [1, 2, 4] {
        let p = unit_square(refine);
        let m = &p.defeatured;
        let problem = PoissonProblem { source: &source, dirichlet: all_dirichlet(m, &exact), neumann: Vec::new(), pure_neumann: false };
        let u = solve_poisson(m, &problem, &SolverOptions::default()).unwrap();
        let i = ScalarField::interpolate(m, exact);
        errs.push(h1_seminorm_diff(&u, &i, |_| true).unwrap());
        assert_relative_eq!(integral(&u), 4.0 / (PI * PI), max_relative = 1e-2);
    }
    // At least first order in h; the interpolant comparison is usually better.
    assert!(errs[0] / errs[1] > 1.9 && errs[1] / errs[2] > 1.9, "{errs:?}");
}

#[test]
fn conjugate_gradient_small_system() {
    let a = Csr::from_dense(3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
    let x = solve_spd(&a, &[5.0, 5.0, 3.0], 1e-14, 100).unwrap();
    for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
        assert_relative_eq!(*xi, e, epsilon = 1e-12);
    }
}

#[test]
fn iteration_cap_is_a_solver_failure() {
    let n = 50;
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        d[i * n + i] = 2.0 + i as f64;
        if i + 1 < n {
            d[i * n + i + 1] = -1.0;
            d[(i + 1) * n + i] = -1.0;
        }
    }
    let a = Csr::from_dense(n, &d);
    let err = solve_spd(&a, &vec![1.0; n], 1e-15, 2).unwrap_err();
    assert!(matches!(err, defeature_core::Error::SolverFailure { .. }));
}
