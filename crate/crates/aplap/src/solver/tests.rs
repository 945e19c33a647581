use super::*;
use crate::mesh::{w1p_distance, Mesh};
use crate::norms::AnisotropicNorm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_square(n: usize) -> Mesh {
    Mesh::rectangle([0.0, 0.0], [1.0, 1.0], n, n).unwrap()
}

fn basic_problem(
    n: usize,
    p: f64,
    source: Source,
    boundary: Boundary,
    schedule: Vec<f64>,
) -> Problem {
    Problem::new(
        unit_square(n),
        AnisotropicNorm::euclidean(2),
        p,
        source,
        boundary,
        schedule,
        SolveOptions::default(),
    )
    .unwrap()
}

#[test]
fn energy_of_constant_fields() {
    let prob = basic_problem(8, 2.0, Source::Zero, Boundary::Zero, vec![0.0]);
    let zero = vec![0.0; prob.mesh.n_nodes()];
    assert_eq!(prob.energy(0.0, &zero).unwrap(), 0.0);
    // Constant field: only the eps^p |Omega| / p term remains.
    let prob_f = basic_problem(8, 3.0, Source::Constant(2.0), Boundary::Zero, vec![0.25]);
    let e = prob_f.energy(0.25, &zero).unwrap();
    assert!((e - 0.25f64.powi(3) / 3.0).abs() < 1e-15, "{e}");
}

#[test]
fn energy_gradient_matches_finite_differences() {
    for (p, eps) in [(2.0, 0.0), (1.5, 0.2), (3.0, 0.05)] {
        let prob = basic_problem(
            7,
            p,
            Source::Expr(crate::expr::Expr::parse("sin(pi*x)*y").unwrap()),
            Boundary::Zero,
            vec![eps.max(0.01)],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut u = prob.full_vector(None).unwrap();
        for i in 0..u.len() {
            if !prob.mesh.is_boundary(i) {
                u[i] = rng.gen_range(-0.5..0.5);
            }
        }
        let grad = prob.energy_gradient(eps, &u).unwrap();
        let h = 1e-6;
        for (k, &dof) in prob.dofs.iter().enumerate().step_by(7) {
            let mut up = u.clone();
            up[dof] += h;
            let ep = prob.energy(eps, &up).unwrap();
            up[dof] = u[dof] - h;
            let em = prob.energy(eps, &up).unwrap();
            let fd = (ep - em) / (2.0 * h);
            assert!(
                (grad[k] - fd).abs() < 1e-6 * (1.0 + grad[k].abs()),
                "p={p} eps={eps} dof {dof}: {} vs {}",
                grad[k],
                fd
            );
        }
    }
}

#[test]
fn p2_minimizer_matches_poisson_solve() {
    // Nonlinear path vs direct linear assembly at p = 2, f = 1.
    let prob = basic_problem(17, 2.0, Source::Constant(1.0), Boundary::Zero, vec![0.0]);
    let report = minimize(&prob, 0.0, None).unwrap();
    assert!(report.converged);
    let lin = poisson_solve(&prob.mesh, prob.cell_source()).unwrap();
    let worst = report
        .u
        .data
        .iter()
        .zip(&lin.data)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-10, "L-inf gap {worst}");
    // Energy history is non-increasing and the final energy matches.
    for w in report.energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-14);
    }
    let e_min = prob.energy(0.0, &report.u.data).unwrap();
    let e_lin = prob.energy(0.0, &lin.data).unwrap();
    assert!((e_min - e_lin).abs() < 1e-12);
}

#[test]
fn affine_data_reproduced_exactly() {
    // f = 0 with affine boundary data: affine fields have divergence-free
    // constant stress, so the interpolant is the discrete minimizer.
    for p in [1.5, 3.0] {
        let prob = basic_problem(
            9,
            p,
            Source::Zero,
            Boundary::Expr(crate::expr::Expr::parse("0.7*x - 0.2*y + 0.1").unwrap()),
            vec![0.1],
        );
        let report = minimize(&prob, 0.1, None).unwrap();
        assert!(report.converged);
        for i in 0..prob.mesh.n_nodes() {
            let x = prob.mesh.node(i);
            let exact = 0.7 * x[0] - 0.2 * x[1] + 0.1;
            assert!((report.u.data[i] - exact).abs() < 1e-8, "p={p} node {i}");
        }
    }
}

#[test]
fn minimizer_unique_across_starts() {
    // Strict convexity: two different starting points land on the same field.
    let mut opts = SolveOptions::default();
    opts.grad_tol = 1e-12;
    let mesh = unit_square(9);
    let prob = Problem::new(
        mesh,
        AnisotropicNorm::euclidean(2),
        3.0,
        Source::Constant(1.0),
        Boundary::Zero,
        vec![0.1],
        opts,
    )
    .unwrap();
    let a = minimize(&prob, 0.1, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut warm = prob.boundary_field();
    for i in 0..prob.mesh.n_nodes() {
        if !prob.mesh.is_boundary(i) {
            warm.data[i] = rng.gen_range(-1.0..1.0);
        }
    }
    let b = minimize(&prob, 0.1, Some(&warm)).unwrap();
    assert!(a.converged && b.converged);
    let worst = a
        .u
        .data
        .iter()
        .zip(&b.u.data)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    assert!(worst <= 10.0 * prob.options.grad_tol, "starts differ by {worst}");
}

#[test]
fn gradient_descent_fallback_agrees_with_newton() {
    let mut opts = SolveOptions::default();
    opts.gradient_descent_only = true;
    opts.max_iterations = 5000;
    opts.grad_tol = 1e-9;
    let prob = Problem::new(
        unit_square(7),
        AnisotropicNorm::euclidean(2),
        2.0,
        Source::Constant(1.0),
        Boundary::Zero,
        vec![0.0],
        opts,
    )
    .unwrap();
    let gd = minimize(&prob, 0.0, None).unwrap();
    assert!(gd.converged);
    assert!(gd.used_fallback);
    let lin = poisson_solve(&prob.mesh, prob.cell_source()).unwrap();
    let worst = gd
        .u
        .data
        .iter()
        .zip(&lin.data)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn continuation_single_stage_equals_minimize() {
    let prob = basic_problem(9, 3.0, Source::Constant(1.0), Boundary::Zero, vec![0.1]);
    let cont = continuation_solve(&prob).unwrap();
    assert_eq!(cont.stages.len(), 1);
    assert!(cont.increments.is_empty());
    let single = minimize(&prob, 0.1, None).unwrap();
    for (a, b) in cont.final_field().data.iter().zip(&single.u.data) {
        assert_eq!(a, b);
    }
}

#[test]
fn continuation_p2_stages_identical() {
    // At p = 2 the regularization enters only through the truncation of f and
    // an additive constant, so all stages agree once |f| < 1/eps.
    let prob = basic_problem(
        9,
        2.0,
        Source::Constant(1.0),
        Boundary::Zero,
        vec![0.5, 0.25, 0.125],
    );
    let cont = continuation_solve(&prob).unwrap();
    assert!(cont.all_converged());
    for inc in &cont.increments {
        assert!(*inc <= 1e-8, "stage increment {inc}");
    }
}

#[test]
fn continuation_torsion_refinement_errors_decrease() {
    let case = manufactured_torsion(3.0, 2, vec![0.5, 0.5], 0.5);
    let mut errs = Vec::new();
    for n in [8, 16, 32] {
        let mesh = unit_square(n);
        let schedule = default_eps_schedule(mesh.h());
        let prob = Problem::new(
            mesh,
            AnisotropicNorm::euclidean(2),
            case.p,
            case.source.clone(),
            case.boundary(),
            schedule,
            SolveOptions::default(),
        )
        .unwrap();
        let cont = continuation_solve(&prob).unwrap();
        assert!(cont.all_converged());
        let exact = crate::mesh::ScalarField::from_fn(
            &prob.mesh,
            crate::mesh::Support::Nodes,
            |x| (case.exact)(x),
        );
        errs.push(w1p_distance(&prob.mesh, cont.final_field(), &exact, case.p).unwrap());
    }
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn poisson_eigenfunction_oracle() {
    // -Delta u = f with f = 2 pi^2 sin(pi x) sin(pi y) has u = f / (2 pi^2).
    let pi = std::f64::consts::PI;
    let mut errs = Vec::new();
    for n in [16, 32] {
        let mesh = unit_square(n);
        let f: Vec<f64> = (0..mesh.n_cells())
            .map(|c| {
                let x = mesh.centroid(c);
                2.0 * pi * pi * (pi * x[0]).sin() * (pi * x[1]).sin()
            })
            .collect();
        let u = poisson_solve(&mesh, &f).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..mesh.n_nodes() {
            let x = mesh.node(i);
            let exact = (pi * x[0]).sin() * (pi * x[1]).sin();
            worst = worst.max((u.data[i] - exact).abs());
        }
        errs.push(worst);
        // Galerkin identity holds to factorization accuracy.
        assert!(poisson_residual(&mesh, &u, &f).unwrap() < 1e-12);
    }
    assert!(errs[1] < errs[0] / 3.5, "L-inf errors {errs:?} should be O(h^2)");
    // Zero source gives the zero solution.
    let mesh = unit_square(8);
    let z = poisson_solve(&mesh, &vec![0.0; mesh.n_cells()]).unwrap();
    assert!(z.data.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn discrete_maximum_principle_smoke() {
    // p = 2, f >= 0: interior values stay above the boundary minimum.
    let prob = basic_problem(
        12,
        2.0,
        Source::Constant(1.0),
        Boundary::Expr(crate::expr::Expr::parse("0.3 + 0.1*x").unwrap()),
        vec![0.0],
    );
    let report = minimize(&prob, 0.0, None).unwrap();
    let boundary_min = (0..prob.mesh.n_nodes())
        .filter(|&i| prob.mesh.is_boundary(i))
        .map(|i| report.u.data[i])
        .fold(f64::INFINITY, f64::min);
    let interior_min = (0..prob.mesh.n_nodes())
        .filter(|&i| !prob.mesh.is_boundary(i))
        .map(|i| report.u.data[i])
        .fold(f64::INFINITY, f64::min);
    assert!(interior_min >= boundary_min - 1e-12);
}

#[test]
fn schedule_validation() {
    let mesh = unit_square(4);
    let mk = |schedule: Vec<f64>, p: f64| {
        Problem::new(
            mesh.clone(),
            AnisotropicNorm::euclidean(2),
            p,
            Source::Zero,
            Boundary::Zero,
            schedule,
            SolveOptions::default(),
        )
    };
    assert!(matches!(mk(vec![], 2.0), Err(SolveError::InvalidSchedule(_))));
    assert!(matches!(mk(vec![0.5, 0.5], 2.0), Err(SolveError::InvalidSchedule(_))));
    assert!(matches!(mk(vec![0.5, 0.0], 1.5), Err(SolveError::InvalidSchedule(_))));
    assert!(mk(vec![0.5, 0.0], 2.0).is_ok());
    assert!(matches!(mk(vec![1.0, 0.5], 2.0), Err(SolveError::InvalidSchedule(_))));
    assert!(matches!(
        Problem::new(
            mesh.clone(),
            AnisotropicNorm::euclidean(2),
            0.9,
            Source::Zero,
            Boundary::Zero,
            vec![0.1],
            SolveOptions::default(),
        ),
        Err(SolveError::InvalidExponent(_))
    ));
    assert!(matches!(
        Problem::new(
            mesh.clone(),
            AnisotropicNorm::euclidean(3),
            2.0,
            Source::Zero,
            Boundary::Zero,
            vec![0.1],
            SolveOptions::default(),
        ),
        Err(SolveError::DimensionMismatch { .. })
    ));
}

#[test]
fn default_schedule_shape() {
    let s = default_eps_schedule(1.0 / 64.0);
    assert!(s.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(*s.last().unwrap(), 1.0 / 64.0);
    let s2 = default_eps_schedule(1e-6);
    assert_eq!(*s2.last().unwrap(), 1e-4);
}

#[test]
fn anisotropic_solve_smoke() {
    // Weighted norm, p = 3: converges and stays convex along the iterates.
    let mesh = unit_square(12);
    let schedule = default_eps_schedule(mesh.h());
    let prob = Problem::new(
        mesh,
        AnisotropicNorm::weighted(vec![1.0, 4.0]).unwrap(),
        3.0,
        Source::Constant(1.0),
        Boundary::Zero,
        schedule,
        SolveOptions::default(),
    )
    .unwrap();
    let cont = continuation_solve(&prob).unwrap();
    assert!(cont.all_converged());
    for s in &cont.stages {
        for w in s.energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-13);
        }
    }
    // Solution is nontrivial and positive inside.
    let u = cont.final_field();
    assert!(u.data.iter().cloned().fold(0.0f64, f64::max) > 1e-3);
}

#[test]
fn solve_3d_smoke() {
    let mesh = Mesh::box3d([0.0; 3], [1.0; 3], [6, 6, 6]).unwrap();
    let prob = Problem::new(
        mesh,
        AnisotropicNorm::euclidean(3),
        2.0,
        Source::Constant(1.0),
        Boundary::Zero,
        vec![0.0],
        SolveOptions::default(),
    )
    .unwrap();
    let report = minimize(&prob, 0.0, None).unwrap();
    assert!(report.converged);
    let lin = poisson_solve(&prob.mesh, prob.cell_source()).unwrap();
    let worst = report
        .u
        .data
        .iter()
        .zip(&lin.data)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-9);
}
