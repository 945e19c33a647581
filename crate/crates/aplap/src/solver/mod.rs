//! P1 Galerkin minimization of the regularized energy
//!
//! ```text
//! J_eps(v) = (1/p) int (eps^2 + H^2(grad v))^{p/2} dx - int f_eps v dx
//! ```
//!
//! over nodal fields with prescribed boundary values, by damped Newton with
//! Armijo backtracking (Barzilai-Borwein gradient steps as fallback when the
//! Newton system is not numerically SPD), plus continuation along a
//! decreasing eps schedule. The discrete energy inherits strict convexity
//! from the pointwise profile, so the minimizer is unique and the assembled
//! stiffness is SPD wherever gradients are nonzero.

mod linsys;
mod manufactured;

pub use linsys::{BandedCholesky, BandedSpd, NotSpd};
pub use manufactured::{manufactured_torsion, ManufacturedCase};

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::mesh::{Mesh, MeshError, ScalarField, Support};
use crate::norms::AnisotropicNorm;
use crate::operator::{truncate_source, OperatorError, RegularizedOperator};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("exponent must satisfy p > 1, got {0}")]
    InvalidExponent(f64),
    #[error("invalid eps schedule: {0}")]
    InvalidSchedule(String),
    #[error("boundary data is not finite at node {0}")]
    NonFiniteBoundary(usize),
    #[error("norm dimension {norm} does not match mesh dimension {mesh}")]
    DimensionMismatch { norm: usize, mesh: usize },
    #[error("manufactured case requires the Euclidean norm")]
    RequiresEuclideanNorm,
    #[error("source field has {got} values, mesh has {expected} cells")]
    SourceLength { expected: usize, got: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Source term, evaluated at cell quadrature points (centroids).
#[derive(Clone)]
pub enum Source {
    Zero,
    Constant(f64),
    Expr(crate::expr::Expr),
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
    /// Raw per-cell data.
    PerCell(Vec<f64>),
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Zero => write!(f, "Source::Zero"),
            Source::Constant(c) => write!(f, "Source::Constant({c})"),
            Source::Expr(e) => write!(f, "Source::Expr({e})"),
            Source::Custom(_) => write!(f, "Source::Custom"),
            Source::PerCell(_) => write!(f, "Source::PerCell"),
        }
    }
}

impl Source {
    pub fn eval_cells(&self, mesh: &Mesh) -> Result<Vec<f64>, SolveError> {
        match self {
            Source::Zero => Ok(vec![0.0; mesh.n_cells()]),
            Source::Constant(c) => Ok(vec![*c; mesh.n_cells()]),
            Source::Expr(e) => {
                Ok((0..mesh.n_cells()).map(|c| e.eval(mesh.centroid(c))).collect())
            }
            Source::Custom(f) => Ok((0..mesh.n_cells()).map(|c| f(mesh.centroid(c))).collect()),
            Source::PerCell(v) => {
                if v.len() != mesh.n_cells() {
                    return Err(SolveError::SourceLength {
                        expected: mesh.n_cells(),
                        got: v.len(),
                    });
                }
                Ok(v.clone())
            }
        }
    }
}

/// Dirichlet boundary data, evaluated at boundary nodes.
#[derive(Clone)]
pub enum Boundary {
    Zero,
    Expr(crate::expr::Expr),
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Zero => write!(f, "Boundary::Zero"),
            Boundary::Expr(e) => write!(f, "Boundary::Expr({e})"),
            Boundary::Custom(_) => write!(f, "Boundary::Custom"),
        }
    }
}

/// Iteration controls.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Convergence: max-norm of the assembled energy gradient.
    pub grad_tol: f64,
    /// Stall detection: relative energy decrease below this for several
    /// consecutive accepted steps flags non-convergence.
    pub energy_tol: f64,
    pub max_iterations: usize,
    pub max_line_search: usize,
    /// Skip the Newton direction entirely (plain Barzilai-Borwein descent);
    /// mostly useful to exercise and test the fallback path.
    pub gradient_descent_only: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grad_tol: 1e-10,
            energy_tol: 1e-16,
            max_iterations: 200,
            max_line_search: 40,
            gradient_descent_only: false,
        }
    }
}

/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
/// Floor used in place of eps when assembling the Newton matrix at eps = 0
/// (the energy itself is never changed; this only regularizes cells with a
/// vanishing gradient, where the p > 2 profile Hessian degenerates).
const ASSEMBLY_EPS_FLOOR: f64 = 1e-12;

/// One solvable instance: mesh + operator data + source + boundary + schedule.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: Mesh,
    pub norm: AnisotropicNorm,
    pub p: f64,
    pub source: Source,
    pub boundary: Boundary,
    pub eps_schedule: Vec<f64>,
    pub options: SolveOptions,
    cell_source: Vec<f64>,
    boundary_values: Vec<f64>,
    dofs: Vec<usize>,
    node_dof: Vec<isize>,
    bandwidth: usize,
}

impl Problem {
    pub fn new(
        mesh: Mesh,
        norm: AnisotropicNorm,
        p: f64,
        source: Source,
        boundary: Boundary,
        eps_schedule: Vec<f64>,
        options: SolveOptions,
    ) -> Result<Problem, SolveError> {
        if !(p > 1.0) {
            return Err(SolveError::InvalidExponent(p));
        }
        if norm.dim() != mesh.dim() {
            return Err(SolveError::DimensionMismatch { norm: norm.dim(), mesh: mesh.dim() });
        }
        validate_schedule(&eps_schedule, p)?;
        let cell_source = source.eval_cells(&mesh)?;
        let mut boundary_values = vec![0.0; mesh.n_nodes()];
        for i in 0..mesh.n_nodes() {
            if mesh.is_boundary(i) {
                let v = match &boundary {
                    Boundary::Zero => 0.0,
                    Boundary::Expr(e) => e.eval(mesh.node(i)),
                    Boundary::Custom(f) => f(mesh.node(i)),
                };
                if !v.is_finite() {
                    return Err(SolveError::NonFiniteBoundary(i));
                }
                boundary_values[i] = v;
            }
        }
        let mut node_dof = vec![-1isize; mesh.n_nodes()];
        let mut dofs = Vec::new();
        for i in 0..mesh.n_nodes() {
            if !mesh.is_boundary(i) {
                node_dof[i] = dofs.len() as isize;
                dofs.push(i);
            }
        }
        let mut bandwidth = 0usize;
        for c in 0..mesh.n_cells() {
            let verts = mesh.cell_vertices(c);
            for &a in verts {
                for &b in verts {
                    if node_dof[a] >= 0 && node_dof[b] >= 0 {
                        bandwidth = bandwidth.max(node_dof[a].abs_diff(node_dof[b]));
                    }
                }
            }
        }
        Ok(Problem {
            mesh,
            norm,
            p,
            source,
            boundary,
            eps_schedule,
            options,
            cell_source,
            boundary_values,
            dofs,
            node_dof,
            bandwidth,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    pub fn cell_source(&self) -> &[f64] {
        &self.cell_source
    }

    /// Source after truncation at level `1/eps` (raw source for `eps = 0`).
    pub fn truncated_source(&self, eps: f64) -> Result<Vec<f64>, SolveError> {
        if eps == 0.0 {
            Ok(self.cell_source.clone())
        } else {
            Ok(truncate_source(&self.cell_source, eps)?)
        }
    }

    /// Nodal field equal to the boundary data on boundary nodes, zero inside.
    pub fn boundary_field(&self) -> ScalarField {
        ScalarField {
            support: Support::Nodes,
            data: self.boundary_values.clone(),
            unit: "1".into(),
        }
    }

    fn operator(&self, eps: f64) -> Result<RegularizedOperator, SolveError> {
        Ok(RegularizedOperator::new(self.norm.clone(), self.p, eps)?)
    }

    /// Per-cell gradient of a nodal vector (no field wrapper, hot path).
    fn cell_gradients(&self, u: &[f64]) -> Vec<f64> {
        let dim = self.mesh.dim();
        let nv = dim + 1;
        let mesh = &self.mesh;
        let mut out = vec![0.0; mesh.n_cells() * dim];
        out.par_chunks_mut(dim).enumerate().for_each(|(c, g)| {
            let verts = mesh.cell_vertices(c);
            for v in 0..nv {
                let uv = u[verts[v]];
                let bg = mesh.basis_grad(c, v);
                for a in 0..dim {
                    g[a] += uv * bg[a];
                }
            }
        });
        out
    }

    /// `J_eps(v)` for a full nodal vector (boundary entries included).
    pub fn energy(&self, eps: f64, u: &[f64]) -> Result<f64, SolveError> {
        let op = self.operator(eps)?;
        let f_eps = self.truncated_source(eps)?;
        let grads = self.cell_gradients(u);
        let dim = self.mesh.dim();
        let nv = dim + 1;
        let mesh = &self.mesh;
        let p = self.p;
        // Per-cell contributions in cell order, then compensated sequential
        // reduction: bit-reproducible at any thread count.
        let contribs: Vec<f64> = (0..mesh.n_cells())
            .into_par_iter()
            .map(|c| {
                let g = &grads[c * dim..(c + 1) * dim];
                let h = op.norm().eval_unchecked(g);
                let density = (eps * eps + h * h).powf(p / 2.0) / p;
                let vbar = mesh
                    .cell_vertices(c)
                    .iter()
                    .map(|&v| u[v])
                    .sum::<f64>()
                    / nv as f64;
                mesh.volume(c) * (density - f_eps[c] * vbar)
            })
            .collect();
        let mut acc = crate::mesh::kahan_sum();
        for v in contribs {
            acc.add(v);
        }
        Ok(acc.value())
    }

    /// Assembled energy gradient over interior dofs:
    /// `dJ/du_i = int a_eps(grad u) . grad phi_i - int f_eps phi_i`.
    pub fn energy_gradient(&self, eps: f64, u: &[f64]) -> Result<Vec<f64>, SolveError> {
        let op = self.operator(eps)?;
        let f_eps = self.truncated_source(eps)?;
        let grads = self.cell_gradients(u);
        let dim = self.mesh.dim();
        let nv = dim + 1;
        let mesh = &self.mesh;
        let per_cell: Vec<[f64; 4]> = (0..mesh.n_cells())
            .into_par_iter()
            .map(|c| {
                let g = &grads[c * dim..(c + 1) * dim];
                let a = op.stress(g).expect("stress is total on R^n");
                let vol = mesh.volume(c);
                let mut contrib = [0.0f64; 4];
                for v in 0..nv {
                    let bg = mesh.basis_grad(c, v);
                    let mut s = 0.0;
                    for axis in 0..dim {
                        s += a[axis] * bg[axis];
                    }
                    contrib[v] = vol * (s - f_eps[c] / nv as f64);
                }
                contrib
            })
            .collect();
        let mut out = vec![0.0; self.dofs.len()];
        for (c, contrib) in per_cell.iter().enumerate() {
            let verts = mesh.cell_vertices(c);
            for v in 0..nv {
                let d = self.node_dof[verts[v]];
                if d >= 0 {
                    out[d as usize] += contrib[v];
                }
            }
        }
        Ok(out)
    }

    /// Assembled Newton matrix `int grad phi_i^T A_eps(grad u) grad phi_j`
    /// over interior dofs.
    fn assemble_hessian(&self, eps: f64, u: &[f64]) -> Result<BandedSpd, SolveError> {
        let eps_assembly = if eps == 0.0 { ASSEMBLY_EPS_FLOOR } else { eps };
        let op = self.operator(eps_assembly)?;
        let grads = self.cell_gradients(u);
        let dim = self.mesh.dim();
        let nv = dim + 1;
        let mesh = &self.mesh;
        let p = self.p;
        let local: Vec<[f64; 16]> = (0..mesh.n_cells())
            .into_par_iter()
            .map(|c| {
                let g = &grads[c * dim..(c + 1) * dim];
                let a_mat = match op.stress_jacobian(g) {
                    Ok(m) => m,
                    // Degenerate cell (gradient exactly zero, non-ellipsoidal
                    // norm): any SPD surrogate keeps the damped iteration
                    // valid; use the isotropic one.
                    Err(OperatorError::SingularOrigin) => {
                        nalgebra::DMatrix::identity(dim, dim)
                            * eps_assembly.powf(p - 2.0)
                    }
                    Err(e) => panic!("stress jacobian: {e}"),
                };
                let vol = mesh.volume(c);
                let mut k = [0.0f64; 16];
                for i in 0..nv {
                    let bi = mesh.basis_grad(c, i);
                    for j in 0..=i {
                        let bj = mesh.basis_grad(c, j);
                        let mut s = 0.0;
                        for r in 0..dim {
                            for col in 0..dim {
                                s += bi[r] * a_mat[(r, col)] * bj[col];
                            }
                        }
                        k[i * nv + j] = vol * s;
                    }
                }
                k
            })
            .collect();
        let mut h = BandedSpd::zeros(self.dofs.len(), self.bandwidth);
        for (c, k) in local.iter().enumerate() {
            let verts = mesh.cell_vertices(c);
            for i in 0..nv {
                let di = self.node_dof[verts[i]];
                if di < 0 {
                    continue;
                }
                for j in 0..=i {
                    let dj = self.node_dof[verts[j]];
                    if dj < 0 {
                        continue;
                    }
                    h.add(di as usize, dj as usize, k[i * nv + j]);
                }
            }
        }
        Ok(h)
    }

    fn full_vector(&self, warm: Option<&ScalarField>) -> Result<Vec<f64>, SolveError> {
        let mut u = match warm {
            Some(w) => {
                w.check(&self.mesh)?;
                w.data.clone()
            }
            None => vec![0.0; self.mesh.n_nodes()],
        };
        for i in 0..self.mesh.n_nodes() {
            if self.mesh.is_boundary(i) {
                u[i] = self.boundary_values[i];
            }
        }
        Ok(u)
    }
}

fn validate_schedule(schedule: &[f64], p: f64) -> Result<(), SolveError> {
    if schedule.is_empty() {
        return Err(SolveError::InvalidSchedule("schedule is empty".into()));
    }
    for w in schedule.windows(2) {
        if !(w[1] < w[0]) {
            return Err(SolveError::InvalidSchedule(format!(
                "schedule must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    for &e in schedule {
        if !(0.0..1.0).contains(&e) {
            return Err(SolveError::InvalidSchedule(format!("eps {e} outside [0,1)")));
        }
    }
    if *schedule.last().unwrap() == 0.0 && p < 2.0 {
        return Err(SolveError::InvalidSchedule(
            "eps = 0 requires p >= 2 (the unregularized energy is nonsmooth for p < 2)".into(),
        ));
    }
    Ok(())
}

/// Default geometric schedule `0.5^k`, stopping at `max(1e-4, h)`:
/// regularization below the discretization scale is unobservable.
pub fn default_eps_schedule(h: f64) -> Vec<f64> {
    let floor = h.max(1e-4);
    let mut s = Vec::new();
    let mut e = 0.5;
    while e > floor {
        s.push(e);
        e *= 0.5;
    }
    s.push(floor);
    s
}

/// Outcome of one `minimize` call.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: ScalarField,
    pub eps: f64,
    pub energies: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub line_search_failures: usize,
    pub used_fallback: bool,
    pub wall_secs: f64,
}

/// Minimize `J_eps` over the admissible set (boundary values fixed).
///
/// Damped Newton with Armijo backtracking; Barzilai-Borwein gradient steps
/// when the Newton factorization fails. Non-convergence within the iteration
/// budget returns a report with `converged = false`, never a silent success.
pub fn minimize(
    problem: &Problem,
    eps: f64,
    warm_start: Option<&ScalarField>,
) -> Result<SolveReport, SolveError> {
    if eps == 0.0 && problem.p < 2.0 {
        return Err(SolveError::InvalidSchedule(
            "eps = 0 solve requires p >= 2".into(),
        ));
    }
    let start = Instant::now();
    let opts = problem.options;
    let mut u = problem.full_vector(warm_start)?;
    let mut energies = Vec::new();
    let mut grad_norms = Vec::new();
    let mut line_search_failures = 0usize;
    let mut used_fallback = false;
    let mut converged = false;
    let mut iterations = 0usize;
    let mut prev_u_g: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut stalled = 0usize;

    let mut energy = problem.energy(eps, &u)?;
    for it in 0..opts.max_iterations {
        iterations = it;
        let grad = problem.energy_gradient(eps, &u)?;
        let gnorm = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        energies.push(energy);
        grad_norms.push(gnorm);
        if gnorm <= opts.grad_tol {
            converged = true;
            break;
        }

        // Direction: Newton if the factorization goes through, otherwise a
        // Barzilai-Borwein scaled gradient step.
        let mut direction: Option<Vec<f64>> = None;
        if !opts.gradient_descent_only {
            if let Ok(chol) = problem.assemble_hessian(eps, &u)?.cholesky() {
                let neg: Vec<f64> = grad.iter().map(|v| -v).collect();
                direction = Some(chol.solve(&neg));
            }
        }
        let direction = match direction {
            Some(d) => d,
            None => {
                used_fallback = true;
                let scale = bb_step(prev_u_g.as_ref(), &u, &grad, problem);
                grad.iter().map(|v| -scale * v).collect()
            }
        };

        // Directional derivative; a nondescent direction (numerically) falls
        // back to steepest descent.
        let mut slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
        let direction = if slope < 0.0 {
            direction
        } else {
            used_fallback = true;
            slope = -grad.iter().map(|g| g * g).sum::<f64>();
            grad.iter().map(|v| -*v).collect()
        };

        // Armijo backtracking.
        let mut t = 1.0;
        let mut accepted = None;
        let mut best: Option<(f64, f64)> = None;
        for _ in 0..opts.max_line_search {
            let mut cand = u.clone();
            for (k, &dof) in problem.dofs.iter().enumerate() {
                cand[dof] += t * direction[k];
            }
            let e_cand = problem.energy(eps, &cand)?;
            if e_cand <= energy + ARMIJO_C * t * slope {
                accepted = Some((cand, e_cand));
                break;
            }
            if e_cand < energy && best.as_ref().map_or(true, |(_, be)| e_cand < *be) {
                best = Some((t, e_cand));
            }
            t *= 0.5;
        }
        let (next_u, next_e) = match accepted {
            Some(x) => x,
            None => {
                line_search_failures += 1;
                match best {
                    Some((tb, eb)) => {
                        let mut cand = u.clone();
                        for (k, &dof) in problem.dofs.iter().enumerate() {
                            cand[dof] += tb * direction[k];
                        }
                        (cand, eb)
                    }
                    None => break, // no decrease found: flagged non-convergence
                }
            }
        };
        if (energy - next_e).abs() <= opts.energy_tol * energy.abs().max(1.0) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        prev_u_g = Some((u.clone(), grad));
        u = next_u;
        energy = next_e;
        if stalled >= 3 {
            break; // no further progress possible at this precision
        }
    }
    if !converged {
        let grad = problem.energy_gradient(eps, &u)?;
        let gnorm = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        energies.push(energy);
        grad_norms.push(gnorm);
        if gnorm <= opts.grad_tol {
            converged = true;
        }
    }

    Ok(SolveReport {
        u: ScalarField { support: Support::Nodes, data: u, unit: "1".into() },
        eps,
        energies,
        grad_norms,
        iterations,
        converged,
        line_search_failures,
        used_fallback,
        wall_secs: start.elapsed().as_secs_f64(),
    })
}

/// Barzilai-Borwein step length from the previous (u, grad) pair; a
/// conservative scaled steepest-descent length on the first fallback step.
fn bb_step(
    prev: Option<&(Vec<f64>, Vec<f64>)>,
    u: &[f64],
    grad: &[f64],
    problem: &Problem,
) -> f64 {
    if let Some((pu, pg)) = prev {
        let mut sy = 0.0;
        let mut ss = 0.0;
        for (k, &dof) in problem.dofs.iter().enumerate() {
            let s = u[dof] - pu[dof];
            let y = grad[k] - pg[k];
            sy += s * y;
            ss += s * s;
        }
        if sy > 1e-30 && ss > 0.0 {
            return (ss / sy).clamp(1e-12, 1e12);
        }
    }
    let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if gn > 0.0 {
        (1.0 / gn).min(1.0)
    } else {
        1.0
    }
}

/// Result of an eps-continuation run.
#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub stages: Vec<SolveReport>,
    /// `W^{1,p}` increments between consecutive stages (len = stages - 1),
    /// a Cauchy witness for the eps -> 0 limit.
    pub increments: Vec<f64>,
}

impl ContinuationResult {
    pub fn final_field(&self) -> &ScalarField {
        &self.stages.last().expect("schedule is nonempty").u
    }

    pub fn all_converged(&self) -> bool {
        self.stages.iter().all(|s| s.converged)
    }
}

/// Solve along the whole eps schedule, warm-starting each stage from the
/// previous one.
pub fn continuation_solve(problem: &Problem) -> Result<ContinuationResult, SolveError> {
    validate_schedule(&problem.eps_schedule, problem.p)?;
    let mut stages: Vec<SolveReport> = Vec::new();
    for &eps in &problem.eps_schedule {
        let warm = stages.last().map(|s| &s.u);
        let report = minimize(problem, eps, warm)?;
        stages.push(report);
    }
    let mut increments = Vec::new();
    for w in stages.windows(2) {
        increments.push(crate::mesh::w1p_distance(
            &problem.mesh,
            &w[0].u,
            &w[1].u,
            problem.p,
        )?);
    }
    Ok(ContinuationResult { stages, increments })
}

/// Homogeneous-Dirichlet P1 Poisson solve `-Delta w = f`, assembled directly
/// from the Laplace stiffness (independent of the nonlinear machinery; the
/// linear oracle for p = 2 and the potential construction for the
/// divergence-representation check).
pub fn poisson_solve(mesh: &Mesh, f_cells: &[f64]) -> Result<ScalarField, SolveError> {
    if f_cells.len() != mesh.n_cells() {
        return Err(SolveError::SourceLength { expected: mesh.n_cells(), got: f_cells.len() });
    }
    let dim = mesh.dim();
    let nv = dim + 1;
    let mut node_dof = vec![-1isize; mesh.n_nodes()];
    let mut dofs = Vec::new();
    for i in 0..mesh.n_nodes() {
        if !mesh.is_boundary(i) {
            node_dof[i] = dofs.len() as isize;
            dofs.push(i);
        }
    }
    let mut bw = 0usize;
    for c in 0..mesh.n_cells() {
        let verts = mesh.cell_vertices(c);
        for &a in verts {
            for &b in verts {
                if node_dof[a] >= 0 && node_dof[b] >= 0 {
                    bw = bw.max(node_dof[a].abs_diff(node_dof[b]));
                }
            }
        }
    }
    let mut k = BandedSpd::zeros(dofs.len(), bw);
    let mut rhs = vec![0.0; dofs.len()];
    for c in 0..mesh.n_cells() {
        let verts = mesh.cell_vertices(c);
        let vol = mesh.volume(c);
        for i in 0..nv {
            let di = node_dof[verts[i]];
            if di < 0 {
                continue;
            }
            rhs[di as usize] += vol * f_cells[c] / nv as f64;
            for j in 0..=i {
                let dj = node_dof[verts[j]];
                if dj < 0 {
                    continue;
                }
                let (bi, bj) = (mesh.basis_grad(c, i), mesh.basis_grad(c, j));
                let s: f64 = (0..dim).map(|a| bi[a] * bj[a]).sum();
                k.add(di as usize, dj as usize, vol * s);
            }
        }
    }
    let chol = k
        .cholesky()
        .map_err(|e| SolveError::InvalidSchedule(format!("poisson matrix not SPD at row {}", e.row)))?;
    let x = chol.solve(&rhs);
    let mut u = ScalarField::zeros(mesh, Support::Nodes);
    for (k, &node) in dofs.iter().enumerate() {
        u.data[node] = x[k];
    }
    Ok(u)
}

/// Max interior residual of the discrete weak identity
/// `int grad w . grad phi_i - int f phi_i` (Galerkin orthogonality witness).
pub fn poisson_residual(mesh: &Mesh, w: &ScalarField, f_cells: &[f64]) -> Result<f64, SolveError> {
    w.check(mesh)?;
    let dim = mesh.dim();
    let nv = dim + 1;
    let grads = {
        let g = crate::mesh::gradient(mesh, w)?;
        g.data
    };
    let mut res = vec![0.0; mesh.n_nodes()];
    for c in 0..mesh.n_cells() {
        let verts = mesh.cell_vertices(c);
        let vol = mesh.volume(c);
        let g = &grads[c * dim..(c + 1) * dim];
        for v in 0..nv {
            let bg = mesh.basis_grad(c, v);
            let s: f64 = (0..dim).map(|a| g[a] * bg[a]).sum();
            res[verts[v]] += vol * (s - f_cells[c] / nv as f64);
        }
    }
    Ok((0..mesh.n_nodes())
        .filter(|&i| !mesh.is_boundary(i))
        .map(|i| res[i].abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests;
