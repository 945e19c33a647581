//! Discrete differential operators and quadrature on P1 meshes.
//!
//! Gradients of nodal fields are exact per-cell constants. Nodal derivatives
//! of per-cell fields (and hence Hessians of nodal fields) are produced by a
//! least-squares affine fit over each node's cell patch; on the structured
//! meshes used here the fit reproduces quadratics exactly at interior nodes.
//! All integrals use midpoint (P0) or vertex-average (P1) quadrature with
//! region weights and compensated summation, so results are independent of
//! the evaluation order.

use nalgebra::{DMatrix, DVector};

use super::{MatrixField, Mesh, MeshError, Region, ScalarField, Support, VectorField};

/// Neumaier compensated accumulator.
#[derive(Default, Clone, Copy)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

/// Fresh compensated accumulator (for deterministic reductions elsewhere).
pub fn kahan_sum() -> Kahan {
    Kahan::default()
}

impl Kahan {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Per-cell constant gradient of a nodal field. Exact for affine data.
pub fn gradient(mesh: &Mesh, u: &ScalarField) -> Result<VectorField, MeshError> {
    u.check(mesh)?;
    if u.support != Support::Nodes {
        return Err(MeshError::WrongSupport);
    }
    let dim = mesh.dim();
    let nv = dim + 1;
    let mut out = VectorField::zeros(mesh, Support::Cells);
    for c in 0..mesh.n_cells() {
        let verts = mesh.cell_vertices(c);
        let base = c * dim;
        for v in 0..nv {
            let uv = u.data[verts[v]];
            let g = mesh.basis_grad(c, v);
            for a in 0..dim {
                out.data[base + a] += uv * g[a];
            }
        }
    }
    Ok(out)
}

/// Per-cell value of a field: vertex average for nodal fields, identity for
/// cell fields. The vertex average is the cell integral mean of P1 data.
pub fn cell_average(mesh: &Mesh, g: &ScalarField) -> Result<Vec<f64>, MeshError> {
    g.check(mesh)?;
    match g.support {
        Support::Cells => Ok(g.data.clone()),
        Support::Nodes => {
            let nv = mesh.dim() + 1;
            Ok((0..mesh.n_cells())
                .map(|c| {
                    mesh.cell_vertices(c).iter().map(|&v| g.data[v]).sum::<f64>() / nv as f64
                })
                .collect())
        }
    }
}

/// `int_region g * weight dx` with midpoint/vertex-average quadrature.
pub fn integrate(
    mesh: &Mesh,
    g: &ScalarField,
    region: &Region,
    weight: Option<&ScalarField>,
) -> Result<f64, MeshError> {
    let gc = cell_average(mesh, g)?;
    let wc = match weight {
        Some(w) => Some(cell_average(mesh, w)?),
        None => None,
    };
    let mut acc = Kahan::default();
    for c in 0..mesh.n_cells() {
        let rw = region.weight(c);
        if rw == 0.0 {
            continue;
        }
        let mut v = rw * mesh.volume(c) * gc[c];
        if let Some(w) = &wc {
            v *= w[c];
        }
        acc.add(v);
    }
    Ok(acc.value())
}

/// `int_region |g|^q dx` for any `q > 0` (not a norm; used for the
/// `p-1 < 1` growth integrals).
pub fn power_integral(
    mesh: &Mesh,
    g: &ScalarField,
    q: f64,
    region: &Region,
) -> Result<f64, MeshError> {
    if !(q > 0.0) {
        return Err(MeshError::InvalidExponent(q));
    }
    integrate(mesh, &g.map(|v| v.abs().powf(q)), region, None)
}

/// `L^q` norm over a region, `q >= 1`.
pub fn lq_norm(mesh: &Mesh, g: &ScalarField, q: f64, region: &Region) -> Result<f64, MeshError> {
    if !(q >= 1.0) {
        return Err(MeshError::InvalidExponent(q));
    }
    Ok(power_integral(mesh, g, q, region)?.powf(1.0 / q))
}

/// `|| grad u ||_{L^p(region)}`.
pub fn sobolev_seminorm(
    mesh: &Mesh,
    u: &ScalarField,
    p: f64,
    region: &Region,
) -> Result<f64, MeshError> {
    let g = gradient(mesh, u)?.magnitude();
    lq_norm(mesh, &g, p, region)
}

/// Full `W^{1,p}` norm over the whole domain.
pub fn w1p_norm(mesh: &Mesh, u: &ScalarField, p: f64) -> Result<f64, MeshError> {
    let whole = Region::whole(mesh);
    let lp = power_integral(mesh, u, p, &whole)?;
    let gp = power_integral(mesh, &gradient(mesh, u)?.magnitude(), p, &whole)?;
    Ok((lp + gp).powf(1.0 / p))
}

/// `W^{1,p}` distance between two nodal fields.
pub fn w1p_distance(
    mesh: &Mesh,
    u: &ScalarField,
    v: &ScalarField,
    p: f64,
) -> Result<f64, MeshError> {
    u.check(mesh)?;
    v.check(mesh)?;
    if u.support != Support::Nodes || v.support != Support::Nodes {
        return Err(MeshError::WrongSupport);
    }
    let diff = ScalarField {
        support: Support::Nodes,
        data: u.data.iter().zip(&v.data).map(|(a, b)| a - b).collect(),
        unit: u.unit.clone(),
    };
    w1p_norm(mesh, &diff, p)
}

/// Result of patch recovery of a per-cell vector field: a smoothed nodal
/// field and its nodal Jacobian, with a validity mask (interior nodes whose
/// least-squares fit succeeded).
#[derive(Debug, Clone)]
pub struct Recovery {
    pub values: VectorField,
    pub jacobian: MatrixField,
    pub valid: Vec<bool>,
}

/// Least-squares affine fit of a per-cell vector field over each node's cell
/// patch, sampled at cell centroids.
pub fn recover_cell_field(mesh: &Mesh, f: &VectorField) -> Result<Recovery, MeshError> {
    f.check(mesh)?;
    if f.support != Support::Cells {
        return Err(MeshError::WrongSupport);
    }
    let dim = mesh.dim();
    let k = dim + 1; // unknowns per component: constant + linear part
    let mut values = VectorField::zeros(mesh, Support::Nodes);
    let mut jac = MatrixField::zeros(mesh, Support::Nodes);
    jac.symmetric = false;
    let mut valid = vec![false; mesh.n_nodes()];
    let mut row = vec![0.0; k];
    for node in 0..mesh.n_nodes() {
        let cells = mesh.cells_at_node(node);
        if cells.len() < k {
            continue;
        }
        let x0 = mesh.node(node).to_vec();
        let mut normal = DMatrix::<f64>::zeros(k, k);
        let mut rhs = DMatrix::<f64>::zeros(k, dim);
        for &c in cells {
            row[0] = 1.0;
            let cen = mesh.centroid(c);
            for a in 0..dim {
                row[a + 1] = cen[a] - x0[a];
            }
            for i in 0..k {
                for j in 0..k {
                    normal[(i, j)] += row[i] * row[j];
                }
                let fv = f.get(c);
                for a in 0..dim {
                    rhs[(i, a)] += row[i] * fv[a];
                }
            }
        }
        let chol = match normal.cholesky() {
            Some(c) => c,
            None => continue,
        };
        for a in 0..dim {
            let beta: DVector<f64> = chol.solve(&rhs.column(a).into_owned());
            values.data[node * dim + a] = beta[0];
            for b in 0..dim {
                // d f_a / d x_b
                jac.set_entry(node, a, b, beta[b + 1]);
            }
        }
        // Fits on boundary patches are one-sided and not superconvergent;
        // keep the value but exclude them from Hessian-type integrals.
        valid[node] = !mesh.is_boundary(node);
    }
    jac.valid.clone_from(&valid);
    Ok(Recovery { values, jacobian: jac, valid })
}

/// Recovered nodal Hessian of a nodal field: the symmetrized Jacobian of the
/// recovered gradient. Exact for quadratics at interior nodes of the
/// structured meshes built by this crate.
pub fn hessian(mesh: &Mesh, u: &ScalarField) -> Result<MatrixField, MeshError> {
    let g = gradient(mesh, u)?;
    let rec = recover_cell_field(mesh, &g)?;
    let mut h = rec.jacobian;
    let dim = mesh.dim();
    for i in 0..h.len() {
        for r in 0..dim {
            for c in 0..r {
                let s = 0.5 * (h.entry(i, r, c) + h.entry(i, c, r));
                h.set_entry(i, r, c, s);
                h.set_entry(i, c, r, s);
            }
        }
    }
    h.symmetric = true;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> Mesh {
        Mesh::rectangle([0.0, 0.0], [1.0, 1.0], n, n).unwrap()
    }

    #[test]
    fn gradient_exact_for_affine() {
        let m = unit_square(5);
        let u = ScalarField::from_fn(&m, Support::Nodes, |x| x[0]);
        let g = gradient(&m, &u).unwrap();
        for c in 0..m.n_cells() {
            assert!((g.get(c)[0] - 1.0).abs() < 1e-13);
            assert!(g.get(c)[1].abs() < 1e-13);
        }
        let konst = ScalarField::from_fn(&m, Support::Nodes, |_| 3.5);
        let gk = gradient(&m, &konst).unwrap();
        assert!(gk.data.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn gradient_converges_for_quadratic() {
        // Cell-averaged gradient of x^2 approaches (2x, 0) at rate O(h).
        let mut errs = Vec::new();
        for n in [8, 16, 32] {
            let m = unit_square(n);
            let u = ScalarField::from_fn(&m, Support::Nodes, |x| x[0] * x[0]);
            let g = gradient(&m, &u).unwrap();
            let mut worst: f64 = 0.0;
            for c in 0..m.n_cells() {
                let exact = 2.0 * m.centroid(c)[0];
                worst = worst.max((g.get(c)[0] - exact).abs());
            }
            errs.push(worst);
        }
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
        assert!(errs[0] / errs[2] > 2.5);
    }

    #[test]
    fn integrate_constants_and_partition() {
        let m = unit_square(64);
        let one = ScalarField::from_fn(&m, Support::Nodes, |_| 1.0);
        let whole = Region::whole(&m);
        assert!((integrate(&m, &one, &whole, None).unwrap() - 1.0).abs() < 1e-12);
        // Partition additivity: ball + annulus = bigger ball.
        let g = ScalarField::from_fn(&m, Support::Nodes, |x| (3.0 * x[0]).sin() + x[1]);
        let b1 = Region::ball(&m, &[0.5, 0.5], 0.2).unwrap();
        let ann = Region::annulus(&m, &[0.5, 0.5], 0.2, 0.4).unwrap();
        let b2 = Region::ball(&m, &[0.5, 0.5], 0.4).unwrap();
        let sum = integrate(&m, &g, &b1, None).unwrap() + integrate(&m, &g, &ann, None).unwrap();
        assert!((sum - integrate(&m, &g, &b2, None).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn lq_norm_homogeneity_and_errors() {
        let m = unit_square(16);
        let g = ScalarField::from_fn(&m, Support::Nodes, |x| x[0] - 0.3);
        let whole = Region::whole(&m);
        let n1 = lq_norm(&m, &g, 2.5, &whole).unwrap();
        let mut g5 = g.clone();
        g5.scale(-5.0);
        let n5 = lq_norm(&m, &g5, 2.5, &whole).unwrap();
        assert!((n5 - 5.0 * n1).abs() < 1e-12 * n5);
        assert!(matches!(lq_norm(&m, &g, 0.5, &whole), Err(MeshError::InvalidExponent(_))));
        assert!(power_integral(&m, &g, 0.5, &whole).is_ok());
    }

    #[test]
    fn hessian_exact_for_quadratics() {
        let m = unit_square(8);
        let u = ScalarField::from_fn(&m, Support::Nodes, |x| x[0] * x[0]);
        let h = hessian(&m, &u).unwrap();
        for i in 0..m.n_nodes() {
            if h.valid[i] {
                assert!((h.entry(i, 0, 0) - 2.0).abs() < 1e-10, "{}", h.entry(i, 0, 0));
                assert!(h.entry(i, 0, 1).abs() < 1e-10);
                assert!(h.entry(i, 1, 1).abs() < 1e-10);
            }
        }
        // Mixed quadratic.
        let u2 = ScalarField::from_fn(&m, Support::Nodes, |x| x[0] * x[1] + 0.5 * x[1] * x[1]);
        let h2 = hessian(&m, &u2).unwrap();
        for i in 0..m.n_nodes() {
            if h2.valid[i] {
                assert!(h2.entry(i, 0, 0).abs() < 1e-10);
                assert!((h2.entry(i, 0, 1) - 1.0).abs() < 1e-10);
                assert!((h2.entry(i, 1, 1) - 1.0).abs() < 1e-10);
            }
        }
        // Affine data has zero Hessian.
        let ua = ScalarField::from_fn(&m, Support::Nodes, |x| 2.0 * x[0] - x[1] + 1.0);
        let ha = hessian(&m, &ua).unwrap();
        for i in 0..m.n_nodes() {
            if ha.valid[i] {
                assert!(ha.frobenius_sq().data[i] < 1e-20);
            }
        }
    }

    #[test]
    fn hessian_converges_for_sine() {
        // || D^2 u - exact ||_L2 with u = sin(x) decreases under refinement.
        let mut errs = Vec::new();
        for n in [8, 16, 32] {
            let m = unit_square(n);
            let u = ScalarField::from_fn(&m, Support::Nodes, |x| x[0].sin());
            let h = hessian(&m, &u).unwrap();
            let mut err = ScalarField::zeros(&m, Support::Nodes);
            for i in 0..m.n_nodes() {
                if h.valid[i] {
                    let exact = -m.node(i)[0].sin();
                    let d00 = h.entry(i, 0, 0) - exact;
                    let d01 = h.entry(i, 0, 1);
                    let d11 = h.entry(i, 1, 1);
                    err.data[i] = d00 * d00 + 2.0 * d01 * d01 + d11 * d11;
                }
            }
            let whole = Region::whole(&m);
            errs.push(integrate(&m, &err, &whole, None).unwrap().sqrt());
        }
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
    }

    #[test]
    fn hessian_3d_quadratic() {
        let m = Mesh::box3d([0.0; 3], [1.0; 3], [5, 5, 5]).unwrap();
        let u = ScalarField::from_fn(&m, Support::Nodes, |x| {
            x[0] * x[0] + 0.5 * x[1] * x[2]
        });
        let h = hessian(&m, &u).unwrap();
        let mut checked = 0;
        for i in 0..m.n_nodes() {
            if h.valid[i] {
                checked += 1;
                assert!((h.entry(i, 0, 0) - 2.0).abs() < 1e-9);
                assert!((h.entry(i, 1, 2) - 0.5).abs() < 1e-9);
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn w1p_distance_basics() {
        let m = unit_square(10);
        let u = ScalarField::from_fn(&m, Support::Nodes, |x| x[0] * x[1]);
        assert_eq!(w1p_distance(&m, &u, &u, 2.0).unwrap(), 0.0);
        let v = ScalarField::from_fn(&m, Support::Nodes, |x| x[0] * x[1] + 0.1 * x[0]);
        let d = w1p_distance(&m, &u, &v, 2.0).unwrap();
        // Difference is 0.1 x: L2 norm 0.1/sqrt(3), gradient norm 0.1.
        let exact = (0.01 / 3.0 + 0.01f64).sqrt();
        assert!((d - exact).abs() < 1e-3);
    }
}
